#include "oscint/phase.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

namespace oscint {

void validate(const PhaseSpec& p) {
  if (p.kind == PhaseKind::FractionalDistance) {
    if (!(p.gamma >= 1.0) || !std::isfinite(p.gamma))
      throw std::invalid_argument("phase: gamma must be finite and >= 1");
  }
}

double phase_eval(const PhaseSpec& p, std::span<const double> x,
                  std::span<const double> y) {
  if (y.size() > x.size())
    throw std::invalid_argument("phase_eval: dim(y) exceeds dim(x)");
  if (p.kind == PhaseKind::Linear) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += x[i] * y[i];
    return s;
  }
  validate(p);
  // |x - (y, 0)|^gamma, y padded with zeros up to dim(x)
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = i < y.size() ? x[i] - y[i] : x[i];
    d2 += t * t;
  }
  if (d2 == 0.0) {
    if (p.gamma < 2.0)
      throw std::domain_error(
          "phase_eval: coincident points, gradient of d^gamma singular for "
          "gamma < 2");
    return 0.0;
  }
  return std::pow(d2, 0.5 * p.gamma);
}

HessianReport mixed_hessian_det(double gamma, std::span<const double> x_prime,
                                std::span<const double> xi) {
  if (xi.size() != x_prime.size() + 1)
    throw std::invalid_argument("mixed_hessian_det: need dim(xi) = dim(x')+1");
  if (!(gamma >= 1.0) || !std::isfinite(gamma))
    throw std::invalid_argument("mixed_hessian_det: gamma must be >= 1");

  const std::size_t k = x_prime.size();
  double horiz2 = 0.0;  // |xi' - x'|^2
  for (std::size_t i = 0; i < k; ++i) {
    const double t = xi[i] - x_prime[i];
    horiz2 += t * t;
  }
  const double xin = xi[k];
  const double d2 = horiz2 + xin * xin;
  if (d2 == 0.0)
    throw std::domain_error("mixed_hessian_det: coincident point, d = 0");
  const double d = std::sqrt(d2);

  HessianReport r;
  r.gamma = gamma;
  r.d = d;
  r.a.resize(k);
  double a2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    r.a[i] = (x_prime[i] - xi[i]) / d;
    a2 += r.a[i] * r.a[i];
  }
  r.det = 1.0 + (gamma - 2.0) * a2;
  r.prefactor = -gamma * std::pow(d, gamma - 2.0);

  // independent route: ((gamma-1)|xi'-x'|^2 + xi_n^2) / d^2
  const double alt = ((gamma - 1.0) * horiz2 + xin * xin) / d2;
  if (std::abs(r.det - alt) > 1e-12 * std::max(1.0, std::abs(alt)))
    throw std::runtime_error("mixed_hessian_det: determinant routes disagree");
  return r;
}

SylvesterResult sylvester_check(std::span<const double> a, double gamma) {
  const std::size_t k = a.size();
  if (k == 0 || k > 8)
    throw std::invalid_argument("sylvester_check: need 1 <= dim <= 8");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(
      static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  double a2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
          (gamma - 2.0) * a[i] * a[j];
    a2 += a[i] * a[i];
  }
  SylvesterResult r;
  r.direct = Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
  r.rank_one = 1.0 + (gamma - 2.0) * a2;
  return r;
}

NondegeneracyReport nondegeneracy_scan(double gamma, double c1, int samples,
                                       std::uint64_t seed) {
  if (!(gamma >= 1.0)) throw std::invalid_argument("scan: gamma must be >= 1");
  if (samples < 1) throw std::invalid_argument("scan: samples must be >= 1");
  if (gamma == 1.0 && !(c1 > 0.0 && c1 < 2.0))
    throw std::invalid_argument("scan: gamma = 1 needs 0 < c1 < 2");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> box(-1.0, 1.0);

  NondegeneracyReport rep;
  rep.samples = samples;
  rep.min_det = std::numeric_limits<double>::infinity();
  // scan in the first off-plane case n = 3: x' in R^2, xi in R^3
  const double d_lo = gamma == 1.0 ? std::max(0.5, c1) : 0.5;
  for (int s = 0; s < samples; ++s) {
    const double x0 = box(rng), x1 = box(rng);
    const double d = d_lo + (2.0 - d_lo) * unit(rng);
    double xin;
    if (gamma == 1.0) {
      // admissible cone |xi_n| >= c1 d / 2 ... keep it simple: |xi_n| >= c1
      xin = c1 + (d - c1) * unit(rng);
      if (unit(rng) < 0.5) xin = -xin;
    } else {
      xin = d * (2.0 * unit(rng) - 1.0);
    }
    const double rho = std::sqrt(std::max(0.0, d * d - xin * xin));
    const double th = 2.0 * M_PI * unit(rng);
    const double xp[2] = {x0, x1};
    const double xi[3] = {x0 + rho * std::cos(th), x1 + rho * std::sin(th),
                          xin};
    const HessianReport h = mixed_hessian_det(gamma, xp, xi);
    rep.min_det = std::min(rep.min_det, h.det);
  }
  rep.analytic_bound =
      gamma > 1.0 ? std::min(gamma - 1.0, 1.0) : 0.25 * c1 * c1;
  return rep;
}

}  // namespace oscint
