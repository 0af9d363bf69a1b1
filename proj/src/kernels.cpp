#include "oscint/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace oscint {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument("kernels: " + msg);
}

double norm2(std::span<const double> z) {
  double s = 0.0;
  for (double zi : z) s += zi * zi;
  return std::sqrt(s);
}

double expm_inv(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// exp(-1/(1-u^2)) on (-1,1), the mollifier profile before normalization.
double bump_profile(double u) {
  double s = 1.0 - u * u;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

template <class F>
double adaptive_simpson_rec(const F& f, double a, double fa, double b,
                            double fb, double m, double fm, double whole,
                            double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                              depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (a >= b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

double bump_mass() {
  static const double z =
      adaptive_simpson(bump_profile, -1.0, 1.0, 1e-14);
  return z;
}

// CDF of the normalized radius-1 bump profile, clamped outside [-1, 1].
double bump_cdf(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return adaptive_simpson(bump_profile, -1.0, x, 1e-14) / bump_mass();
}

double angular_factor(const KernelSpec& k, std::span<const double> z,
                      double r) {
  if (!k.angular_cutoff) return 1.0;
  double c1 = k.angular_cutoff->c1;
  double ratio = std::abs(z[z.size() - 1]) / r;
  return smoothstep((ratio - c1) / c1);
}

}  // namespace

void validate(const KernelSpec& k) {
  require(k.ambient_dim >= 2, "ambient_dim must be >= 2");
  require(k.p > 0.0 && k.p <= k.ambient_dim - 1.0,
          "exponent p must lie in (0, ambient_dim - 1]");
  require(k.m >= 0.0 && k.m < k.ambient_dim - 1.0,
          "regularity gain m must lie in [0, ambient_dim - 1)");
  require(std::isfinite(k.amplitude), "amplitude must be finite");
  if (k.angular_cutoff)
    require(k.angular_cutoff->c1 > 0.0, "angular cutoff c1 must be positive");
}

double kernel_eval(const KernelSpec& k, std::span<const double> z) {
  require(static_cast<int>(z.size()) == k.ambient_dim,
          "kernel argument dimension mismatch");
  double r = norm2(z);
  if (r == 0.0) throw std::domain_error("kernels: kernel evaluated at z = 0");
  return k.amplitude * std::pow(r, -k.p) * angular_factor(k, z, r);
}

double a2_ratio(const KernelSpec& k, std::span<const double> z,
                std::span<const int> alpha) {
  require(static_cast<int>(z.size()) == k.ambient_dim,
          "kernel argument dimension mismatch");
  require(alpha.size() == z.size(), "multi-index dimension mismatch");
  int order = 0;
  for (int a : alpha) {
    require(a >= 0, "multi-index entries must be nonnegative");
    order += a;
  }
  require(order <= 2, "a2_ratio supports |alpha| <= 2 only");
  double r = norm2(z);
  if (r == 0.0) throw std::domain_error("kernels: a2_ratio at z = 0");
  double h = 1e-4 * r;

  std::vector<double> w(z.begin(), z.end());
  auto eval_shifted = [&](int i, double di, int j, double dj) {
    double zi = w[i], zj = w[j];
    w[i] += di;
    w[j] += dj;
    double v = kernel_eval(k, w);
    w[i] = zi;
    w[j] = zj;
    return v;
  };

  double d = 0.0;
  if (order == 0) {
    d = kernel_eval(k, w);
  } else if (order == 1) {
    int i = 0;
    while (alpha[i] == 0) ++i;
    d = (eval_shifted(i, h, i, 0.0) - eval_shifted(i, -h, i, 0.0)) / (2.0 * h);
  } else {
    int i = -1, j = -1;
    for (size_t a = 0; a < alpha.size(); ++a) {
      if (alpha[a] == 2) i = j = static_cast<int>(a);
      if (alpha[a] == 1) (i < 0 ? i : j) = static_cast<int>(a);
    }
    if (i == j) {
      double c = kernel_eval(k, w);
      d = (eval_shifted(i, h, i, 0.0) - 2.0 * c + eval_shifted(i, -h, i, 0.0)) /
          (h * h);
    } else {
      d = (eval_shifted(i, h, j, h) - eval_shifted(i, h, j, -h) -
           eval_shifted(i, -h, j, h) + eval_shifted(i, -h, j, -h)) /
          (4.0 * h * h);
    }
  }
  return std::abs(d) * std::pow(r, k.p + order);
}

double smoothstep(double t) {
  double a = expm_inv(t);
  double b = expm_inv(1.0 - t);
  if (a == 0.0) return 0.0;
  if (b == 0.0) return 1.0;
  return a / (a + b);
}

double eta_shell(double r) { return smoothstep(2.0 - std::abs(r)); }

double phi_annulus(double r) { return smoothstep(std::abs(r) - 1.0); }

double partition_bump(double t) {
  if (std::abs(t) >= 0.6) return 0.0;
  return bump_cdf(10.0 * (t + 0.5)) - bump_cdf(10.0 * (t - 0.5));
}

void validate(const TensorBump& b) {
  require(!b.box.empty(), "tensor bump needs at least one axis");
  require(b.margin > 0.0, "tensor bump margin must be positive");
  for (const auto& [lo, hi] : b.box)
    require(lo <= hi, "tensor bump box must have lo <= hi");
}

double tensor_bump_eval(const TensorBump& b, std::span<const double> x) {
  require(x.size() == b.box.size(), "tensor bump point dimension mismatch");
  double v = 1.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double lo = b.box[i][0], hi = b.box[i][1];
    v *= smoothstep((x[i] - (lo - b.margin)) / b.margin) *
         smoothstep(((hi + b.margin) - x[i]) / b.margin);
    if (v == 0.0) return 0.0;
  }
  return v;
}

double cutoff_eval(const CutoffSpec& c, double t) {
  switch (c.kind) {
    case CutoffKind::EtaShell:
      return eta_shell(t);
    case CutoffKind::PhiAnnulus:
      return phi_annulus(t);
    case CutoffKind::PartitionBump:
      return partition_bump(t);
    case CutoffKind::TensorBump:
      break;
  }
  require(c.bump.box.size() == 1, "tensor bump expects a matching point");
  double x[1] = {t};
  return tensor_bump_eval(c.bump, x);
}

double cutoff_eval(const CutoffSpec& c, std::span<const double> x) {
  if (c.kind == CutoffKind::TensorBump) return tensor_bump_eval(c.bump, x);
  if (c.kind == CutoffKind::PartitionBump) {
    require(x.size() == 1, "partition bump is one-dimensional");
    return partition_bump(x[0]);
  }
  return cutoff_eval(c, norm2(x));
}

double dyadic_piece(const KernelSpec& k, std::span<const double> u) {
  require(static_cast<int>(u.size()) == k.ambient_dim,
          "kernel argument dimension mismatch");
  double r = norm2(u);
  if (r == 0.0) return 0.0;
  double shells = eta_shell(r) - eta_shell(2.0 * r);
  if (shells == 0.0) return 0.0;
  return k.amplitude * std::pow(r, -k.p) * angular_factor(k, u, r) * shells;
}

double dyadic_reconstruct(const KernelSpec& k, std::span<const double> z) {
  require(static_cast<int>(z.size()) == k.ambient_dim,
          "kernel argument dimension mismatch");
  double r = norm2(z);
  if (r == 0.0) throw std::domain_error("kernels: reconstruct at z = 0");
  int k0 = static_cast<int>(std::floor(-std::log2(r)));
  std::vector<double> u(z.size());
  double total = 0.0;
  for (int j = k0 - 1; j <= k0 + 1; ++j) {
    double s = std::exp2(static_cast<double>(j));
    for (size_t i = 0; i < z.size(); ++i) u[i] = s * z[i];
    total += std::pow(2.0, j * k.p) * dyadic_piece(k, u);
  }
  return total;
}

}  // namespace oscint
