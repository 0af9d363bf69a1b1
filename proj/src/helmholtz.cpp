#include "oscint/helmholtz.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace oscint {

namespace {

Grid plane_grid(const PlaneSpec& p) { return make_grid(p.box, p.points); }

Vec3 apply_transpose(const Mat3& m, const Vec3& v) {
  // columns of m are the frame vectors; M^T x = (col_k . x)
  return {m[0] * v[0] + m[3] * v[1] + m[6] * v[2],
          m[1] * v[0] + m[4] * v[1] + m[7] * v[2],
          m[2] * v[0] + m[5] * v[1] + m[8] * v[2]};
}

void check_resolution(const PlaneSpec& p, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("field: lambda must be finite and >= 0");
  if (lambda * plane_grid(p).max_step() > 0.5 * M_PI * (1.0 + 1e-12))
    throw std::invalid_argument(
        "field: plane grid too coarse for this lambda (lambda h > pi/2)");
}

// quadrature sum in the plane frame; mass (optional) collects int |G phi0|
cplx field_local(const PlaneSpec& p, double lambda, const Vec3& w,
                 double* mass = nullptr) {
  const Grid g = plane_grid(p);
  const double wq = g.weight();
  cplx acc(0.0);
  double m = 0.0;
  std::vector<double> z(2);
  for (std::int64_t j = 0; j < g.size(); ++j) {
    g.node(j, z);
    const double a = tensor_bump_eval(p.aperture, z);
    if (a == 0.0) continue;
    const double dx = w[0] - z[0], dy = w[1] - z[1];
    const double d = std::sqrt(dx * dx + dy * dy + w[2] * w[2]);
    if (d == 0.0)
      throw std::domain_error("field: evaluation point hits a quadrature node");
    const double amp = a / (4.0 * M_PI * d);
    acc += std::polar(amp, lambda * d);
    m += std::abs(amp);
  }
  if (mass) *mass = wq * m;
  return wq * acc;
}

}  // namespace

void validate(const PlaneSpec& p) {
  householder_to_normal(p.normal);  // unit-normal check
  if (p.box.size() != 2 || p.points.size() != 2)
    throw std::invalid_argument("plane: patch must be two-dimensional");
  validate(plane_grid(p));
  validate(p.aperture);
  if (p.aperture.box.size() != 2)
    throw std::invalid_argument("plane: aperture must cover the plane coords");
}

cplx green(const Vec3& x, const Vec3& y, double lambda) {
  const double dx = x[0] - y[0], dy = x[1] - y[1], dz = x[2] - y[2];
  const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (d == 0.0) throw std::domain_error("green: coincident points");
  return std::polar(1.0 / (4.0 * M_PI * d), lambda * d);
}

cplx field(const PlaneSpec& p, double lambda, const Vec3& x) {
  validate(p);
  check_resolution(p, lambda);
  const Mat3 m = householder_to_normal(p.normal);
  return field_local(p, lambda, apply_transpose(m, x));
}

std::vector<cplx> field_at(const PlaneSpec& p, double lambda,
                           std::span<const Vec3> pts) {
  validate(p);
  check_resolution(p, lambda);
  const Mat3 m = householder_to_normal(p.normal);
  std::vector<cplx> out(pts.size());
  const std::int64_t n = static_cast<std::int64_t>(pts.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = field_local(
        p, lambda, apply_transpose(m, pts[static_cast<std::size_t>(i)]));
  return out;
}

cplx helmholtz_stencil(const std::function<cplx(const Vec3&)>& u,
                       double lambda, const Vec3& x, double h_fd) {
  if (!(h_fd > 0.0)) throw std::invalid_argument("stencil: need h_fd > 0");
  cplx lap = -6.0 * u(x);
  for (int k = 0; k < 3; ++k) {
    Vec3 hi = x, lo = x;
    hi[static_cast<std::size_t>(k)] += h_fd;
    lo[static_cast<std::size_t>(k)] -= h_fd;
    lap += u(hi) + u(lo);
  }
  return lap / (h_fd * h_fd) + lambda * lambda * u(x);
}

double pde_residual(const PlaneSpec& p, double lambda, const Vec3& x,
                    double h_fd) {
  validate(p);
  check_resolution(p, lambda);
  if (std::abs(x[0] * p.normal[0] + x[1] * p.normal[1] +
               x[2] * p.normal[2]) < 0.5)
    throw std::invalid_argument(
        "pde_residual: probe must stay 0.5 away from the plane");
  if (lambda * h_fd > 0.05 * (1.0 + 1e-12))
    throw std::invalid_argument("pde_residual: need lambda * h_fd <= 0.05");
  const Mat3 m = householder_to_normal(p.normal);
  double mass = 0.0;
  field_local(p, lambda, apply_transpose(m, x), &mass);
  if (mass == 0.0)
    throw std::invalid_argument("pde_residual: probe sees an empty aperture");
  auto u = [&](const Vec3& q) {
    return field_local(p, lambda, apply_transpose(m, q));
  };
  return std::abs(helmholtz_stencil(u, lambda, x, h_fd)) /
         (lambda * lambda * mass);
}

HelmholtzResult l2_decay_experiment(const HelmholtzConfig& cfg) {
  validate(cfg.plane);
  if (cfg.lambdas.size() < 3)
    throw std::invalid_argument("helmholtz: need >= 3 lambdas for a fit");
  if (!(cfg.d_side > 0.0) || cfg.d_points < 2)
    throw std::invalid_argument("helmholtz: bad observation cube");
  if (cfg.residual_probes < 0 || !(cfg.h_fd_factor > 0.0))
    throw std::invalid_argument("helmholtz: bad residual probe settings");

  const Mat3 m = householder_to_normal(cfg.plane.normal);
  const double half = 0.5 * cfg.d_side;
  Grid dgrid = make_grid({{cfg.d_center_local[0] - half, cfg.d_center_local[0] + half},
                          {cfg.d_center_local[1] - half, cfg.d_center_local[1] + half},
                          {cfg.d_center_local[2] - half, cfg.d_center_local[2] + half}},
                         {cfg.d_points, cfg.d_points, cfg.d_points});

  HelmholtzResult res;
  // D reaches within 0.5 of the plane: decay law no longer applies
  res.plane_crossing = std::abs(cfg.d_center_local[2]) - half < 0.5;

  std::vector<Vec3> nodes(static_cast<std::size_t>(dgrid.size()));
  std::vector<double> loc(3);
  for (std::int64_t i = 0; i < dgrid.size(); ++i) {
    dgrid.node(i, loc);
    nodes[static_cast<std::size_t>(i)] =
        mat3_apply(m, Vec3{loc[0], loc[1], loc[2]});
  }

  std::vector<double> lams, norms;
  for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
    const double lambda = cfg.lambdas[li];
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<cplx> u = field_at(cfg.plane, lambda, nodes);
    double s = 0.0;
    for (const cplx& v : u) s += std::norm(v);
    HelmholtzPoint pt;
    pt.lambda = lambda;
    pt.l2_norm = std::sqrt(dgrid.weight() * s);

    if (cfg.residual_probes > 0 && !res.plane_crossing) {
      std::mt19937_64 rng(cfg.seed + li);
      std::uniform_real_distribution<double> unit(-half, half);
      const double h_fd = cfg.h_fd_factor / lambda;
      for (int t = 0; t < cfg.residual_probes; ++t) {
        const Vec3 probe = mat3_apply(
            m, Vec3{cfg.d_center_local[0] + unit(rng),
                    cfg.d_center_local[1] + unit(rng),
                    cfg.d_center_local[2] + unit(rng)});
        pt.max_residual = std::max(
            pt.max_residual, pde_residual(cfg.plane, lambda, probe, h_fd));
      }
    }
    pt.wall_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
    res.points.push_back(pt);
    lams.push_back(lambda);
    norms.push_back(pt.l2_norm);
  }
  res.fit = decay_fit(lams, norms);
  return res;
}

}  // namespace oscint
