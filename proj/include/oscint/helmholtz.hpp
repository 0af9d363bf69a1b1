#pragma once

#include <functional>

#include "oscint/geometry.hpp"
#include "oscint/grid.hpp"
#include "oscint/normlab.hpp"

namespace oscint {

// Single-layer acoustic potential over a tilted plane patch
//   u_lambda(x) = int_patch G_lambda(x, q(z')) phi0(z') dz',
//   q(z') = M (z'_1, z'_2, 0),  M = householder frame with M e3 = normal.
struct PlaneSpec {
  Vec3 normal{0.0, 0.0, 1.0};
  std::vector<std::array<double, 2>> box;  // patch box in plane coords, 2 axes
  std::vector<int> points;                 // quadrature nodes per axis
  TensorBump aperture;                     // density phi0 over plane coords
};

void validate(const PlaneSpec& p);

// Outgoing Helmholtz Green function e^(i lambda |x-y|) / (4 pi |x-y|).
// Throws std::domain_error at x = y.
cplx green(const Vec3& x, const Vec3& y, double lambda);

// Field at one point; evaluated in the plane frame (w = M^T x), so the value
// depends on the geometry only through distances.  Requires lambda >= 0 and
// lambda * max step <= pi/2 so the quadrature resolves the oscillation.
cplx field(const PlaneSpec& p, double lambda, const Vec3& x);

// Batch evaluation, OpenMP-parallel over the points; every point's quadrature
// sum runs serially in ascending node order (thread-count independent).
std::vector<cplx> field_at(const PlaneSpec& p, double lambda,
                           std::span<const Vec3> pts);

// (Delta_h + lambda^2) u at x with the 7-point second-order stencil of
// spacing h_fd.
cplx helmholtz_stencil(const std::function<cplx(const Vec3&)>& u,
                       double lambda, const Vec3& x, double h_fd);

// Normalized PDE defect of the discrete field: all seven stencil values share
// one quadrature rule, so the quadrature error cancels termwise and only the
// finite-difference truncation ~ (lambda h_fd)^2 survives.  Normalization is
// lambda^2 * int |G phi0| (an upper bound for lambda^2 |u|).  Requires
// |x . normal| >= 0.5 and lambda * h_fd <= 0.05.
double pde_residual(const PlaneSpec& p, double lambda, const Vec3& x,
                    double h_fd);

// ||u_lambda||_{L^2(D)} for a cube D given in plane-frame coordinates
// (center_local, side), quadrature on an n_D^3 midpoint grid mapped through
// M.  Residual probes are sampled uniformly inside D.  When D reaches within
// 0.5 of the plane the crossing flag is set and decay rates should not be
// read off the fit.
struct HelmholtzConfig {
  PlaneSpec plane;
  Vec3 d_center_local{0.0, 0.0, 0.9};
  double d_side = 0.4;
  int d_points = 12;
  std::vector<double> lambdas;
  int residual_probes = 0;
  double h_fd_factor = 0.02;  // h_fd = factor / lambda
  std::uint64_t seed = 1;
};

struct HelmholtzPoint {
  double lambda = 0.0;
  double l2_norm = 0.0;
  double max_residual = 0.0;
  double wall_ms = 0.0;
};

struct HelmholtzResult {
  std::vector<HelmholtzPoint> points;
  FitResult fit;  // log ||u|| vs log lambda
  bool plane_crossing = false;
};

HelmholtzResult l2_decay_experiment(const HelmholtzConfig& cfg);

}  // namespace oscint
