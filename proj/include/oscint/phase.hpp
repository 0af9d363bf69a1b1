#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace oscint {

// Oscillation phases Phi(x, y).  Linear is x.y over the common leading
// coordinates; FractionalDistance is |x - (y, 0)|^gamma with y zero-padded to
// the dimension of x and gamma >= 1.
enum class PhaseKind { Linear, FractionalDistance };

struct PhaseSpec {
  PhaseKind kind = PhaseKind::Linear;
  double gamma = 2.0;  // used by FractionalDistance only
};

void validate(const PhaseSpec& p);

// Throws std::domain_error for FractionalDistance with gamma < 2 at
// coincident points (the value would be finite but the gradient is singular).
double phase_eval(const PhaseSpec& p, std::span<const double> x,
                  std::span<const double> y);

// Data of the (n-1)x(n-1) mixed Hessian of Phi = d^gamma in the off-plane
// geometry d = (|xi' - x'|^2 + xi_n^2)^(1/2):
//   d_{x_i} d_{xi_j} Phi = prefactor * (delta_ij + (gamma-2) a_i a_j),
//   prefactor = -gamma d^(gamma-2),  a_i = (x_i - xi_i)/d.
// det of the normalized matrix is 1 + (gamma-2)|a|^2, cross-checked against
// ((gamma-1)|xi'-x'|^2 + xi_n^2)/d^2 to 1e-12 at construction.
struct HessianReport {
  double gamma = 0.0;
  double d = 0.0;
  std::vector<double> a;
  double det = 0.0;        // det(I + (gamma-2) a a^T)
  double prefactor = 0.0;  // -gamma d^(gamma-2)
};

HessianReport mixed_hessian_det(double gamma, std::span<const double> x_prime,
                                std::span<const double> xi);

// Two independent routes to det(I_k + (gamma-2) a a^T): a dense partial-pivot
// LU determinant and the rank-one identity 1 + (gamma-2)|a|^2
// (det(I + AB) = det(I + BA) with A = (gamma-2) a, B = a^T).  k <= 8.
struct SylvesterResult {
  double direct = 0.0;
  double rank_one = 0.0;
};

SylvesterResult sylvester_check(std::span<const double> a, double gamma);

// Randomized scan of the normalized determinant over admissible geometries
// with 1/2 <= d <= 2 (and |xi_n| >= c1 when gamma == 1), plus the analytic
// lower bound min(gamma-1, 1) for gamma > 1 resp. c1^2/4 for gamma == 1.
struct NondegeneracyReport {
  double min_det = 0.0;
  double analytic_bound = 0.0;
  int samples = 0;
};

NondegeneracyReport nondegeneracy_scan(double gamma, double c1, int samples,
                                       std::uint64_t seed);

}  // namespace oscint
