#pragma once

#include <array>
#include <span>
#include <variant>
#include <vector>

namespace oscint {

// Closed-form family of graph surfaces y -> (y, psi(y)), y in R^n.
// The family is closed under the oscillation rescaling
//   psi_eps(y) = eps^gamma * psi(y / eps)
// and under pointwise addition, so oscillated and additively perturbed
// surfaces are again members and keep closed-form sup bounds.

struct ZeroShape {};

// psi(y) = amplitude * prod_i sin(frequency[i] * y_i)
struct SineProductShape {
  double amplitude = 1.0;
  std::vector<double> frequency;
};

// psi(y) = amplitude * exp(-|y|^2 / (2 width^2))
struct GaussianBumpShape {
  double amplitude = 1.0;
  double width = 1.0;
};

struct SurfaceSpec;

struct SumShape {
  std::vector<SurfaceSpec> terms;
};

struct SurfaceSpec {
  int dim_base = 1;  // n; the graph lives in R^{n+1}
  std::variant<ZeroShape, SineProductShape, GaussianBumpShape, SumShape> shape{};

  // Closed-form upper bounds, exact for the primitive shapes.
  double sup_height() const;    // sup |psi|
  double sup_gradient() const;  // sup |grad psi|
  double sup_hessian() const;   // bound on the Hessian operator norm
};

struct OscillationParams {
  double epsilon = 1.0;  // in (0, 1]
  double gamma = 2.0;    // > 3/2
};

SurfaceSpec make_zero_surface(int dim_base);
SurfaceSpec make_sine_product(int dim_base, double amplitude,
                              std::vector<double> frequency);
SurfaceSpec make_gaussian_bump(int dim_base, double amplitude, double width);
SurfaceSpec surface_sum(SurfaceSpec a, SurfaceSpec b);

// Throws std::invalid_argument on malformed specs (dim mismatch,
// nonpositive frequency/width, out-of-range oscillation parameters).
void validate(const SurfaceSpec& s);
void validate(const OscillationParams& p);

double surface_height(const SurfaceSpec& s, std::span<const double> y);
std::vector<double> surface_gradient(const SurfaceSpec& s,
                                     std::span<const double> y);

// sqrt(1 + |grad psi(y)|^2), the area element of the graph.
double measure_weight(const SurfaceSpec& s, std::span<const double> y);

// Returns the spec of psi_eps(y) = eps^gamma psi(y/eps).  Sup fields scale as
// sup|psi_eps| = eps^gamma sup|psi|, sup|grad psi_eps| = eps^(gamma-1) sup|grad psi|.
SurfaceSpec oscillate(const SurfaceSpec& s, const OscillationParams& p);

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;  // row-major

Vec3 mat3_apply(const Mat3& m, const Vec3& v);

// Orthogonal reflection M with M e3 = nu for a unit vector nu.  Identity when
// nu == e3, otherwise the Householder matrix I - 2 w w^T / (w.w), w = e3 - nu.
// Throws std::invalid_argument unless ||nu| - 1| <= 1e-12.
Mat3 householder_to_normal(const Vec3& nu);

}  // namespace oscint
