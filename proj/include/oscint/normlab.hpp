#pragma once

#include <string>

#include "oscint/operators.hpp"

namespace oscint {

struct NormEstimate {
  double lambda = 0.0;
  double value = 0.0;
  std::string method;
  int iterations = 0;
  double residual = 0.0;  // last relative change (PowerIteration)
  bool converged = true;
  double wall_ms = 0.0;
};

struct PowerOptions {
  double tol = 1e-4;
  int max_iter = 200;
  std::uint64_t seed = 1;
};

// Operator norm via power iteration on f -> T*(T f) with the quadrature-
// weighted norms; the reported value is ||T v_k|| for the current unit
// iterate, stopping when its relative change drops below tol.  When
// top_vector is given it receives the final unit iterate.
NormEstimate opnorm_power(const DiscretizedOperator& op, PowerOptions o = {},
                          std::vector<cplx>* top_vector = nullptr);

struct LowerBoundOptions {
  int num_random = 8;
  std::uint64_t seed = 1;
};

// max ||T f|| / ||f|| over seeded Gaussian inputs plus caller candidates.
NormEstimate opnorm_lower_random(
    const DiscretizedOperator& op,
    std::span<const std::vector<cplx>> candidates, LowerBoundOptions o = {});

// Decay laws ||T_lambda|| ~ lambda^exponent for the supported operator
// families.  The dimension parameter n follows the natural convention of
// each law: source dim for the surface regimes (hypersurface base dimension),
// target ambient dim (= source dim + 1) for the flat/fractional regimes.
// log_boundary marks parameter choices sitting exactly on a boundary where
// the sharp bound carries an extra log(lambda) factor.
enum class DecayRegime {
  SurfaceLinear,         // -(m/2) n/(n+1),            0 < m < n
  MaximalOscillating,    // -(m/2) n/(n+2),            0 < m < n, gamma > 3/2
  FractionalPhase,       // gamma > 1, alpha = (n-1)/2:
                         //   -(m+1/2)/gamma   if m < gamma alpha - 1/2
                         //   -alpha (log)     if m = gamma alpha - 1/2
                         //   -alpha           if m > gamma alpha - 1/2
  Gamma1Cutoff,          // gamma = 1 with angular cutoff, by m vs n/2 - 1:
                         //   -(m+1/2) / -alpha (log) / -alpha
  FlatLinearFull,        // fractional law at gamma = 2: -(m/2 + 1/4) below
                         //   the boundary m = n - 3/2, -alpha at/above
  FlatLinearRestricted   // -m/2
};

struct RegimeParams {
  int n = 2;
  double m = 1.0;
  double gamma = 2.0;  // phase exponent, or oscillation gamma for Maximal*
};

struct ExponentPrediction {
  double exponent = 0.0;
  bool log_boundary = false;
};

// Throws std::invalid_argument when the parameters violate the regime's
// hypotheses.
ExponentPrediction predicted_exponent(DecayRegime r, const RegimeParams& p);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;  // fit of log v = slope * log lambda + intercept
  double r2 = 0.0;
  int n_points = 0;
};

// Least squares in log-log coordinates; needs >= 3 distinct positive lambdas
// and positive values.
FitResult decay_fit(std::span<const double> lambdas,
                    std::span<const double> values);

// Localized lower-bound witnesses: an input supported on a ball of radius
// r = c0 lambda^-beta around y0' = x0' + separation_factor * r * e1, paired
// with an automatically built operator whose grids track the two balls
// (24 nodes per axis over +-1.5 r, so 8 source cells per radius).
struct WitnessSpec {
  std::vector<double> x0_prime;
  double c0 = 0.05;
  double beta = 0.5;
  double separation_factor = 100.0;
  double lambda = 16.0;
};

struct WitnessPack {
  DiscretizedOperator op;
  std::vector<cplx> f;
  double radius = 0.0;
  std::vector<double> x0_prime;
  std::vector<double> y0_prime;
};

// Linear phase, f = exp(-i lambda x0'.y) on the source ball.
WitnessPack witness_linear(const KernelSpec& k, const WitnessSpec& w,
                           bool full_target);

// Fractional phase |x-(y,0)|^gamma, f = indicator of the source ball;
// requires beta == 1/gamma (the scale the phase can hold coherent).
WitnessPack witness_nonlinear(const KernelSpec& k, double gamma,
                              const WitnessSpec& w, bool full_target);

// ||T f|| / ||f||, optionally with the numerator restricted to the image
// ball |x' - x0'| <= radius.
double witness_ratio(const WitnessPack& pack, bool restrict_to_image_ball);

}  // namespace oscint
