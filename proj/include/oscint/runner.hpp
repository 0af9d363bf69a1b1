#pragma once

// Experiment drivers behind the CLI.  Each driver takes a plain config
// struct (fed either from JSON via config.hpp or directly from tests),
// runs deterministically for a given seed, and returns value rows that
// run_experiment_file turns into results.csv + summary.json.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oscint/helmholtz.hpp"
#include "oscint/normlab.hpp"

namespace oscint {

// Reads OSCINT_THREADS and caps the OpenMP worker count; no-op if unset.
void threads_from_env();

// Deterministic per-task seed derivation (splitmix-style multiply).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t task);

// Operator family with everything fixed except lambda.  Source nodes are
// cell midpoints; target nodes are staggered so no pair of nodes collides.
struct OperatorConfig {
  std::vector<std::array<double, 2>> source_box;
  std::vector<int> source_points;
  std::vector<std::array<double, 2>> target_box;
  std::vector<int> target_points;
  KernelSpec kernel;  // ambient_dim is derived from the source dimension
  PhaseSpec phase;
  // plateau of the localization window over (target coords, source coords);
  // defaults to the full grid boxes (window identically 1 on all nodes)
  std::optional<std::vector<std::array<double, 2>>> window;
  double window_margin = 0.1;
  std::optional<SurfaceSpec> surface;
  double height = 0.0;
};

DiscretizedOperator instantiate(const OperatorConfig& c, double lambda);

struct NormRunConfig {
  OperatorConfig op;
  double lambda = 16.0;
  PowerOptions power;
  int random_lower = 8;
  std::uint64_t seed = 1;
};

struct NormRunOutcome {
  NormEstimate power;
  NormEstimate lower;
};

NormRunOutcome run_norm(const NormRunConfig& c);

struct SweepConfig {
  OperatorConfig op;
  std::vector<double> lambdas;  // at least three
  DecayRegime regime = DecayRegime::FlatLinearRestricted;
  RegimeParams regime_params;
  PowerOptions power;
  double slope_tol = 0.1;
  std::uint64_t seed = 1;
};

struct SweepOutcome {
  std::vector<NormEstimate> estimates;
  FitResult fit;
  ExponentPrediction predicted;
  bool all_converged = true;
  bool pass = false;  // |slope - predicted| <= slope_tol
};

SweepOutcome run_norm_sweep(const SweepConfig& c);

struct WitnessRunConfig {
  KernelSpec kernel;  // ambient_dim = dim(x0) + 1
  bool fractional = false;
  double gamma = 2.0;
  std::vector<double> x0;
  std::vector<double> c0_list;
  double beta = 0.5;
  double separation_factor = 100.0;
  std::vector<double> lambdas;
  bool full_target = false;
  bool restrict_to_ball = true;
  double compensate_exponent = 0.0;  // compensated = ratio / lambda^exponent
  double stability_max = 2.0;  // pass: per-c0 compensated max/min <= this
};

struct WitnessRow {
  double lambda = 0.0;
  double c0 = 0.0;
  double ratio = 0.0;
  double compensated = 0.0;
  double wall_ms = 0.0;
};

struct WitnessOutcome {
  std::vector<WitnessRow> rows;
  std::vector<std::string> skipped;  // combos rejected by validation
  double stability = 1.0;  // worst per-c0 max/min of compensated ratios
  bool pass = false;
};

WitnessOutcome run_witness_sweep(const WitnessRunConfig& c);

struct MaximalConfig {
  OperatorConfig op;  // surface operator; op.surface is the base profile
  double gamma_osc = 2.0;
  int levels = 24;  // epsilon_i = 2^{-i/4}, i = 0..levels
  std::vector<double> lambdas;
  int num_random = 8;
  bool include_top_vectors = true;  // power-iterate two pilot operators
  double compensate_exponent = 0.0;
  double ratio_max = 3.0;  // pass: compensated max/min <= this ...
  double trend_max = 0.1;  // ... and compensated log-log slope <= this
  std::uint64_t seed = 1;
};

struct MaximalRow {
  double lambda = 0.0;
  double value = 0.0;  // best ||sup_eps |T_eps f|||_2 / ||f||_2 over candidates
  double compensated = 0.0;
  int candidates = 0;
  double wall_ms = 0.0;
};

struct MaximalOutcome {
  std::vector<MaximalRow> rows;
  FitResult trend;  // log compensated vs log lambda (3+ lambdas only)
  double max_over_min = 1.0;
  bool pass = false;
};

MaximalOutcome run_maximal(const MaximalConfig& c);

// Near-diagonal piece rate check: windows shrink like lambda^{-beta}, the
// input vector is a fixed seeded sample on the reference grid, and the
// reported ratio is ||A_beta f|| / ||f|| per lambda.
struct APartConfig {
  int dim = 2;
  double m = 1.0;  // kernel exponent p = dim - m
  double beta = 0.5;
  double half_width_factor = 8.0;  // window half-width = factor * lambda^-beta
  int points = 128;                // nodes per axis
  std::vector<double> lambdas;
  std::uint64_t seed = 1;
};

struct APartOutcome {
  std::vector<double> lambdas;
  std::vector<double> ratios;
  FitResult fit;
};

APartOutcome run_apart_rate(const APartConfig& c);

struct SelfCheckResult {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double wall_ms = 0.0;
};

// Invariant suite: rank-one determinant identity, dyadic reconstruction,
// partition of unity, adjoint pairing, near/far split reconstruction.
std::vector<SelfCheckResult> run_selfcheck(std::uint64_t seed);

// Full CLI path: parse JSON config, run, write <out>/results.csv and
// <out>/summary.json.  Returns 0 on success, 2 on config/validation
// errors, 3 when an iterative solve failed to converge.
int run_experiment_file(const std::string& experiment,
                        const std::string& config_path,
                        std::optional<std::uint64_t> seed_override,
                        const std::string& out_dir);

}  // namespace oscint
