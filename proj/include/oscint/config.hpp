#pragma once

// JSON config parsing for the CLI.  Strict by design: unknown keys, wrong
// types, and out-of-range values all throw std::invalid_argument, which the
// CLI reports and maps to exit code 2.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "oscint/runner.hpp"

namespace oscint {

struct HelmholtzRunConfig {
  HelmholtzConfig cfg;
  double slope_max = -0.9;    // pass needs fit.slope <= slope_max
  double residual_tol = 1e-2; // and every probed residual <= residual_tol
};

struct SelfCheckRunConfig {
  std::uint64_t seed = 1;
};

using RunSpec = std::variant<NormRunConfig, SweepConfig, WitnessRunConfig,
                             MaximalConfig, HelmholtzRunConfig,
                             SelfCheckRunConfig>;

// experiment is the CLI verb; if the JSON carries an "experiment" field the
// two must agree.  seed_override (from --seed) replaces the config seed.
RunSpec parse_config_text(const std::string& experiment,
                          const std::string& text,
                          std::optional<std::uint64_t> seed_override);
RunSpec parse_config_file(const std::string& experiment,
                          const std::string& path,
                          std::optional<std::uint64_t> seed_override);

}  // namespace oscint
