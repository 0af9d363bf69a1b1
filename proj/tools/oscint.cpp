#include <cstdint>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "oscint/runner.hpp"

int main(int argc, char** argv) {
  oscint::threads_from_env();

  CLI::App app{"oscint: operator norm laboratory for singular oscillatory "
               "integral operators"};
  std::string experiment;
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed_value = 0;

  app.add_option("experiment", experiment,
                 "norm | sweep | witness | maximal | helmholtz | selfcheck")
      ->required()
      ->check(CLI::IsMember(
          {"norm", "sweep", "witness", "maximal", "helmholtz", "selfcheck"}));
  app.add_option("--config", config_path, "JSON experiment config")
      ->required();
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_value, "override the config seed");
  app.add_option("--out", out_dir,
                 "directory for results.csv and summary.json (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0 through here; anything else is a usage/config error
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::optional<std::uint64_t> seed;
  if (seed_opt->count() > 0) seed = seed_value;
  return oscint::run_experiment_file(experiment, config_path, seed, out_dir);
}
