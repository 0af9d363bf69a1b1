#include "oscint/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace oscint {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) fail("unknown key '" + it.key() + "' in " + where);
  }
}

const json& member(const json& j, const std::string& where, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(where + " is missing required key '" + key + "'");
  return *it;
}

double num(const json& j, const std::string& where, const char* key) {
  const json& v = member(j, where, key);
  if (!v.is_number()) fail(where + "." + key + " must be a number");
  return v.get<double>();
}

double num_or(const json& j, const std::string& where, const char* key,
              double fallback) {
  return j.contains(key) ? num(j, where, key) : fallback;
}

bool flag_or(const json& j, const std::string& where, const char* key,
             bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) fail(where + "." + key + " must be a boolean");
  return j[key].get<bool>();
}

std::string text(const json& j, const std::string& where, const char* key) {
  const json& v = member(j, where, key);
  if (!v.is_string()) fail(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> num_list(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where + " must be a nonempty array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) fail(where + " entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::array<double, 2>> parse_box(const json& v,
                                             const std::string& where) {
  if (!v.is_array() || v.empty())
    fail(where + " must be a nonempty array of [lo, hi] pairs");
  std::vector<std::array<double, 2>> out;
  for (const json& e : v) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
        !e[1].is_number())
      fail(where + " entries must be [lo, hi] number pairs");
    out.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return out;
}

std::vector<int> parse_points(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where + " must be a nonempty array");
  std::vector<int> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) fail(where + " entries must be integers");
    out.push_back(e.get<int>());
  }
  return out;
}

KernelSpec parse_kernel(const json& j, const std::string& where) {
  check_keys(j, where, {"p", "m", "amplitude", "angular_c1"});
  KernelSpec k;
  k.p = num(j, where, "p");
  k.m = num_or(j, where, "m", 0.0);
  k.amplitude = num_or(j, where, "amplitude", 1.0);
  if (j.contains("angular_c1"))
    k.angular_cutoff = AngularCutoff{num(j, where, "angular_c1")};
  return k;
}

PhaseSpec parse_phase(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "gamma"});
  PhaseSpec ph;
  const std::string kind = text(j, where, "kind");
  if (kind == "linear") {
    ph.kind = PhaseKind::Linear;
    if (j.contains("gamma")) fail(where + ": linear phase takes no gamma");
  } else if (kind == "fractional") {
    ph.kind = PhaseKind::FractionalDistance;
    ph.gamma = num(j, where, "gamma");
  } else {
    fail(where + ".kind must be 'linear' or 'fractional'");
  }
  return ph;
}

SurfaceSpec parse_surface(const json& j, int dim_base,
                          const std::string& where) {
  check_keys(j, where, {"shape", "amplitude", "frequency", "width"});
  const std::string shape = text(j, where, "shape");
  if (shape == "zero") return make_zero_surface(dim_base);
  if (shape == "sine_product")
    return make_sine_product(
        dim_base, num(j, where, "amplitude"),
        num_list(member(j, where, "frequency"), where + ".frequency"));
  if (shape == "gaussian_bump")
    return make_gaussian_bump(dim_base, num(j, where, "amplitude"),
                              num(j, where, "width"));
  fail(where + ".shape must be 'zero', 'sine_product' or 'gaussian_bump'");
}

OperatorConfig parse_operator(const json& j) {
  const std::string where = "operator";
  check_keys(j, where,
             {"source", "target", "kernel", "phase", "window", "window_margin",
              "surface", "height"});
  OperatorConfig c;
  const json& src = member(j, where, "source");
  check_keys(src, where + ".source", {"box", "points"});
  c.source_box = parse_box(member(src, where, "box"), where + ".source.box");
  c.source_points =
      parse_points(member(src, where, "points"), where + ".source.points");
  const json& tgt = member(j, where, "target");
  check_keys(tgt, where + ".target", {"box", "points"});
  c.target_box = parse_box(member(tgt, where, "box"), where + ".target.box");
  c.target_points =
      parse_points(member(tgt, where, "points"), where + ".target.points");
  c.kernel = parse_kernel(member(j, where, "kernel"), where + ".kernel");
  c.phase = parse_phase(member(j, where, "phase"), where + ".phase");
  if (j.contains("window"))
    c.window = parse_box(j["window"], where + ".window");
  c.window_margin = num_or(j, where, "window_margin", 0.1);
  if (j.contains("surface"))
    c.surface = parse_surface(j["surface"],
                              static_cast<int>(c.source_box.size()),
                              where + ".surface");
  c.height = num_or(j, where, "height", 0.0);
  return c;
}

PowerOptions parse_power(const json& j, std::uint64_t seed) {
  PowerOptions o;
  o.seed = seed;
  if (!j.contains("power")) return o;
  const json& p = j["power"];
  check_keys(p, "power", {"tol", "max_iter"});
  o.tol = num_or(p, "power", "tol", o.tol);
  if (p.contains("max_iter")) {
    if (!p["max_iter"].is_number_integer())
      fail("power.max_iter must be an integer");
    o.max_iter = p["max_iter"].get<int>();
  }
  return o;
}

std::uint64_t parse_seed(const json& j,
                         std::optional<std::uint64_t> seed_override) {
  if (seed_override) return *seed_override;
  if (!j.contains("seed")) return 1;
  if (!j["seed"].is_number_integer() || j["seed"].get<std::int64_t>() < 0)
    fail("seed must be a nonnegative integer");
  return j["seed"].get<std::uint64_t>();
}

DecayRegime parse_regime(const std::string& name) {
  if (name == "surface_linear") return DecayRegime::SurfaceLinear;
  if (name == "maximal_oscillating") return DecayRegime::MaximalOscillating;
  if (name == "fractional_phase") return DecayRegime::FractionalPhase;
  if (name == "gamma1_cutoff") return DecayRegime::Gamma1Cutoff;
  if (name == "flat_linear_full") return DecayRegime::FlatLinearFull;
  if (name == "flat_linear_restricted")
    return DecayRegime::FlatLinearRestricted;
  fail("unknown regime '" + name + "'");
}

std::vector<double> parse_lambdas(const json& j, std::size_t min_count) {
  const std::vector<double> lam =
      num_list(member(j, "config", "lambdas"), "lambdas");
  if (lam.size() < min_count) {
    std::ostringstream os;
    os << "lambdas needs at least " << min_count << " entries, got "
       << lam.size();
    fail(os.str());
  }
  for (double l : lam)
    if (!(l > 0.0)) fail("lambdas entries must be positive");
  return lam;
}

RunSpec parse_norm(const json& j, std::uint64_t seed) {
  check_keys(j, "config",
             {"experiment", "seed", "operator", "lambda", "power",
              "random_lower"});
  NormRunConfig c;
  c.op = parse_operator(member(j, "config", "operator"));
  c.lambda = num(j, "config", "lambda");
  c.power = parse_power(j, seed);
  if (j.contains("random_lower")) {
    if (!j["random_lower"].is_number_integer())
      fail("random_lower must be an integer");
    c.random_lower = j["random_lower"].get<int>();
  }
  c.seed = seed;
  return c;
}

RunSpec parse_sweep(const json& j, std::uint64_t seed) {
  check_keys(j, "config",
             {"experiment", "seed", "operator", "lambdas", "regime",
              "regime_params", "power", "slope_tol"});
  SweepConfig c;
  c.op = parse_operator(member(j, "config", "operator"));
  c.lambdas = parse_lambdas(j, 3);
  c.regime = parse_regime(text(j, "config", "regime"));
  const json& rp = member(j, "config", "regime_params");
  check_keys(rp, "regime_params", {"n", "m", "gamma"});
  if (!member(rp, "regime_params", "n").is_number_integer())
    fail("regime_params.n must be an integer");
  c.regime_params.n = rp["n"].get<int>();
  c.regime_params.m = num(rp, "regime_params", "m");
  c.regime_params.gamma = num_or(rp, "regime_params", "gamma", 2.0);
  c.power = parse_power(j, seed);
  c.slope_tol = num_or(j, "config", "slope_tol", 0.1);
  if (!(c.slope_tol > 0.0)) fail("slope_tol must be positive");
  c.seed = seed;
  return c;
}

RunSpec parse_witness(const json& j) {
  check_keys(j, "config",
             {"experiment", "seed", "kernel", "phase", "x0", "c0_list", "beta",
              "separation_factor", "lambdas", "full_target",
              "restrict_to_ball", "compensate_exponent", "stability_max"});
  WitnessRunConfig c;
  c.x0 = num_list(member(j, "config", "x0"), "x0");
  c.kernel = parse_kernel(member(j, "config", "kernel"), "kernel");
  c.kernel.ambient_dim = static_cast<int>(c.x0.size()) + 1;
  const PhaseSpec ph = parse_phase(member(j, "config", "phase"), "phase");
  c.fractional = ph.kind == PhaseKind::FractionalDistance;
  c.gamma = ph.gamma;
  c.c0_list = num_list(member(j, "config", "c0_list"), "c0_list");
  c.beta = num(j, "config", "beta");
  c.separation_factor = num_or(j, "config", "separation_factor", 100.0);
  c.lambdas = parse_lambdas(j, 1);
  c.full_target = flag_or(j, "config", "full_target", false);
  c.restrict_to_ball = flag_or(j, "config", "restrict_to_ball", true);
  c.compensate_exponent = num_or(j, "config", "compensate_exponent", 0.0);
  c.stability_max = num_or(j, "config", "stability_max", 2.0);
  return c;
}

RunSpec parse_maximal(const json& j, std::uint64_t seed) {
  check_keys(j, "config",
             {"experiment", "seed", "operator", "gamma_osc", "levels",
              "lambdas", "num_random", "include_top_vectors",
              "compensate_exponent", "ratio_max", "trend_max"});
  MaximalConfig c;
  c.op = parse_operator(member(j, "config", "operator"));
  if (!c.op.surface) fail("maximal requires operator.surface");
  c.gamma_osc = num_or(j, "config", "gamma_osc", 2.0);
  if (j.contains("levels")) {
    if (!j["levels"].is_number_integer()) fail("levels must be an integer");
    c.levels = j["levels"].get<int>();
  }
  if (c.levels < 1) fail("levels must be >= 1");
  c.lambdas = parse_lambdas(j, 1);
  if (j.contains("num_random")) {
    if (!j["num_random"].is_number_integer())
      fail("num_random must be an integer");
    c.num_random = j["num_random"].get<int>();
  }
  c.include_top_vectors = flag_or(j, "config", "include_top_vectors", true);
  c.compensate_exponent = num_or(j, "config", "compensate_exponent", 0.0);
  c.ratio_max = num_or(j, "config", "ratio_max", 3.0);
  c.trend_max = num_or(j, "config", "trend_max", 0.1);
  c.seed = seed;
  return c;
}

RunSpec parse_helmholtz(const json& j, std::uint64_t seed) {
  check_keys(j, "config",
             {"experiment", "seed", "normal", "plane_box", "plane_points",
              "aperture", "aperture_margin", "d_center_local", "d_side",
              "d_points", "lambdas", "residual_probes", "h_fd_factor",
              "slope_max", "residual_tol"});
  HelmholtzRunConfig r;
  HelmholtzConfig& c = r.cfg;
  if (j.contains("normal")) {
    const std::vector<double> nv = num_list(j["normal"], "normal");
    if (nv.size() != 3) fail("normal must have 3 entries");
    c.plane.normal = {nv[0], nv[1], nv[2]};
  }
  c.plane.box = parse_box(member(j, "config", "plane_box"), "plane_box");
  c.plane.points =
      parse_points(member(j, "config", "plane_points"), "plane_points");
  c.plane.aperture.box =
      parse_box(member(j, "config", "aperture"), "aperture");
  c.plane.aperture.margin = num_or(j, "config", "aperture_margin", 0.1);
  if (j.contains("d_center_local")) {
    const std::vector<double> dc =
        num_list(j["d_center_local"], "d_center_local");
    if (dc.size() != 3) fail("d_center_local must have 3 entries");
    c.d_center_local = {dc[0], dc[1], dc[2]};
  }
  c.d_side = num_or(j, "config", "d_side", c.d_side);
  if (j.contains("d_points")) {
    if (!j["d_points"].is_number_integer())
      fail("d_points must be an integer");
    c.d_points = j["d_points"].get<int>();
  }
  c.lambdas = parse_lambdas(j, 3);
  if (j.contains("residual_probes")) {
    if (!j["residual_probes"].is_number_integer())
      fail("residual_probes must be an integer");
    c.residual_probes = j["residual_probes"].get<int>();
  }
  c.h_fd_factor = num_or(j, "config", "h_fd_factor", c.h_fd_factor);
  c.seed = seed;
  r.slope_max = num_or(j, "config", "slope_max", -0.9);
  r.residual_tol = num_or(j, "config", "residual_tol", 1e-2);
  return r;
}

RunSpec parse_selfcheck(const json& j, std::uint64_t seed) {
  check_keys(j, "config", {"experiment", "seed"});
  return SelfCheckRunConfig{seed};
}

}  // namespace

RunSpec parse_config_text(const std::string& experiment,
                          const std::string& body,
                          std::optional<std::uint64_t> seed_override) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be a JSON object");
  if (j.contains("experiment")) {
    const std::string declared = text(j, "config", "experiment");
    if (declared != experiment)
      fail("config declares experiment '" + declared + "' but '" +
           experiment + "' was requested");
  }
  const std::uint64_t seed = parse_seed(j, seed_override);
  try {
    if (experiment == "norm") return parse_norm(j, seed);
    if (experiment == "sweep") return parse_sweep(j, seed);
    if (experiment == "witness") return parse_witness(j);
    if (experiment == "maximal") return parse_maximal(j, seed);
    if (experiment == "helmholtz") return parse_helmholtz(j, seed);
    if (experiment == "selfcheck") return parse_selfcheck(j, seed);
  } catch (const json::exception& e) {
    fail(std::string("malformed value: ") + e.what());
  }
  fail("unknown experiment '" + experiment + "'");
}

RunSpec parse_config_file(const std::string& experiment,
                          const std::string& path,
                          std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  std::ostringstream body;
  body << in.rdbuf();
  return parse_config_text(experiment, body.str(), seed_override);
}

}  // namespace oscint
