#include "oscint/normlab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

namespace oscint {

namespace {

double weighted_norm(const Grid& g, std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(g.weight() * s);
}

// materialize the matrix when it fits; repeated applies then cost O(nt ns)
// flops instead of kernel/phase evaluations

std::vector<cplx> random_unit(const Grid& g, std::int64_t n,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = cplx(gauss(rng), gauss(rng));
  const double nv = weighted_norm(g, v);
  if (nv > 0.0)
    for (auto& x : v) x /= nv;
  return v;
}

}  // namespace

NormEstimate opnorm_power(const DiscretizedOperator& op, PowerOptions o,
                          std::vector<cplx>* top_vector) {
  if (!(o.tol > 0.0) || o.max_iter < 1)
    throw std::invalid_argument("opnorm_power: bad tolerance or iteration cap");
  const auto t0 = std::chrono::steady_clock::now();
  NormEstimate e;
  e.lambda = op.lambda;
  e.method = "PowerIteration";
  std::optional<DenseOperator> dense;
  if (op.target.size() * op.source.size() <= kDenseEntryLimit)
    dense.emplace(op);
  auto fwd = [&](std::span<const cplx> x) {
    return dense ? dense->forward(x) : apply_forward(op, x);
  };
  auto adj = [&](std::span<const cplx> x) {
    return dense ? dense->adjoint(x) : apply_adjoint(op, x);
  };
  std::vector<cplx> v = random_unit(op.source, op.source.size(), o.seed);
  auto finish = [&](bool ok) -> NormEstimate& {
    e.converged = ok;
    if (top_vector) *top_vector = v;
    e.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    return e;
  };

  double prev = -1.0;
  for (int it = 1; it <= o.max_iter; ++it) {
    const std::vector<cplx> w = fwd(v);
    const double est = weighted_norm(op.target, w);
    e.iterations = it;
    e.value = est;
    if (est == 0.0) {  // zero operator (or v in its kernel): norm bound 0
      e.residual = 0.0;
      return finish(true);
    }
    e.residual = prev < 0.0 ? 1.0 : std::abs(est - prev) / est;
    if (prev >= 0.0 && e.residual < o.tol) return finish(true);
    prev = est;
    std::vector<cplx> u = adj(w);
    const double nu = weighted_norm(op.source, u);
    if (nu == 0.0) return finish(true);
    for (auto& x : u) x /= nu;
    v = std::move(u);
  }
  return finish(false);
}

NormEstimate opnorm_lower_random(
    const DiscretizedOperator& op,
    std::span<const std::vector<cplx>> candidates, LowerBoundOptions o) {
  if (o.num_random < 0)
    throw std::invalid_argument("opnorm_lower_random: bad trial count");
  const auto t0 = std::chrono::steady_clock::now();
  NormEstimate e;
  e.lambda = op.lambda;
  e.method = "RandomLowerBound";
  e.converged = true;
  const std::int64_t ns = op.source.size();
  std::optional<DenseOperator> dense;
  if (op.target.size() * ns <= kDenseEntryLimit) dense.emplace(op);
  auto try_one = [&](std::span<const cplx> f) {
    const double nf = weighted_norm(op.source, f);
    if (nf == 0.0) return;
    const std::vector<cplx> w = dense ? dense->forward(f) : apply_forward(op, f);
    const double r = weighted_norm(op.target, w) / nf;
    e.value = std::max(e.value, r);
    ++e.iterations;
  };
  for (int t = 0; t < o.num_random; ++t)
    try_one(random_unit(op.source, ns, o.seed + static_cast<std::uint64_t>(t)));
  for (const auto& c : candidates) {
    if (static_cast<std::int64_t>(c.size()) != ns)
      throw std::invalid_argument(
          "opnorm_lower_random: candidate size does not match source grid");
    try_one(c);
  }
  e.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  return e;
}

ExponentPrediction predicted_exponent(DecayRegime r, const RegimeParams& p) {
  if (p.n < 2) throw std::invalid_argument("predicted_exponent: need n >= 2");
  const double n = p.n, m = p.m, alpha = 0.5 * (n - 1.0);
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  switch (r) {
    case DecayRegime::SurfaceLinear:
      require(m > 0.0 && m < n, "predicted_exponent: need 0 < m < n");
      return {-0.5 * m * n / (n + 1.0), false};
    case DecayRegime::MaximalOscillating:
      require(m > 0.0 && m < n, "predicted_exponent: need 0 < m < n");
      require(p.gamma > 1.5,
              "predicted_exponent: oscillation gamma must exceed 3/2");
      return {-0.5 * m * n / (n + 2.0), false};
    case DecayRegime::FractionalPhase: {
      require(p.gamma > 1.0, "predicted_exponent: need gamma > 1");
      require(m >= 0.0 && m < n - 1.0,
              "predicted_exponent: need 0 <= m < n - 1");
      const double cut = p.gamma * alpha - 0.5;
      if (m < cut) return {-(m + 0.5) / p.gamma, false};
      return {-alpha, m == cut};
    }
    case DecayRegime::Gamma1Cutoff: {
      require(m >= 0.0 && m < n - 1.0,
              "predicted_exponent: need 0 <= m < n - 1");
      const double cut = 0.5 * n - 1.0;
      if (m < cut) return {-(m + 0.5), false};
      return {-alpha, m == cut};
    }
    case DecayRegime::FlatLinearFull: {
      require(m > 0.0 && m < n - 1.0,
              "predicted_exponent: need 0 < m < n - 1");
      const double cut = n - 1.5;
      if (m < cut) return {-(0.5 * m + 0.25), false};
      return {-alpha, m == cut};
    }
    case DecayRegime::FlatLinearRestricted:
      require(m >= 0.0 && m < n - 1.0,
              "predicted_exponent: need 0 <= m < n - 1");
      return {-0.5 * m, false};
  }
  throw std::invalid_argument("predicted_exponent: unknown regime");
}

FitResult decay_fit(std::span<const double> lambdas,
                    std::span<const double> values) {
  if (lambdas.size() != values.size() || lambdas.size() < 3)
    throw std::invalid_argument("decay_fit: need >= 3 (lambda, value) pairs");
  const std::size_t n = lambdas.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lambdas[i] > 0.0) || !(values[i] > 0.0))
      throw std::invalid_argument("decay_fit: lambdas and values must be > 0");
    lx[i] = std::log(lambdas[i]);
    ly[i] = std::log(values[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("decay_fit: lambdas must not all coincide");
  FitResult f;
  f.n_points = static_cast<int>(n);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

namespace {

constexpr int kWitnessAxisNodes = 24;  // 8 source cells per ball radius

// The grids are laid out in exact multiples of the ball radius, so nodes can
// land exactly on the membership boundary d = r; a bare d2 <= r2 then flips
// with the rounding of r = c0 lambda^-beta and breaks the scale equivariance
// of the compensated ratios.  Nearest off-boundary shell is at d2/r2 = 1 +/-
// 1/64, so a fixed 1e-6 slack keeps ties inward at every lambda.
constexpr double kBallSlack = 1.0 + 1e-6;

WitnessPack build_witness(const KernelSpec& k, const PhaseSpec& phase,
                          const WitnessSpec& w, bool full_target,
                          bool modulate) {
  if (w.x0_prime.empty())
    throw std::invalid_argument("witness: empty center");
  if (!(w.c0 > 0.0) || !(w.lambda > 0.0) || !(w.beta >= 0.0))
    throw std::invalid_argument("witness: need c0 > 0, lambda > 0, beta >= 0");
  if (!(w.separation_factor > 3.0))
    throw std::invalid_argument(
        "witness: separation_factor must exceed 3 (disjoint balls)");
  const int dim = static_cast<int>(w.x0_prime.size());
  const double r = w.c0 * std::pow(w.lambda, -w.beta);
  const double h = 3.0 * r / kWitnessAxisNodes;
  if (r / h < 4.0)
    throw std::invalid_argument("witness: fewer than 4 cells per radius");

  std::vector<double> y0 = w.x0_prime;
  y0[0] += w.separation_factor * r;

  std::vector<std::array<double, 2>> sbox, tbox;
  std::vector<int> spts, tpts;
  for (int a = 0; a < dim; ++a) {
    sbox.push_back({y0[static_cast<std::size_t>(a)] - 1.5 * r,
                    y0[static_cast<std::size_t>(a)] + 1.5 * r});
    tbox.push_back({w.x0_prime[static_cast<std::size_t>(a)] - 1.5 * r,
                    w.x0_prime[static_cast<std::size_t>(a)] + 1.5 * r});
    spts.push_back(kWitnessAxisNodes);
    tpts.push_back(kWitnessAxisNodes);
  }
  if (full_target) {  // vertical column of the same cell size above the plane
    tbox.push_back({0.0, r});
    tpts.push_back(kWitnessAxisNodes / 3);
  }
  const Grid src = make_grid(sbox, spts, false);
  const Grid tgt = make_grid(tbox, tpts, true);

  TensorBump window;
  window.box = tbox;
  window.box.insert(window.box.end(), sbox.begin(), sbox.end());
  window.margin = r;

  WitnessPack pack{make_operator(src, tgt, k, phase, window, w.lambda),
                   {},
                   r,
                   w.x0_prime,
                   y0};
  pack.f.assign(static_cast<std::size_t>(src.size()), cplx(0.0));
  std::vector<double> y(static_cast<std::size_t>(dim));
  for (std::int64_t j = 0; j < src.size(); ++j) {
    src.node(j, y);
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double t = y[static_cast<std::size_t>(a)] -
                       y0[static_cast<std::size_t>(a)];
      d2 += t * t;
    }
    if (d2 > r * r * kBallSlack) continue;
    if (modulate) {
      double dot = 0.0;
      for (int a = 0; a < dim; ++a)
        dot += w.x0_prime[static_cast<std::size_t>(a)] *
               y[static_cast<std::size_t>(a)];
      pack.f[static_cast<std::size_t>(j)] = std::polar(1.0, -w.lambda * dot);
    } else {
      pack.f[static_cast<std::size_t>(j)] = cplx(1.0);
    }
  }
  return pack;
}

}  // namespace

WitnessPack witness_linear(const KernelSpec& k, const WitnessSpec& w,
                           bool full_target) {
  return build_witness(k, PhaseSpec{PhaseKind::Linear, 0.0}, w, full_target,
                       true);
}

WitnessPack witness_nonlinear(const KernelSpec& k, double gamma,
                              const WitnessSpec& w, bool full_target) {
  if (!(gamma >= 1.0))
    throw std::invalid_argument("witness_nonlinear: need gamma >= 1");
  if (std::abs(w.beta - 1.0 / gamma) > 1e-12)
    throw std::invalid_argument(
        "witness_nonlinear: indicator witnesses need beta = 1/gamma");
  return build_witness(k, PhaseSpec{PhaseKind::FractionalDistance, gamma}, w,
                       full_target, false);
}

double witness_ratio(const WitnessPack& pack, bool restrict_to_image_ball) {
  const double nf = weighted_norm(pack.op.source, pack.f);
  if (nf == 0.0) throw std::invalid_argument("witness_ratio: zero witness");
  GridFunction tf{pack.op.target, apply_forward(pack.op, pack.f)};
  double num;
  if (restrict_to_image_ball) {
    const std::size_t dim = pack.x0_prime.size();
    num = l2_norm_where(tf, [&](std::span<const double> x) {
      double d2 = 0.0;
      for (std::size_t a = 0; a < dim; ++a) {
        const double t = x[a] - pack.x0_prime[a];
        d2 += t * t;
      }
      return d2 <= pack.radius * pack.radius * kBallSlack;
    });
  } else {
    num = l2_norm(tf);
  }
  return num / nf;
}

}  // namespace oscint
