#include "oscint/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace oscint {

namespace {

// max |v_k| over an interval
double axis_sup(const std::array<double, 2>& b) {
  return std::max(std::abs(b[0]), std::abs(b[1]));
}

// max |x_k - y_k| over two intervals
double axis_diff_sup(const std::array<double, 2>& bx,
                     const std::array<double, 2>& by) {
  return std::max(std::abs(bx[1] - by[0]), std::abs(by[1] - bx[0]));
}

// sup of |z| = |x - (y,0)| (or surface analogue) over the boxes
double max_kernel_arg(const DiscretizedOperator& op) {
  const int sdim = op.source.dim();
  double s = 0.0;
  for (int k = 0; k < sdim; ++k) {
    const double d = axis_diff_sup(op.target.box[static_cast<std::size_t>(k)],
                                   op.source.box[static_cast<std::size_t>(k)]);
    s += d * d;
  }
  double last = 0.0;
  switch (op.kind) {
    case OperatorKind::SurfaceLinear:
      last = std::abs(op.height) + op.surface->sup_height();
      break;
    case OperatorKind::FlatFull:
      last = axis_sup(op.target.box[static_cast<std::size_t>(sdim)]);
      break;
    case OperatorKind::FlatRestricted:
      last = 0.0;
      break;
  }
  return std::sqrt(s + last * last);
}

// uniform bound on |grad Phi| over the boxes (both variables)
double phase_gradient_bound(const DiscretizedOperator& op) {
  const int sdim = op.source.dim();
  if (op.phase.kind == PhaseKind::Linear) {
    double sx = 0.0, sy = 0.0;
    for (int k = 0; k < sdim; ++k) {
      const double x = axis_sup(op.target.box[static_cast<std::size_t>(k)]);
      const double y = axis_sup(op.source.box[static_cast<std::size_t>(k)]);
      sx += x * x;
      sy += y * y;
    }
    return std::sqrt(std::max(sx, sy));
  }
  const double dmax = max_kernel_arg(op);
  return op.phase.gamma * std::pow(dmax, op.phase.gamma - 1.0);
}

bool coincidence_free(const DiscretizedOperator& op) {
  const int sdim = op.source.dim();
  for (int k = 0; k < sdim; ++k)
    if (min_axis_separation(op.target, op.source, k) > 0.0) return true;
  if (op.kind == OperatorKind::SurfaceLinear)
    return std::abs(op.height) > op.surface->sup_height();
  if (op.kind == OperatorKind::FlatFull) {
    const Grid& t = op.target;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < t.points[static_cast<std::size_t>(sdim)]; ++i)
      best = std::min(best, std::abs(t.coord(sdim, i)));
    return best > 0.0;
  }
  return false;
}

struct Tables {
  std::int64_t ns = 0, nt = 0;
  int sdim = 0, tdim = 0, adim = 0;
  std::vector<double> sp, tp;   // flattened node coordinates
  std::vector<double> mu_bump;  // mu(y_j) * chi0_y(y_j)
  std::vector<double> psi;      // surface height at y_j (surface kind)
  std::vector<double> tbump;    // chi0_x(x_i)
};

Tables build_tables(const DiscretizedOperator& op) {
  Tables t;
  t.ns = op.source.size();
  t.nt = op.target.size();
  t.sdim = op.source.dim();
  t.tdim = op.target.dim();
  t.adim = t.sdim + 1;

  const auto& cb = op.cutoff0.box;
  TensorBump bx{{cb.begin(), cb.begin() + t.tdim}, op.cutoff0.margin};
  TensorBump by{{cb.begin() + t.tdim, cb.end()}, op.cutoff0.margin};

  t.sp.resize(static_cast<std::size_t>(t.ns * t.sdim));
  t.mu_bump.resize(static_cast<std::size_t>(t.ns));
  if (op.kind == OperatorKind::SurfaceLinear)
    t.psi.resize(static_cast<std::size_t>(t.ns));
  for (std::int64_t j = 0; j < t.ns; ++j) {
    std::span<double> y(&t.sp[static_cast<std::size_t>(j * t.sdim)],
                        static_cast<std::size_t>(t.sdim));
    op.source.node(j, y);
    double mb = tensor_bump_eval(by, y);
    if (op.kind == OperatorKind::SurfaceLinear) {
      mb *= measure_weight(*op.surface, y);
      t.psi[static_cast<std::size_t>(j)] = surface_height(*op.surface, y);
    }
    t.mu_bump[static_cast<std::size_t>(j)] = mb;
  }

  t.tp.resize(static_cast<std::size_t>(t.nt * t.tdim));
  t.tbump.resize(static_cast<std::size_t>(t.nt));
  for (std::int64_t i = 0; i < t.nt; ++i) {
    std::span<double> x(&t.tp[static_cast<std::size_t>(i * t.tdim)],
                        static_cast<std::size_t>(t.tdim));
    op.target.node(i, x);
    t.tbump[static_cast<std::size_t>(i)] = tensor_bump_eval(bx, x);
  }
  return t;
}

// e^(i sign lambda Phi) K(z) times the near/far split weight, for one
// (target, source) node pair; everything position-independent is folded
// elsewhere.  lam_beta = lambda^beta precomputed (unused for Full).
cplx pair_term(const DiscretizedOperator& op, const Tables& t,
               const ApplyOptions& o, double lam_beta, double phase_sign,
               std::int64_t i, std::int64_t j) {
  const double* x = &t.tp[static_cast<std::size_t>(i * t.tdim)];
  const double* y = &t.sp[static_cast<std::size_t>(j * t.sdim)];
  double z[8];
  double rh2 = 0.0;
  for (int k = 0; k < t.sdim; ++k) {
    z[k] = x[k] - y[k];
    rh2 += z[k] * z[k];
  }
  switch (op.kind) {
    case OperatorKind::SurfaceLinear:
      z[t.sdim] = op.height - t.psi[static_cast<std::size_t>(j)];
      break;
    case OperatorKind::FlatFull:
      z[t.sdim] = x[t.sdim];
      break;
    case OperatorKind::FlatRestricted:
      z[t.sdim] = 0.0;
      break;
  }
  double fac = 1.0;
  if (o.mode != SplitMode::Full) {
    const double far = phi_annulus(lam_beta * std::sqrt(rh2));
    fac = o.mode == SplitMode::BPart ? far : 1.0 - far;
    if (fac == 0.0) return cplx(0.0);
  }
  const double kv = kernel_eval(
      op.kernel, std::span<const double>(z, static_cast<std::size_t>(t.adim)));
  if (kv == 0.0) return cplx(0.0);
  const double phi = phase_eval(
      op.phase, std::span<const double>(x, static_cast<std::size_t>(t.tdim)),
      std::span<const double>(y, static_cast<std::size_t>(t.sdim)));
  return std::polar(kv * fac, phase_sign * op.lambda * phi);
}

std::vector<cplx> run_apply(const DiscretizedOperator& op,
                            std::span<const cplx> in, bool adjoint,
                            ApplyOptions o, bool parallel) {
  if (!(std::isfinite(o.beta)))
    throw std::invalid_argument("apply: beta must be finite");
  const Tables t = build_tables(op);
  const std::int64_t n_in = adjoint ? t.nt : t.ns;
  const std::int64_t n_out = adjoint ? t.ns : t.nt;
  if (static_cast<std::int64_t>(in.size()) != n_in)
    throw std::invalid_argument("apply: input size does not match grid");

  // fold the node factors of the summed-over side into the input
  std::vector<cplx> cin(static_cast<std::size_t>(n_in));
  for (std::int64_t k = 0; k < n_in; ++k)
    cin[static_cast<std::size_t>(k)] =
        (adjoint ? t.tbump : t.mu_bump)[static_cast<std::size_t>(k)] *
        in[static_cast<std::size_t>(k)];
  const double w_sum = adjoint ? op.target.weight() : op.source.weight();
  const double lam_beta =
      o.mode == SplitMode::Full ? 0.0 : std::pow(op.lambda, o.beta);
  const double phase_sign = adjoint ? -1.0 : 1.0;

  std::vector<cplx> out(static_cast<std::size_t>(n_out));
  auto compute_one = [&](std::int64_t k) {
    cplx acc(0.0);
    if (!adjoint) {
      for (std::int64_t j = 0; j < t.ns; ++j) {
        const cplx c = cin[static_cast<std::size_t>(j)];
        if (c == cplx(0.0)) continue;
        acc += pair_term(op, t, o, lam_beta, phase_sign, k, j) * c;
      }
      out[static_cast<std::size_t>(k)] =
          w_sum * t.tbump[static_cast<std::size_t>(k)] * acc;
    } else {
      for (std::int64_t i = 0; i < t.nt; ++i) {
        const cplx c = cin[static_cast<std::size_t>(i)];
        if (c == cplx(0.0)) continue;
        acc += pair_term(op, t, o, lam_beta, phase_sign, i, k) * c;
      }
      out[static_cast<std::size_t>(k)] =
          w_sum * t.mu_bump[static_cast<std::size_t>(k)] * acc;
    }
  };

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n_out; ++k) compute_one(k);
  } else {
    for (std::int64_t k = 0; k < n_out; ++k) compute_one(k);
  }
  return out;
}

}  // namespace

DiscretizedOperator make_operator(Grid source, Grid target, KernelSpec kernel,
                                  PhaseSpec phase, TensorBump cutoff0,
                                  double lambda,
                                  std::optional<SurfaceSpec> surface,
                                  double height) {
  validate(source);
  validate(target);
  validate(kernel);
  validate(phase);
  validate(cutoff0);
  if (surface) validate(*surface);
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("operator: lambda must be positive");
  if (!std::isfinite(height))
    throw std::invalid_argument("operator: height must be finite");

  DiscretizedOperator op{std::move(source), std::move(target),
                         std::move(kernel), phase,
                         std::move(cutoff0), lambda,
                         std::move(surface), height,
                         OperatorKind::FlatRestricted};
  const int sdim = op.source.dim();
  const int tdim = op.target.dim();
  if (op.surface) {
    if (op.surface->dim_base != sdim || tdim != sdim)
      throw std::invalid_argument(
          "operator: surface kind needs dim_base = source dim = target dim");
    if (op.phase.kind != PhaseKind::Linear)
      throw std::invalid_argument(
          "operator: surface kind supports the linear phase only");
    op.kind = OperatorKind::SurfaceLinear;
  } else if (tdim == sdim + 1) {
    op.kind = OperatorKind::FlatFull;
  } else if (tdim == sdim) {
    op.kind = OperatorKind::FlatRestricted;
  } else {
    throw std::invalid_argument(
        "operator: target dim must equal source dim or source dim + 1");
  }
  if (op.kind != OperatorKind::SurfaceLinear && op.height != 0.0)
    throw std::invalid_argument("operator: height requires a surface");

  if (op.kernel.ambient_dim != sdim + 1)
    throw std::invalid_argument(
        "operator: kernel ambient dim must be source dim + 1");
  if (op.cutoff0.box.size() != static_cast<std::size_t>(tdim + sdim))
    throw std::invalid_argument(
        "operator: cutoff must cover concatenated target+source coords");

  if (!coincidence_free(op))
    throw std::invalid_argument(
        "operator: source and target nodes may coincide (z = 0); stagger the "
        "grids or move the target off the surface");

  if (op.kind != OperatorKind::SurfaceLinear && max_kernel_arg(op) > 2.0)
    throw std::invalid_argument(
        "operator: flat geometry reaches |z| > 2, outside the kernel window");

  const double h = std::max(op.source.max_step(), op.target.max_step());
  const double L = phase_gradient_bound(op);
  if (op.lambda * h * L > 0.5 * M_PI * (1.0 + 1e-12))
    throw std::invalid_argument(
        "operator: grid too coarse to resolve the phase oscillation "
        "(lambda * h * L > pi/2)");
  return op;
}

std::vector<cplx> apply_forward(const DiscretizedOperator& op,
                                std::span<const cplx> f, ApplyOptions o) {
  return run_apply(op, f, false, o, true);
}

std::vector<cplx> apply_forward_serial(const DiscretizedOperator& op,
                                       std::span<const cplx> f,
                                       ApplyOptions o) {
  return run_apply(op, f, false, o, false);
}

std::vector<cplx> apply_adjoint(const DiscretizedOperator& op,
                                std::span<const cplx> g, ApplyOptions o) {
  return run_apply(op, g, true, o, true);
}

std::vector<cplx> apply_adjoint_serial(const DiscretizedOperator& op,
                                       std::span<const cplx> g,
                                       ApplyOptions o) {
  return run_apply(op, g, true, o, false);
}

std::pair<std::vector<cplx>, std::vector<cplx>> split_AB(
    const DiscretizedOperator& op, std::span<const cplx> f, double beta) {
  return {apply_forward(op, f, {SplitMode::APart, beta}),
          apply_forward(op, f, {SplitMode::BPart, beta})};
}

DiscretizedOperator oscillated(const DiscretizedOperator& op,
                               const OscillationParams& params) {
  if (!op.surface)
    throw std::invalid_argument("oscillated: operator has no surface");
  return make_operator(op.source, op.target, op.kernel, op.phase, op.cutoff0,
                       op.lambda, oscillate(*op.surface, params), op.height);
}

DenseOperator::DenseOperator(const DiscretizedOperator& op, ApplyOptions o) {
  if (!(std::isfinite(o.beta)))
    throw std::invalid_argument("apply: beta must be finite");
  const Tables t = build_tables(op);
  nt_ = t.nt;
  ns_ = t.ns;
  const double w_src = op.source.weight();
  adj_scale_ = op.target.weight() / w_src;
  const double lam_beta =
      o.mode == SplitMode::Full ? 0.0 : std::pow(op.lambda, o.beta);
  a_.resize(static_cast<std::size_t>(nt_ * ns_));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < nt_; ++i) {
    const double row_fac = w_src * t.tbump[static_cast<std::size_t>(i)];
    cplx* row = &a_[static_cast<std::size_t>(i * ns_)];
    for (std::int64_t j = 0; j < ns_; ++j)
      row[j] = row_fac * t.mu_bump[static_cast<std::size_t>(j)] *
               pair_term(op, t, o, lam_beta, 1.0, i, j);
  }
}

std::vector<cplx> DenseOperator::forward(std::span<const cplx> f) const {
  if (static_cast<std::int64_t>(f.size()) != ns_)
    throw std::invalid_argument("apply: input size does not match grid");
  std::vector<cplx> out(static_cast<std::size_t>(nt_));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < nt_; ++i) {
    const cplx* row = &a_[static_cast<std::size_t>(i * ns_)];
    cplx acc(0.0);
    for (std::int64_t j = 0; j < ns_; ++j)
      acc += row[j] * f[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

std::vector<cplx> DenseOperator::adjoint(std::span<const cplx> g) const {
  if (static_cast<std::int64_t>(g.size()) != nt_)
    throw std::invalid_argument("apply: input size does not match grid");
  std::vector<cplx> out(static_cast<std::size_t>(ns_));
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < ns_; ++j) {
    cplx acc(0.0);
    for (std::int64_t i = 0; i < nt_; ++i)
      acc += std::conj(a_[static_cast<std::size_t>(i * ns_ + j)]) *
             g[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(j)] = adj_scale_ * acc;
  }
  return out;
}

std::vector<double> apply_maximal(const DiscretizedOperator& op,
                                  std::span<const double> epsilons,
                                  double gamma_osc, std::span<const cplx> f) {
  if (epsilons.empty())
    throw std::invalid_argument("apply_maximal: need at least one epsilon");
  std::vector<double> out(static_cast<std::size_t>(op.target.size()), 0.0);
  for (double eps : epsilons) {
    const DiscretizedOperator oe = oscillated(op, {eps, gamma_osc});
    const std::vector<cplx> v = apply_forward(oe, f);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = std::max(out[i], std::abs(v[i]));
  }
  return out;
}

}  // namespace oscint
