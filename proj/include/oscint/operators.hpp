#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "oscint/geometry.hpp"
#include "oscint/grid.hpp"
#include "oscint/kernels.hpp"
#include "oscint/phase.hpp"

namespace oscint {

// Discretized oscillatory integral operator
//   (T f)(x) = sum_j w_s  e^(i lambda Phi(x, y_j))  K(z(x, y_j))
//              chi0(x, y_j)  mu(y_j)  f_j .
// Three geometries, distinguished by the presence of a surface and the grid
// dimensions (source dim n below, kernel ambient dim always n + 1):
//   SurfaceLinear   target dim n,     z = (x - y, height - psi(y)), Phi = x.y
//   FlatFull        target dim n + 1, z = x - (y, 0)
//   FlatRestricted  target dim n,     z = (x - y, 0)
// mu is the surface measure density sqrt(1 + |grad psi|^2) (1 for flat
// kinds); operators act on L^2 of the parameter domain.  chi0 is a tensor
// bump over the concatenated (x, y) coordinates.
enum class OperatorKind { SurfaceLinear, FlatFull, FlatRestricted };

struct DiscretizedOperator {
  Grid source;
  Grid target;
  KernelSpec kernel;
  PhaseSpec phase;
  TensorBump cutoff0;  // over concat(x, y): target.dim() + source.dim() axes
  double lambda = 1.0;
  std::optional<SurfaceSpec> surface{};
  double height = 0.0;  // target plane offset x_{n+1}, SurfaceLinear only
  OperatorKind kind = OperatorKind::FlatRestricted;
};

// Validates and classifies.  Rejects: dimension mismatches, kernels whose
// ambient dim is not source dim + 1, surfaces paired with non-linear phases,
// node pairs that could coincide (z = 0), flat geometries reaching |z| > 2,
// and grids too coarse for the phase: lambda * max step * L must not exceed
// pi/2, where L bounds the phase gradient over the boxes.
DiscretizedOperator make_operator(Grid source, Grid target, KernelSpec kernel,
                                  PhaseSpec phase, TensorBump cutoff0,
                                  double lambda,
                                  std::optional<SurfaceSpec> surface = {},
                                  double height = 0.0);

// Near/far splitting of the integrand in the horizontal difference x' - y':
// APart keeps |x'-y'| <~ lambda^-beta, BPart the complement, and the two
// weights sum to 1 pointwise so APart + BPart reconstructs Full.
enum class SplitMode { Full, APart, BPart };

struct ApplyOptions {
  SplitMode mode = SplitMode::Full;
  double beta = 0.0;  // split scale exponent, used by APart/BPart
};

// OpenMP-parallel over output points; each output accumulates its quadrature
// sum serially in ascending source order, so results are bit-identical for
// any thread count.  The *_serial variants run the same loops unthreaded.
std::vector<cplx> apply_forward(const DiscretizedOperator& op,
                                std::span<const cplx> f, ApplyOptions o = {});
std::vector<cplx> apply_forward_serial(const DiscretizedOperator& op,
                                       std::span<const cplx> f,
                                       ApplyOptions o = {});

// Adjoint for the quadrature-weighted inner products:
// (T* g)_j = w_t sum_i conj(L(x_i, y_j)) g_i.
std::vector<cplx> apply_adjoint(const DiscretizedOperator& op,
                                std::span<const cplx> g, ApplyOptions o = {});
std::vector<cplx> apply_adjoint_serial(const DiscretizedOperator& op,
                                       std::span<const cplx> g,
                                       ApplyOptions o = {});

std::pair<std::vector<cplx>, std::vector<cplx>> split_AB(
    const DiscretizedOperator& op, std::span<const cplx> f, double beta);

// Same operator over the oscillated surface (SurfaceLinear only).
DiscretizedOperator oscillated(const DiscretizedOperator& op,
                               const OscillationParams& params);

// Pointwise maximal function max_eps |T^eps f(x)| over the given oscillation
// amplitudes at fixed gamma_osc.
std::vector<double> apply_maximal(const DiscretizedOperator& op,
                                  std::span<const double> epsilons,
                                  double gamma_osc, std::span<const cplx> f);

// Materialized matrix of the operator (target x source, row-major), sharing
// the per-pair entry code with apply_forward.  Worth it when the entry count
// is small enough to hold and more than one apply is needed; forward/adjoint
// agree with apply_forward/apply_adjoint up to fp regrouping and stay
// bit-identical across thread counts (rows/columns sum serially).
//
// Callers that amortize several applies materialize up to this many entries
// (24M complex doubles = 384MB).
constexpr std::int64_t kDenseEntryLimit = 24'000'000;

class DenseOperator {
 public:
  explicit DenseOperator(const DiscretizedOperator& op, ApplyOptions o = {});
  std::vector<cplx> forward(std::span<const cplx> f) const;
  std::vector<cplx> adjoint(std::span<const cplx> g) const;
  std::int64_t entries() const { return nt_ * ns_; }

 private:
  std::int64_t nt_ = 0, ns_ = 0;
  double adj_scale_ = 1.0;  // target weight / source weight
  std::vector<cplx> a_;
};

}  // namespace oscint
