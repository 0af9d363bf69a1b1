#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace oscint {

using cplx = std::complex<double>;

// Uniform tensor grid on a product of intervals.  Nodes sit at cell midpoints
// lo + (i + 0.5) h, or at right cell edges lo + (i + 1) h when staggered.
// Staggering target grids against midpoint source grids keeps the two node
// sets disjoint axis-by-axis (minimum separation h/2 for equal boxes/counts),
// so singular kernels are never evaluated at zero.  The scalar quadrature
// weight is the cell volume prod_k h_k.
struct Grid {
  std::vector<std::array<double, 2>> box;  // per-axis [lo, hi]
  std::vector<int> points;                 // per-axis node counts
  bool staggered = false;

  int dim() const { return static_cast<int>(box.size()); }
  std::int64_t size() const;
  double step(int axis) const;
  double max_step() const;
  double weight() const;  // quadrature weight per node
  double coord(int axis, int index) const;
  void node(std::int64_t flat, std::span<double> out) const;  // row-major
};

Grid make_grid(std::vector<std::array<double, 2>> box, std::vector<int> points,
               bool staggered = false);
void validate(const Grid& g);

// Exact minimum distance between the axis-k node sets of two grids.
double min_axis_separation(const Grid& a, const Grid& b, int axis);

struct GridFunction {
  Grid grid;
  std::vector<cplx> values;
};

GridFunction make_function(const Grid& g,
                           const std::function<cplx(std::span<const double>)>& f);

// Quadrature-weighted norms and inner products.  All sums run serially in
// ascending flat order so results are bit-identical regardless of threading.
double l2_norm(const GridFunction& f);
cplx inner_product(const GridFunction& f, const GridFunction& g);
double sup_norm(const GridFunction& f);

// L2 norm over the nodes where keep(coords) is true.
double l2_norm_where(const GridFunction& f,
                     const std::function<bool(std::span<const double>)>& keep);

}  // namespace oscint
