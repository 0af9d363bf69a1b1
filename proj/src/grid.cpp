#include "oscint/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oscint {

std::int64_t Grid::size() const {
  std::int64_t n = 1;
  for (int p : points) n *= p;
  return n;
}

double Grid::step(int axis) const {
  return (box[static_cast<std::size_t>(axis)][1] -
          box[static_cast<std::size_t>(axis)][0]) /
         points[static_cast<std::size_t>(axis)];
}

double Grid::max_step() const {
  double h = 0.0;
  for (int k = 0; k < dim(); ++k) h = std::max(h, step(k));
  return h;
}

double Grid::weight() const {
  double w = 1.0;
  for (int k = 0; k < dim(); ++k) w *= step(k);
  return w;
}

double Grid::coord(int axis, int index) const {
  const double shift = staggered ? 1.0 : 0.5;
  return box[static_cast<std::size_t>(axis)][0] + (index + shift) * step(axis);
}

void Grid::node(std::int64_t flat, std::span<double> out) const {
  for (int k = dim() - 1; k >= 0; --k) {
    const int n = points[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] =
        coord(k, static_cast<int>(flat % n));
    flat /= n;
  }
}

Grid make_grid(std::vector<std::array<double, 2>> box, std::vector<int> points,
               bool staggered) {
  Grid g{std::move(box), std::move(points), staggered};
  validate(g);
  return g;
}

void validate(const Grid& g) {
  if (g.box.empty()) throw std::invalid_argument("grid: empty box");
  if (g.box.size() != g.points.size())
    throw std::invalid_argument("grid: box/points size mismatch");
  for (std::size_t k = 0; k < g.box.size(); ++k) {
    if (!(g.box[k][0] < g.box[k][1]) || !std::isfinite(g.box[k][0]) ||
        !std::isfinite(g.box[k][1]))
      throw std::invalid_argument("grid: box axis must satisfy lo < hi");
    if (g.points[k] < 1)
      throw std::invalid_argument("grid: need >= 1 point per axis");
  }
  if (g.size() > (std::int64_t{1} << 26))
    throw std::invalid_argument("grid: too many nodes");
}

double min_axis_separation(const Grid& a, const Grid& b, int axis) {
  double best = std::numeric_limits<double>::infinity();
  const int na = a.points[static_cast<std::size_t>(axis)];
  const int nb = b.points[static_cast<std::size_t>(axis)];
  for (int i = 0; i < na; ++i) {
    const double x = a.coord(axis, i);
    for (int j = 0; j < nb; ++j)
      best = std::min(best, std::abs(x - b.coord(axis, j)));
  }
  return best;
}

GridFunction make_function(
    const Grid& g, const std::function<cplx(std::span<const double>)>& f) {
  validate(g);
  GridFunction out{g, std::vector<cplx>(static_cast<std::size_t>(g.size()))};
  std::vector<double> pt(static_cast<std::size_t>(g.dim()));
  for (std::int64_t i = 0; i < g.size(); ++i) {
    g.node(i, pt);
    out.values[static_cast<std::size_t>(i)] = f(pt);
  }
  return out;
}

double l2_norm(const GridFunction& f) {
  double s = 0.0;
  for (const cplx& v : f.values) s += std::norm(v);
  return std::sqrt(f.grid.weight() * s);
}

cplx inner_product(const GridFunction& f, const GridFunction& g) {
  if (f.values.size() != g.values.size())
    throw std::invalid_argument("inner_product: size mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    s += std::conj(f.values[i]) * g.values[i];
  return f.grid.weight() * s;
}

double sup_norm(const GridFunction& f) {
  double s = 0.0;
  for (const cplx& v : f.values) s = std::max(s, std::abs(v));
  return s;
}

double l2_norm_where(
    const GridFunction& f,
    const std::function<bool(std::span<const double>)>& keep) {
  double s = 0.0;
  std::vector<double> pt(static_cast<std::size_t>(f.grid.dim()));
  for (std::int64_t i = 0; i < f.grid.size(); ++i) {
    f.grid.node(i, pt);
    if (keep(pt)) s += std::norm(f.values[static_cast<std::size_t>(i)]);
  }
  return std::sqrt(f.grid.weight() * s);
}

}  // namespace oscint
