#include "oscint/operators.hpp"

#include <omp.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oscint/grid.hpp"

using namespace oscint;

namespace {

std::vector<cplx> random_values(std::int64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

double rel_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

// independent dense assembly straight from the definition; evaluates the
// cutoff on the concatenated coordinates rather than via the separable route
std::vector<cplx> dense_matvec(const DiscretizedOperator& op,
                               std::span<const cplx> f) {
  const std::int64_t nt = op.target.size(), ns = op.source.size();
  const int td = op.target.dim(), sd = op.source.dim();
  std::vector<cplx> out(static_cast<std::size_t>(nt), cplx(0.0));
  std::vector<double> x(static_cast<std::size_t>(td));
  std::vector<double> y(static_cast<std::size_t>(sd));
  std::vector<double> xy(static_cast<std::size_t>(td + sd));
  std::vector<double> z(static_cast<std::size_t>(sd + 1));
  for (std::int64_t i = 0; i < nt; ++i) {
    op.target.node(i, x);
    cplx acc(0.0);
    for (std::int64_t j = 0; j < ns; ++j) {
      op.source.node(j, y);
      for (int k = 0; k < td; ++k) xy[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)];
      for (int k = 0; k < sd; ++k) xy[static_cast<std::size_t>(td + k)] = y[static_cast<std::size_t>(k)];
      for (int k = 0; k < sd; ++k) z[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)] - y[static_cast<std::size_t>(k)];
      double mu = 1.0;
      switch (op.kind) {
        case OperatorKind::SurfaceLinear:
          z[static_cast<std::size_t>(sd)] =
              op.height - surface_height(*op.surface, y);
          mu = measure_weight(*op.surface, y);
          break;
        case OperatorKind::FlatFull:
          z[static_cast<std::size_t>(sd)] = x[static_cast<std::size_t>(sd)];
          break;
        case OperatorKind::FlatRestricted:
          z[static_cast<std::size_t>(sd)] = 0.0;
          break;
      }
      const double entry = tensor_bump_eval(op.cutoff0, xy) * mu *
                           kernel_eval(op.kernel, z);
      const double phi = phase_eval(op.phase, x, y);
      acc += std::polar(entry, op.lambda * phi) * f[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = op.source.weight() * acc;
  }
  return out;
}

TensorBump full_window(const Grid& tgt, const Grid& src, double margin) {
  TensorBump b;
  b.box = tgt.box;
  b.box.insert(b.box.end(), src.box.begin(), src.box.end());
  b.margin = margin;
  return b;
}

DiscretizedOperator surface_case() {
  Grid src = make_grid({{-0.5, 0.5}, {-0.5, 0.5}}, {9, 9}, false);
  Grid tgt = make_grid({{-0.5, 0.5}, {-0.5, 0.5}}, {11, 11}, true);
  KernelSpec k{3, 1.2, 0.8, 1.0, {}};
  PhaseSpec ph{PhaseKind::Linear, 0.0};
  return make_operator(src, tgt, k, ph, full_window(tgt, src, 0.15), 6.0,
                       make_sine_product(2, 0.3, {1.0, 2.0}), 1.0);
}

DiscretizedOperator flat_full_case() {
  Grid src = make_grid({{-0.4, 0.4}}, {14}, false);
  Grid tgt = make_grid({{-0.4, 0.4}, {0.1, 0.5}}, {12, 6}, true);
  KernelSpec k{2, 0.6, 0.4, 1.0, AngularCutoff{0.2}};
  PhaseSpec ph{PhaseKind::FractionalDistance, 1.5};
  return make_operator(src, tgt, k, ph, full_window(tgt, src, 0.1), 8.0);
}

DiscretizedOperator flat_restricted_case() {
  Grid src = make_grid({{-0.5, 0.5}}, {16}, false);
  Grid tgt = make_grid({{-0.5, 0.5}}, {16}, true);
  KernelSpec k{2, 0.5, 0.5, 1.0, {}};
  PhaseSpec ph{PhaseKind::Linear, 0.0};
  return make_operator(src, tgt, k, ph, full_window(tgt, src, 0.1), 8.0);
}

}  // namespace

TEST_CASE("grid: node placement, indexing, quadrature weight") {
  Grid g = make_grid({{0.0, 1.0}}, {4}, false);
  CHECK(g.coord(0, 0) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(g.coord(0, 3) == doctest::Approx(0.875).epsilon(1e-15));
  Grid s = make_grid({{0.0, 1.0}}, {4}, true);
  CHECK(s.coord(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s.coord(0, 3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(min_axis_separation(g, s, 0) == doctest::Approx(0.125).epsilon(1e-12));

  Grid g2 = make_grid({{0.0, 1.0}, {0.0, 3.0}}, {2, 3}, false);
  CHECK(g2.size() == 6);
  CHECK(g2.weight() == doctest::Approx(0.5).epsilon(1e-15));
  std::vector<double> pt(2);
  g2.node(5, pt);  // row-major: last axis fastest
  CHECK(pt[0] == doctest::Approx(g2.coord(0, 1)).epsilon(1e-15));
  CHECK(pt[1] == doctest::Approx(g2.coord(1, 2)).epsilon(1e-15));

  // midpoint rule integrates smooth functions at second order
  Grid q = make_grid({{0.0, 1.0}}, {40}, false);
  GridFunction f = make_function(
      q, [](std::span<const double> x) { return cplx(3.0 * x[0] * x[0]); });
  double integral = 0.0;
  for (const cplx& v : f.values) integral += v.real() * q.weight();
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));

  CHECK_THROWS_AS(make_grid({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({{1.0, 0.0}}, {4}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({{0.0, 1.0}}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({{0.0, 1.0}}, {4, 4}), std::invalid_argument);
}

TEST_CASE("grid: weighted norms and inner products") {
  Grid g = make_grid({{0.0, 1.0}, {0.0, 1.0}}, {8, 8}, false);
  GridFunction one =
      make_function(g, [](std::span<const double>) { return cplx(1.0); });
  CHECK(l2_norm(one) == doctest::Approx(1.0).epsilon(1e-14));
  GridFunction lin = make_function(
      g, [](std::span<const double> x) { return cplx(x[0], x[1]); });
  // int |x + iy|^2 = 2/3
  CHECK(l2_norm(lin) ==
        doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-3));
  CHECK(inner_product(one, lin).real() ==
        doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::conj(inner_product(lin, one)) == inner_product(one, lin));
  const double left = l2_norm_where(
      lin, [](std::span<const double> x) { return x[0] < 0.5; });
  const double right = l2_norm_where(
      lin, [](std::span<const double> x) { return x[0] >= 0.5; });
  CHECK(left * left + right * right ==
        doctest::Approx(l2_norm(lin) * l2_norm(lin)).epsilon(1e-13));
  CHECK(sup_norm(one) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("make_operator: classification and rejection rules") {
  CHECK(surface_case().kind == OperatorKind::SurfaceLinear);
  CHECK(flat_full_case().kind == OperatorKind::FlatFull);
  CHECK(flat_restricted_case().kind == OperatorKind::FlatRestricted);

  Grid src = make_grid({{-0.5, 0.5}}, {16}, false);
  Grid tgt = make_grid({{-0.5, 0.5}}, {16}, true);
  KernelSpec k{2, 0.5, 0.5, 1.0, {}};
  PhaseSpec lin{PhaseKind::Linear, 0.0};
  TensorBump w = full_window(tgt, src, 0.1);

  // kernel ambient dim must track the source dim
  CHECK_THROWS_AS(
      make_operator(src, tgt, KernelSpec{3, 0.5, 0.5, 1.0, {}}, lin, w, 8.0),
      std::invalid_argument);
  // cutoff must span concat(x, y)
  CHECK_THROWS_AS(make_operator(src, tgt, k, lin, TensorBump{{{-1, 1}}, 0.1},
                                8.0),
                  std::invalid_argument);
  // surfaces pair with the linear phase only
  Grid s2 = make_grid({{-0.5, 0.5}, {-0.5, 0.5}}, {9, 9}, false);
  Grid t2 = make_grid({{-0.5, 0.5}, {-0.5, 0.5}}, {11, 11}, true);
  CHECK_THROWS_AS(
      make_operator(s2, t2, KernelSpec{3, 1.0, 1.0, 1.0, {}},
                    PhaseSpec{PhaseKind::FractionalDistance, 2.0},
                    full_window(t2, s2, 0.1), 6.0, make_zero_surface(2), 1.0),
      std::invalid_argument);
  // coincident nodes: identical unstaggered grids, kernel on the plane
  Grid same = make_grid({{-0.5, 0.5}}, {16}, false);
  CHECK_THROWS_AS(make_operator(src, same, k, lin, full_window(same, src, 0.1),
                                8.0),
                  std::invalid_argument);
  // oscillation resolution: huge lambda on a coarse grid
  CHECK_THROWS_AS(make_operator(src, tgt, k, lin, w, 4096.0),
                  std::invalid_argument);
  // flat geometry must stay inside the kernel window |z| <= 2
  Grid bigs = make_grid({{-2.0, 2.0}}, {64}, false);
  Grid bigt = make_grid({{-2.0, 2.0}}, {64}, true);
  CHECK_THROWS_AS(make_operator(bigs, bigt, k, lin,
                                full_window(bigt, bigs, 0.1), 1.0),
                  std::invalid_argument);
  // height only makes sense with a surface
  CHECK_THROWS_AS(make_operator(src, tgt, k, lin, w, 8.0, {}, 0.5),
                  std::invalid_argument);
  // target dim neither source dim nor source dim + 1
  Grid t3 = make_grid({{-0.4, 0.4}, {0.1, 0.5}, {0.1, 0.5}}, {8, 4, 4}, true);
  CHECK_THROWS_AS(make_operator(src, t3, k, lin, full_window(t3, src, 0.1),
                                1.0),
                  std::invalid_argument);
}

TEST_CASE("apply_forward matches an independent dense assembly") {
  int idx = 0;
  for (const DiscretizedOperator& op :
       {surface_case(), flat_full_case(), flat_restricted_case()}) {
    const std::vector<cplx> f =
        random_values(op.source.size(), 1000 + static_cast<std::uint64_t>(idx));
    const std::vector<cplx> got = apply_forward_serial(op, f);
    const std::vector<cplx> want = dense_matvec(op, f);
    CHECK(rel_diff(got, want) <= 1e-13);
    ++idx;
  }
}

TEST_CASE("adjoint satisfies the weighted inner-product identity") {
  int idx = 0;
  for (const DiscretizedOperator& op :
       {surface_case(), flat_full_case(), flat_restricted_case()}) {
    const std::vector<cplx> f =
        random_values(op.source.size(), 2000 + static_cast<std::uint64_t>(idx));
    const std::vector<cplx> g =
        random_values(op.target.size(), 3000 + static_cast<std::uint64_t>(idx));
    GridFunction tf{op.target, apply_forward(op, f)};
    GridFunction gf{op.target, g};
    GridFunction ff{op.source, f};
    GridFunction tg{op.source, apply_adjoint(op, g)};
    const cplx lhs = inner_product(tf, gf);
    const cplx rhs = inner_product(ff, tg);
    CHECK(std::abs(lhs - rhs) <=
          1e-12 * std::max(1.0, std::abs(lhs)));
    ++idx;
  }
}

TEST_CASE("apply is linear and handles degenerate inputs") {
  const DiscretizedOperator op = flat_full_case();
  const std::vector<cplx> f = random_values(op.source.size(), 41);
  const std::vector<cplx> g = random_values(op.source.size(), 42);
  const cplx a(0.7, -0.3), b(-1.1, 0.2);
  std::vector<cplx> comb(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) comb[i] = a * f[i] + b * g[i];
  const std::vector<cplx> lhs = apply_forward_serial(op, comb);
  std::vector<cplx> rhs = apply_forward_serial(op, f);
  const std::vector<cplx> tg = apply_forward_serial(op, g);
  for (std::size_t i = 0; i < rhs.size(); ++i)
    rhs[i] = a * rhs[i] + b * tg[i];
  CHECK(rel_diff(lhs, rhs) <= 1e-12);

  const std::vector<cplx> zero(f.size(), cplx(0.0));
  for (const cplx& v : apply_forward_serial(op, zero)) CHECK(v == cplx(0.0));
  CHECK_THROWS_AS(apply_forward(op, std::vector<cplx>(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_adjoint(op, std::vector<cplx>(3)),
                  std::invalid_argument);
}

TEST_CASE("threaded apply is bit-identical to the serial reference") {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  for (const DiscretizedOperator& op :
       {surface_case(), flat_full_case(), flat_restricted_case()}) {
    const std::vector<cplx> f = random_values(op.source.size(), 77);
    const std::vector<cplx> par = apply_forward(op, f);
    const std::vector<cplx> ser = apply_forward_serial(op, f);
    CHECK(par == ser);
    const std::vector<cplx> g = random_values(op.target.size(), 78);
    CHECK(apply_adjoint(op, g) == apply_adjoint_serial(op, g));
  }
  omp_set_num_threads(saved);
}

TEST_CASE("near/far split reconstructs the full operator") {
  for (const DiscretizedOperator& op : {surface_case(), flat_full_case()}) {
    const std::vector<cplx> f = random_values(op.source.size(), 99);
    const auto [av, bv] = split_AB(op, f, 0.5);
    const std::vector<cplx> full = apply_forward(op, f);
    std::vector<cplx> sum(av.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = av[i] + bv[i];
    CHECK(rel_diff(sum, full) <= 1e-12);
    // both parts are genuinely active at this scale
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < sum.size(); ++i) {
      na += std::norm(av[i]);
      nb += std::norm(bv[i]);
    }
    CHECK(na > 0.0);
    CHECK(nb > 0.0);
  }
}

TEST_CASE("quadrature self-convergence under source refinement") {
  Grid tgt = make_grid({{-0.4, 0.4}, {0.1, 0.5}}, {12, 6}, true);
  KernelSpec k{2, 0.6, 0.4, 1.0, {}};
  PhaseSpec ph{PhaseKind::FractionalDistance, 1.5};
  auto smooth = [](std::span<const double> y) {
    return cplx(std::exp(-8.0 * y[0] * y[0]), 0.3 * y[0]);
  };
  std::vector<std::vector<cplx>> levels;
  for (int n : {16, 32, 64}) {
    Grid src = make_grid({{-0.4, 0.4}}, {n}, false);
    DiscretizedOperator op = make_operator(
        src, tgt, k, ph, full_window(tgt, src, 0.1), 4.0);
    levels.push_back(apply_forward(op, make_function(src, smooth).values));
  }
  double sup = 0.0;
  for (const cplx& v : levels[2]) sup = std::max(sup, std::abs(v));
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < levels[0].size(); ++i) {
    d1 = std::max(d1, std::abs(levels[1][i] - levels[0][i]));
    d2 = std::max(d2, std::abs(levels[2][i] - levels[1][i]));
  }
  CHECK(d2 / sup < 0.01);          // refinement barely moves the values
  CHECK(d2 / d1 < 0.42);           // convergence order at least ~1.5
}

TEST_CASE("oscillated surfaces converge to the flat operator") {
  Grid src = make_grid({{-0.5, 0.5}, {-0.5, 0.5}}, {10, 10}, false);
  Grid tgt = make_grid({{-0.5, 0.5}, {-0.5, 0.5}}, {10, 10}, true);
  KernelSpec k{3, 1.2, 0.8, 1.0, {}};
  PhaseSpec ph{PhaseKind::Linear, 0.0};
  TensorBump w = full_window(tgt, src, 0.15);
  DiscretizedOperator wavy = make_operator(
      src, tgt, k, ph, w, 5.0, make_sine_product(2, 0.5, {1.0, 1.0}), 1.0);
  DiscretizedOperator flat =
      make_operator(src, tgt, k, ph, w, 5.0, make_zero_surface(2), 1.0);
  const std::vector<cplx> f = random_values(src.size(), 7);
  const std::vector<cplx> base = apply_forward(flat, f);
  double prev = std::numeric_limits<double>::infinity();
  double base_norm = 0.0;
  for (const cplx& v : base) base_norm = std::max(base_norm, std::abs(v));
  for (double eps : {0.25, 0.0625, 0.015625}) {
    const std::vector<cplx> ve =
        apply_forward(oscillated(wavy, {eps, 2.0}), f);
    double d = 0.0;
    for (std::size_t i = 0; i < ve.size(); ++i)
      d = std::max(d, std::abs(ve[i] - base[i]));
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev / base_norm <= 1e-2);
  CHECK_THROWS_AS(oscillated(flat_full_case(), {0.5, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("maximal function is the pointwise max over oscillation levels") {
  const DiscretizedOperator op = surface_case();
  const std::vector<cplx> f = random_values(op.source.size(), 5);
  const std::vector<double> eps{1.0, 0.5, 0.25};
  const std::vector<double> got = apply_maximal(op, eps, 2.0, f);
  std::vector<double> want(got.size(), 0.0);
  for (double e : eps) {
    const std::vector<cplx> v = apply_forward(oscillated(op, {e, 2.0}), f);
    for (std::size_t i = 0; i < want.size(); ++i)
      want[i] = std::max(want[i], std::abs(v[i]));
  }
  CHECK(got == want);
  CHECK_THROWS_AS(apply_maximal(op, std::vector<double>{}, 2.0, f),
                  std::invalid_argument);
}

TEST_CASE("materialized matrix reproduces the pair-loop applies") {
  int idx = 0;
  for (const DiscretizedOperator& op :
       {surface_case(), flat_full_case(), flat_restricted_case()}) {
    const std::vector<cplx> f =
        random_values(op.source.size(), 6000 + static_cast<std::uint64_t>(idx));
    const std::vector<cplx> g =
        random_values(op.target.size(), 7000 + static_cast<std::uint64_t>(idx));
    ++idx;
    const DenseOperator dense(op);
    CHECK(dense.entries() == op.source.size() * op.target.size());
    CHECK(rel_diff(dense.forward(f), apply_forward(op, f)) <= 1e-13);
    CHECK(rel_diff(dense.adjoint(g), apply_adjoint(op, g)) <= 1e-13);
    if (op.source.size() != op.target.size())
      CHECK_THROWS_AS(dense.forward(g), std::invalid_argument);
  }

  // split weights are baked into the materialized entries too
  const DiscretizedOperator op = flat_restricted_case();
  const std::vector<cplx> f = random_values(op.source.size(), 99);
  const ApplyOptions near{SplitMode::APart, 0.5};
  CHECK(rel_diff(DenseOperator(op, near).forward(f),
                 apply_forward(op, f, near)) <= 1e-13);
}
