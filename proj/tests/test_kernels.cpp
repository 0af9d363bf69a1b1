#include "oscint/kernels.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

using namespace oscint;

namespace {

// Analytic derivatives of the pure power kernel A |z|^-p, the oracle for the
// finite-difference route inside a2_ratio.
double analytic_ratio(double A, double p, std::span<const double> z,
                      std::span<const int> alpha) {
  double r2 = 0.0;
  for (double zi : z) r2 += zi * zi;
  double r = std::sqrt(r2);
  int order = 0;
  int i = -1, j = -1;
  for (size_t a = 0; a < alpha.size(); ++a) {
    order += alpha[a];
    if (alpha[a] == 2) i = j = static_cast<int>(a);
    if (alpha[a] == 1) (i < 0 ? i : j) = static_cast<int>(a);
  }
  double d = 0.0;
  if (order == 0) {
    d = A * std::pow(r, -p);
  } else if (order == 1) {
    d = -p * A * z[i] * std::pow(r, -p - 2.0);
  } else {
    double kron = (i == j) ? 1.0 : 0.0;
    d = A * (p * (p + 2.0) * z[i] * z[j] * std::pow(r, -p - 4.0) -
             p * kron * std::pow(r, -p - 2.0));
  }
  return std::abs(d) * std::pow(r, p + order);
}

std::vector<double> random_annulus_point(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.5, 2.0);
  std::vector<double> z(dim);
  double n = 0.0;
  do {
    n = 0.0;
    for (auto& zi : z) {
      zi = gauss(rng);
      n += zi * zi;
    }
  } while (n < 1e-12);
  double scale = radius(rng) / std::sqrt(n);
  for (auto& zi : z) zi *= scale;
  return z;
}

}  // namespace

TEST_CASE("kernel_eval basics") {
  KernelSpec k{2, 1.0, 0.5, 1.0, std::nullopt};
  std::vector<double> z{2.0, 0.0};
  CHECK(kernel_eval(k, z) == doctest::Approx(0.5).epsilon(1e-14));
  k.amplitude = 3.0;
  CHECK(kernel_eval(k, z) == doctest::Approx(1.5).epsilon(1e-14));
  k.amplitude = 0.0;
  CHECK(kernel_eval(k, z) == 0.0);

  std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(kernel_eval(k, zero), std::domain_error);
  std::vector<double> wrong{1.0, 0.0, 0.0};
  CHECK_THROWS_AS(kernel_eval(k, wrong), std::invalid_argument);
}

TEST_CASE("angular cutoff vanishes near the plane and is 1 away from it") {
  KernelSpec k{3, 1.0, 1.0, 1.0, AngularCutoff{0.2}};
  std::vector<double> in_plane{1.0, 0.0, 0.0};
  CHECK(kernel_eval(k, in_plane) == 0.0);
  std::vector<double> below{0.5, 0.0, 0.05};  // ratio ~ 0.0995 < c1
  CHECK(kernel_eval(k, below) == 0.0);
  std::vector<double> vertical{0.0, 0.0, 1.0};
  CHECK(kernel_eval(k, vertical) == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<double> mid{1.0, 0.0, 0.3};  // ratio ~ 0.287 in (c1, 2 c1)
  double v = kernel_eval(k, mid);
  KernelSpec plain = k;
  plain.angular_cutoff.reset();
  CHECK(v > 0.0);
  CHECK(v < kernel_eval(plain, mid));
}

TEST_CASE("a2_ratio matches the analytic derivative oracle") {
  std::mt19937_64 rng(101);
  for (double p : {0.5, 1.0, 1.5}) {
    for (int dim : {2, 3}) {
      KernelSpec k{dim, p, 0.25, 1.0, std::nullopt};
      for (int trial = 0; trial < 100; ++trial) {
        auto z = random_annulus_point(rng, dim);
        std::vector<int> alpha(dim, 0);
        int order = trial % 3;
        if (order == 1) {
          alpha[trial % dim] = 1;
        } else if (order == 2) {
          if (trial % 2 == 0 && dim >= 2) {
            alpha[0] = 1;
            alpha[1] = 1;
          } else {
            alpha[trial % dim] = 2;
          }
        }
        double got = a2_ratio(k, z, alpha);
        double want = analytic_ratio(1.0, p, z, alpha);
        CHECK(got == doctest::Approx(want).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("a2_ratio stays under the homogeneity bound on the annulus") {
  std::mt19937_64 rng(202);
  for (double p : {0.5, 1.0, 1.5}) {
    KernelSpec k{3, p, 0.5, 1.0, std::nullopt};
    double bound = 2.0 * p * (p + 1.0);
    std::vector<std::vector<int>> alphas = {
        {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
        {2, 0, 0}, {0, 2, 0}, {1, 1, 0}, {0, 1, 1}};
    for (int trial = 0; trial < 1000; ++trial) {
      auto z = random_annulus_point(rng, 3);
      const auto& alpha = alphas[trial % alphas.size()];
      CHECK(a2_ratio(k, z, alpha) <= std::max(1.0, bound) * (1.0 + 1e-5));
    }
  }
}

TEST_CASE("a2_ratio rejects high orders") {
  KernelSpec k{2, 1.0, 0.5, 1.0, std::nullopt};
  std::vector<double> z{1.0, 0.5};
  std::vector<int> alpha{2, 1};
  CHECK_THROWS_AS(a2_ratio(k, z, alpha), std::invalid_argument);
}

TEST_CASE("smoothstep endpoints and exact complement") {
  CHECK(smoothstep(-1.0) == 0.0);
  CHECK(smoothstep(0.0) == 0.0);
  CHECK(smoothstep(1.0) == 1.0);
  CHECK(smoothstep(2.0) == 1.0);
  CHECK(smoothstep(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    double t = i / 100.0;
    double v = smoothstep(t);
    CHECK(v >= prev - 1e-16);
    prev = v;
    CHECK(smoothstep(t) + smoothstep(1.0 - t) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("shell and annulus cutoffs") {
  CHECK(eta_shell(0.3) == 1.0);
  CHECK(eta_shell(1.0) == 1.0);
  CHECK(eta_shell(2.0) == 0.0);
  CHECK(eta_shell(5.0) == 0.0);
  CHECK(phi_annulus(0.5) == 0.0);
  CHECK(phi_annulus(1.0) == 0.0);
  CHECK(phi_annulus(2.0) == 1.0);
  double v = phi_annulus(1.5);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
  // phi = 1 - eta through the transition, by construction
  for (int i = 0; i <= 50; ++i) {
    double r = 1.0 + i / 50.0;
    CHECK(phi_annulus(r) == doctest::Approx(1.0 - eta_shell(r)).epsilon(1e-14));
  }
}

TEST_CASE("partition bump sums to one and has the right support") {
  CHECK(partition_bump(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(partition_bump(0.6) == 0.0);
  CHECK(partition_bump(-0.61) == 0.0);
  CHECK(partition_bump(0.7) == 0.0);
  double mid = partition_bump(0.5);
  CHECK(mid == doctest::Approx(0.5).epsilon(1e-10));

  for (double t : {0.13, 0.5, 0.61, -1.97, 0.003}) {
    double s = 0.0;
    for (int j = -4; j <= 4; ++j) s += partition_bump(t - j);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
  for (int i = 0; i <= 80; ++i) {
    double t = -2.0 + 4.0 * i / 80.0;
    double s = 0.0;
    for (int j = -4; j <= 4; ++j) s += partition_bump(t - j);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("partition bump integrates to one") {
  // Simpson oracle over the full support; the convolution of a unit-mass
  // mollifier with a unit-length indicator has integral exactly 1.
  int n = 1200;
  double a = -0.6, b = 0.6, h = (b - a) / n;
  double s = partition_bump(a) + partition_bump(b);
  for (int i = 1; i < n; ++i)
    s += partition_bump(a + i * h) * (i % 2 ? 4.0 : 2.0);
  s *= h / 3.0;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tensor bump plateau and support") {
  TensorBump b{{{-0.4, 0.4}, {-0.2, 0.3}}, 0.1};
  validate(b);
  std::vector<double> inside{0.0, 0.1};
  CHECK(tensor_bump_eval(b, inside) == 1.0);
  std::vector<double> corner{-0.4, 0.3};
  CHECK(tensor_bump_eval(b, corner) == 1.0);
  std::vector<double> outside{0.55, 0.0};
  CHECK(tensor_bump_eval(b, outside) == 0.0);
  std::vector<double> transition{0.45, 0.0};
  double v = tensor_bump_eval(b, transition);
  CHECK(v > 0.0);
  CHECK(v < 1.0);

  TensorBump bad{{{0.4, -0.4}}, 0.1};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  TensorBump bad2{{{-0.4, 0.4}}, 0.0};
  CHECK_THROWS_AS(validate(bad2), std::invalid_argument);
}

TEST_CASE("cutoff_eval dispatch") {
  CutoffSpec eta{CutoffKind::EtaShell, {}};
  std::vector<double> pt{0.6, 0.8};  // |pt| = 1
  CHECK(cutoff_eval(eta, pt) == 1.0);
  CHECK(cutoff_eval(eta, -0.5) == 1.0);
  CutoffSpec phi{CutoffKind::PhiAnnulus, {}};
  CHECK(cutoff_eval(phi, 1.5) == doctest::Approx(1.0 - eta_shell(1.5)).epsilon(1e-14));
  CutoffSpec part{CutoffKind::PartitionBump, {}};
  CHECK(cutoff_eval(part, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CutoffSpec tb{CutoffKind::TensorBump, TensorBump{{{-1.0, 1.0}}, 0.5}};
  CHECK(cutoff_eval(tb, 0.0) == 1.0);
}

TEST_CASE("dyadic piece is supported in the closed annulus [1/2, 2]") {
  KernelSpec k{2, 0.75, 0.25, 1.0, std::nullopt};
  std::vector<double> u{0.4, 0.0};
  CHECK(dyadic_piece(k, u) == 0.0);
  u = {0.5, 0.0};
  CHECK(dyadic_piece(k, u) == 0.0);
  u = {2.0, 0.0};
  CHECK(dyadic_piece(k, u) == 0.0);
  u = {1.0, 0.0};
  CHECK(dyadic_piece(k, u) == doctest::Approx(1.0).epsilon(1e-14));
  u = {1.2, 0.9};  // |u| = 1.5
  CHECK(dyadic_piece(k, u) > 0.0);
}

TEST_CASE("dyadic reconstruction telescopes back to the kernel") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> logr(-12.0, 4.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<KernelSpec> kernels = {
      {2, 0.5, 0.5, 1.0, std::nullopt},
      {3, 1.0, 1.0, 2.5, std::nullopt},
      {3, 1.5, 0.25, 1.0, AngularCutoff{0.2}},
  };
  for (const auto& k : kernels) {
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> z(k.ambient_dim);
      double n = 0.0;
      for (auto& zi : z) {
        zi = gauss(rng);
        n += zi * zi;
      }
      if (n < 1e-12) continue;
      double scale = std::exp2(logr(rng)) / std::sqrt(n);
      for (auto& zi : z) zi *= scale;
      double kv = kernel_eval(k, z);
      double rv = dyadic_reconstruct(k, z);
      CHECK(rv == doctest::Approx(kv).epsilon(1e-10));
    }
  }
  // the tiny-|z| case needs large positive levels
  KernelSpec k{2, 1.0, 0.5, 1.0, std::nullopt};
  std::vector<double> z{std::exp2(-10.0), 0.0};
  CHECK(dyadic_reconstruct(k, z) ==
        doctest::Approx(std::exp2(10.0)).epsilon(1e-10));
}

TEST_CASE("at most three dyadic levels are active") {
  KernelSpec k{2, 1.0, 0.5, 1.0, std::nullopt};
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> logr(-8.0, 8.0);
  for (int trial = 0; trial < 200; ++trial) {
    double r = std::exp2(logr(rng));
    std::vector<double> z{r, 0.0};
    int active = 0;
    for (int j = -16; j <= 16; ++j) {
      std::vector<double> u{std::exp2(j) * z[0], 0.0};
      if (dyadic_piece(k, u) != 0.0) ++active;
    }
    CHECK(active <= 3);
    CHECK(active >= 1);
  }
}

TEST_CASE("kernel spec validation") {
  KernelSpec ok{3, 1.0, 1.0, 1.0, std::nullopt};
  validate(ok);
  KernelSpec bad_p{3, 0.0, 1.0, 1.0, std::nullopt};
  CHECK_THROWS_AS(validate(bad_p), std::invalid_argument);
  KernelSpec big_p{3, 2.5, 0.0, 1.0, std::nullopt};
  CHECK_THROWS_AS(validate(big_p), std::invalid_argument);
  KernelSpec bad_m{3, 1.0, 2.0, 1.0, std::nullopt};
  CHECK_THROWS_AS(validate(bad_m), std::invalid_argument);
  KernelSpec bad_c{3, 1.0, 1.0, 1.0, AngularCutoff{0.0}};
  CHECK_THROWS_AS(validate(bad_c), std::invalid_argument);
}
