#include "oscint/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace oscint {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument("geometry: " + msg);
}

void check_dim(const SurfaceSpec& s, std::span<const double> y) {
  require(static_cast<int>(y.size()) == s.dim_base,
          "point dimension " + std::to_string(y.size()) +
              " does not match surface dim_base " +
              std::to_string(s.dim_base));
}

}  // namespace

double SurfaceSpec::sup_height() const {
  return std::visit(
      [&](const auto& sh) -> double {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, ZeroShape>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, SineProductShape>) {
          return std::abs(sh.amplitude);
        } else if constexpr (std::is_same_v<T, GaussianBumpShape>) {
          return std::abs(sh.amplitude);
        } else {
          double t = 0.0;
          for (const auto& term : sh.terms) t += term.sup_height();
          return t;
        }
      },
      shape);
}

double SurfaceSpec::sup_gradient() const {
  return std::visit(
      [&](const auto& sh) -> double {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, ZeroShape>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, SineProductShape>) {
          // |grad|^2 is multiaffine in cos^2(f_i y_i), so the sup sits at a
          // vertex where exactly one factor survives.
          double fmax = 0.0;
          for (double f : sh.frequency) fmax = std::max(fmax, f);
          return std::abs(sh.amplitude) * fmax;
        } else if constexpr (std::is_same_v<T, GaussianBumpShape>) {
          // |grad| = |A| r/w^2 exp(-r^2/2w^2), maximal at r = w.
          return std::abs(sh.amplitude) * std::exp(-0.5) / sh.width;
        } else {
          double t = 0.0;
          for (const auto& term : sh.terms) t += term.sup_gradient();
          return t;
        }
      },
      shape);
}

double SurfaceSpec::sup_hessian() const {
  return std::visit(
      [&](const auto& sh) -> double {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, ZeroShape>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, SineProductShape>) {
          double f2 = 0.0;
          for (double f : sh.frequency) f2 += f * f;
          return std::abs(sh.amplitude) * f2;
        } else if constexpr (std::is_same_v<T, GaussianBumpShape>) {
          return std::abs(sh.amplitude) / (sh.width * sh.width);
        } else {
          double t = 0.0;
          for (const auto& term : sh.terms) t += term.sup_hessian();
          return t;
        }
      },
      shape);
}

SurfaceSpec make_zero_surface(int dim_base) {
  require(dim_base >= 1, "dim_base must be >= 1");
  return SurfaceSpec{dim_base, ZeroShape{}};
}

SurfaceSpec make_sine_product(int dim_base, double amplitude,
                              std::vector<double> frequency) {
  require(dim_base >= 1, "dim_base must be >= 1");
  require(static_cast<int>(frequency.size()) == dim_base,
          "frequency list must have dim_base entries");
  for (double f : frequency) require(f > 0.0, "frequencies must be positive");
  return SurfaceSpec{dim_base, SineProductShape{amplitude, std::move(frequency)}};
}

SurfaceSpec make_gaussian_bump(int dim_base, double amplitude, double width) {
  require(dim_base >= 1, "dim_base must be >= 1");
  require(width > 0.0, "width must be positive");
  return SurfaceSpec{dim_base, GaussianBumpShape{amplitude, width}};
}

SurfaceSpec surface_sum(SurfaceSpec a, SurfaceSpec b) {
  require(a.dim_base == b.dim_base, "summands must share dim_base");
  SumShape sum;
  sum.terms.push_back(std::move(a));
  sum.terms.push_back(std::move(b));
  int dim = sum.terms.front().dim_base;
  return SurfaceSpec{dim, std::move(sum)};
}

void validate(const SurfaceSpec& s) {
  require(s.dim_base >= 1, "dim_base must be >= 1");
  std::visit(
      [&](const auto& sh) {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, SineProductShape>) {
          require(static_cast<int>(sh.frequency.size()) == s.dim_base,
                  "frequency list must have dim_base entries");
          for (double f : sh.frequency)
            require(f > 0.0, "frequencies must be positive");
        } else if constexpr (std::is_same_v<T, GaussianBumpShape>) {
          require(sh.width > 0.0, "width must be positive");
        } else if constexpr (std::is_same_v<T, SumShape>) {
          require(!sh.terms.empty(), "empty surface sum");
          for (const auto& term : sh.terms) {
            require(term.dim_base == s.dim_base, "sum term dim mismatch");
            validate(term);
          }
        }
      },
      s.shape);
}

void validate(const OscillationParams& p) {
  require(p.epsilon > 0.0 && p.epsilon <= 1.0, "epsilon must be in (0, 1]");
  require(p.gamma > 1.5, "oscillation gamma must be > 3/2");
}

double surface_height(const SurfaceSpec& s, std::span<const double> y) {
  check_dim(s, y);
  return std::visit(
      [&](const auto& sh) -> double {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, ZeroShape>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, SineProductShape>) {
          double v = sh.amplitude;
          for (int i = 0; i < s.dim_base; ++i) v *= std::sin(sh.frequency[i] * y[i]);
          return v;
        } else if constexpr (std::is_same_v<T, GaussianBumpShape>) {
          double r2 = 0.0;
          for (double yi : y) r2 += yi * yi;
          return sh.amplitude * std::exp(-r2 / (2.0 * sh.width * sh.width));
        } else {
          double v = 0.0;
          for (const auto& term : sh.terms) v += surface_height(term, y);
          return v;
        }
      },
      s.shape);
}

std::vector<double> surface_gradient(const SurfaceSpec& s,
                                     std::span<const double> y) {
  check_dim(s, y);
  std::vector<double> g(s.dim_base, 0.0);
  std::visit(
      [&](const auto& sh) {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, SineProductShape>) {
          for (int j = 0; j < s.dim_base; ++j) {
            double v = sh.amplitude * sh.frequency[j] * std::cos(sh.frequency[j] * y[j]);
            for (int i = 0; i < s.dim_base; ++i)
              if (i != j) v *= std::sin(sh.frequency[i] * y[i]);
            g[j] = v;
          }
        } else if constexpr (std::is_same_v<T, GaussianBumpShape>) {
          double r2 = 0.0;
          for (double yi : y) r2 += yi * yi;
          double w2 = sh.width * sh.width;
          double e = sh.amplitude * std::exp(-r2 / (2.0 * w2));
          for (int j = 0; j < s.dim_base; ++j) g[j] = -y[j] / w2 * e;
        } else if constexpr (std::is_same_v<T, SumShape>) {
          for (const auto& term : sh.terms) {
            auto gt = surface_gradient(term, y);
            for (int j = 0; j < s.dim_base; ++j) g[j] += gt[j];
          }
        }
      },
      s.shape);
  return g;
}

double measure_weight(const SurfaceSpec& s, std::span<const double> y) {
  auto g = surface_gradient(s, y);
  double g2 = 0.0;
  for (double gi : g) g2 += gi * gi;
  return std::sqrt(1.0 + g2);
}

SurfaceSpec oscillate(const SurfaceSpec& s, const OscillationParams& p) {
  validate(p);
  validate(s);
  double scale = std::pow(p.epsilon, p.gamma);
  return std::visit(
      [&](const auto& sh) -> SurfaceSpec {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, ZeroShape>) {
          return SurfaceSpec{s.dim_base, ZeroShape{}};
        } else if constexpr (std::is_same_v<T, SineProductShape>) {
          SineProductShape out;
          out.amplitude = scale * sh.amplitude;
          out.frequency.reserve(sh.frequency.size());
          for (double f : sh.frequency) out.frequency.push_back(f / p.epsilon);
          return SurfaceSpec{s.dim_base, std::move(out)};
        } else if constexpr (std::is_same_v<T, GaussianBumpShape>) {
          return SurfaceSpec{
              s.dim_base,
              GaussianBumpShape{scale * sh.amplitude, p.epsilon * sh.width}};
        } else {
          SumShape out;
          out.terms.reserve(sh.terms.size());
          for (const auto& term : sh.terms) out.terms.push_back(oscillate(term, p));
          return SurfaceSpec{s.dim_base, std::move(out)};
        }
      },
      s.shape);
}

Vec3 mat3_apply(const Mat3& m, const Vec3& v) {
  return Vec3{m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
              m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
              m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

Mat3 householder_to_normal(const Vec3& nu) {
  double n2 = nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2];
  require(std::abs(std::sqrt(n2) - 1.0) <= 1e-12, "normal must be a unit vector");
  Vec3 w{-nu[0], -nu[1], 1.0 - nu[2]};  // e3 - nu
  double ww = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
  Mat3 m{1, 0, 0, 0, 1, 0, 0, 0, 1};
  if (ww < 1e-28) return m;  // nu == e3
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[3 * i + j] -= 2.0 * w[i] * w[j] / ww;
  return m;
}

}  // namespace oscint
