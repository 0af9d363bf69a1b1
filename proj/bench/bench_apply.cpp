// Timing comparison of the OpenMP apply against the serial reference,
// plus a bitwise agreement check.  Run with OSCINT_THREADS set to see
// the parallel speedup; on one core the two should be near parity.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "oscint/operators.hpp"
#include "oscint/runner.hpp"

using namespace oscint;

namespace {

double best_of(int reps, const std::vector<cplx>& f,
               const DiscretizedOperator& op, bool parallel,
               std::vector<cplx>& out) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    out = parallel ? apply_forward(op, f) : apply_forward_serial(op, f);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    if (ms < best) best = ms;
  }
  return best;
}

}  // namespace

int main() {
  threads_from_env();

  OperatorConfig c;
  c.source_box = {{-0.5, 0.5}, {-0.5, 0.5}};
  c.source_points = {32, 32};
  c.target_box = {{-0.5, 0.5}, {-0.5, 0.5}};
  c.target_points = {40, 40};
  c.kernel.p = 1.2;
  c.kernel.m = 0.8;
  c.phase = {PhaseKind::Linear, 2.0};
  c.surface = make_sine_product(2, 0.3, {1.0, 2.0});
  c.height = 1.0;
  const DiscretizedOperator op = instantiate(c, 12.0);

  std::vector<cplx> f(static_cast<std::size_t>(op.source.size()));
  for (std::size_t j = 0; j < f.size(); ++j)
    f[j] = cplx(std::cos(0.37 * static_cast<double>(j)),
                std::sin(0.11 * static_cast<double>(j)));

  std::vector<cplx> serial_out, parallel_out;
  best_of(1, f, op, false, serial_out);  // warm-up
  const double t_serial = best_of(3, f, op, false, serial_out);
  const double t_parallel = best_of(3, f, op, true, parallel_out);

  bool identical = serial_out.size() == parallel_out.size();
  for (std::size_t i = 0; identical && i < serial_out.size(); ++i)
    identical = serial_out[i] == parallel_out[i];

  std::printf("pairs            : %lld\n",
              static_cast<long long>(op.source.size() * op.target.size()));
  std::printf("serial apply     : %.2f ms\n", t_serial);
  std::printf("parallel apply   : %.2f ms\n", t_parallel);
  std::printf("speedup          : %.2fx\n", t_serial / t_parallel);
  std::printf("bitwise identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
