// Serial vs OpenMP throughput comparison for the three parallel kernels:
// the red-black relaxation solver, the walk trial farm, and the Monte Carlo
// race farm.  Results are identical across thread counts by construction;
// this target only measures speed.

#include <chrono>
#include <cstdio>

#include "walklab/bracket.hpp"
#include "walklab/experiment.hpp"
#include "walklab/hitting.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace walklab;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename Fn>
double timed(Fn&& fn) {
  const auto t0 = Clock::now();
  fn();
  return seconds_since(t0);
}

}  // namespace

int main() {
#ifdef _OPENMP
  const int max_threads = omp_get_max_threads();
#else
  const int max_threads = 1;
#endif
  std::printf("walklab benchmark (max threads: %d)\n\n", max_threads);
  std::printf("%-34s %10s %10s %8s\n", "kernel", "serial[s]", "parallel[s]", "speedup");

  {
    const double ts = timed([&] { exact_bracket_2d(0, 160, 1e-12, 1); });
    const double tp = timed([&] { exact_bracket_2d(0, 160, 1e-12, max_threads); });
    std::printf("%-34s %10.3f %10.3f %7.2fx\n", "bracket solve d=2 L=160", ts, tp, ts / tp);
  }
  {
    ExperimentConfig config;
    config.d = 2;
    config.horizon = 1 << 16;
    config.trials = 32;
    config.beta_source.kind = BetaSourceSpec::Kind::UserValue;
    config.beta_source.p_value = 0.5;
    config.output_dir = "";
    config.threads = 1;
    const double ts = timed([&] { run_experiment(config, false); });
    config.threads = max_threads;
    const double tp = timed([&] { run_experiment(config, false); });
    std::printf("%-34s %10.3f %10.3f %7.2fx\n", "trial farm d=2 2^16 x32", ts, tp, ts / tp);
  }
  {
    const JumpTables jumps = JumpTables::build(2, {8, 32, 128}, 1e-13, max_threads);
    const auto run = [&](int threads) {
      estimate_return_before_neighbor(2, 0, CutoffPolicy::radius_cap(2000), 50000, 7, &jumps,
                                      threads);
    };
    const double ts = timed([&] { run(1); });
    const double tp = timed([&] { run(max_threads); });
    std::printf("%-34s %10.3f %10.3f %7.2fx\n", "race farm 5e4 trials cap 2e3", ts, tp, ts / tp);
  }
  return 0;
}
