// Throughput comparison of the serial reference ensemble loop against the
// OpenMP worker pool, plus raw DSP tick throughput. Both ensemble paths must
// produce identical results; the benchmark asserts that on the fly.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "pfc/config.hpp"
#include "pfc/ensemble.hpp"
#include "pfc/sweep.hpp"

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
  int n_traj = argc > 1 ? std::atoi(argv[1]) : 32;

  pfc::ExperimentConfig cfg = pfc::default_config(pfc::Mode::radial);
  cfg.sim.max_time = 0.1;
  cfg.master_seed = 777;
  const pfc::ControllerConfig ctrl = pfc::resolved_controller(cfg);
  const pfc::OpenLoopDrive drive = cfg.open_loop;
  const pfc::EnsembleTask task = pfc::make_task(cfg, &ctrl, &drive);

  std::printf("ensemble benchmark: %d radial trajectories, %.3f s sim time each\n", n_traj,
              cfg.sim.max_time);

  auto t0 = Clock::now();
  const auto serial = pfc::run_ensemble_serial(n_traj, task, cfg.master_seed);
  const double t_serial = seconds_since(t0);

  const int threads = omp_get_max_threads();
  t0 = Clock::now();
  const auto parallel = pfc::run_ensemble(n_traj, task, cfg.master_seed, threads);
  const double t_parallel = seconds_since(t0);

  bool identical = serial.size() == parallel.size();
  for (size_t i = 0; identical && i < serial.size(); ++i)
    identical = serial[i].storage_time == parallel[i].storage_time &&
                serial[i].escaped == parallel[i].escaped &&
                serial[i].n_detected == parallel[i].n_detected;

  std::printf("serial reference: %8.3f s  (%.1f traj/s)\n", t_serial, n_traj / t_serial);
  std::printf("openmp x%-2d      : %8.3f s  (%.1f traj/s)  speedup %.2fx\n", threads, t_parallel,
              n_traj / t_parallel, t_serial / t_parallel);
  std::printf("results identical: %s\n", identical ? "yes" : "NO");

  // raw controller throughput at the 8 ns reference tick
  pfc::ExperimentConfig ax = pfc::default_config(pfc::Mode::axial);
  pfc::FeedbackController fc(pfc::resolved_controller(ax));
  const long n_ticks = 10'000'000;
  t0 = Clock::now();
  double sink = 0.0;
  for (long i = 0; i < n_ticks; ++i) sink += fc.process_tick(i & 1).modulation;
  const double t_dsp = seconds_since(t0);
  std::printf("dsp pipeline     : %.1f Mticks/s (sink %g)\n", n_ticks / t_dsp / 1e6, sink);

  return identical ? 0 : 1;
}
