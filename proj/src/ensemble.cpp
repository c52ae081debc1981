#include "pfc/ensemble.hpp"

#include <omp.h>

#include <exception>
#include <stdexcept>

namespace pfc {

namespace {

TrajectoryResult run_one(const EnsembleTask& task, uint64_t master_seed, int index) {
  const uint64_t seed = splitmix64(splitmix64(master_seed) ^ static_cast<uint64_t>(index + 1));
  return simulate_trajectory(task.sim, task.trap, task.cavity, task.noise, task.controller,
                             task.drive, seed, task.init);
}

}  // namespace

std::vector<TrajectoryResult> run_ensemble(int n_traj, const EnsembleTask& task,
                                           uint64_t master_seed, int workers) {
  if (n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
  std::vector<TrajectoryResult> results(static_cast<size_t>(n_traj));
  std::exception_ptr error;

  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n_traj; ++i) {
    try {
      results[static_cast<size_t>(i)] = run_one(task, master_seed, i);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return results;
}

std::vector<TrajectoryResult> run_ensemble_serial(int n_traj, const EnsembleTask& task,
                                                  uint64_t master_seed) {
  if (n_traj < 1) throw std::invalid_argument("run_ensemble_serial: n_traj must be >= 1");
  std::vector<TrajectoryResult> results;
  results.reserve(static_cast<size_t>(n_traj));
  for (int i = 0; i < n_traj; ++i) results.push_back(run_one(task, master_seed, i));
  return results;
}

}  // namespace pfc
