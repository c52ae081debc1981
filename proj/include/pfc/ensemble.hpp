#ifndef PFC_ENSEMBLE_HPP
#define PFC_ENSEMBLE_HPP

#include <cstdint>
#include <vector>

#include "pfc/atom_dynamics.hpp"

namespace pfc {

// Everything one trajectory needs; immutable during a run.
struct EnsembleTask {
  SimConfig sim;
  TrapParams trap;
  CavityParams cavity;
  NoiseModel noise;
  const ControllerConfig* controller = nullptr;  // optional
  const OpenLoopDrive* drive = nullptr;          // optional
  InitialStateOptions init;
};

// Trajectory i runs on the RNG stream derived from (master_seed, i), so the
// result sequence is independent of the execution schedule.
//
// run_ensemble dispatches trajectories to an OpenMP worker pool
// (workers <= 0 uses all cores). run_ensemble_serial is the plain-loop
// reference; both produce bit-identical results for the same seed.
std::vector<TrajectoryResult> run_ensemble(int n_traj, const EnsembleTask& task,
                                           uint64_t master_seed, int workers = 0);
std::vector<TrajectoryResult> run_ensemble_serial(int n_traj, const EnsembleTask& task,
                                                  uint64_t master_seed);

}  // namespace pfc

#endif
