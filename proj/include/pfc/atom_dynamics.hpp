#ifndef PFC_ATOM_DYNAMICS_HPP
#define PFC_ATOM_DYNAMICS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "pfc/cavity_physics.hpp"
#include "pfc/feedback_dsp.hpp"
#include "pfc/params.hpp"
#include "pfc/rng.hpp"
#include "pfc/vec3.hpp"

namespace pfc {

struct AtomState {
  Vec3 pos;
  Vec3 vel;  // m/s
  double t = 0.0;
};

// Fixed sinusoidal trap modulation, no feedback.
struct OpenLoopDrive {
  double modulation = 0.0;  // fractional depth amplitude
  double freq = 0.0;        // Hz
  double phase = 0.0;       // rad
};

enum class EscapeChannel { none, energy, radial };

struct DiagnosticsRow {
  double t;
  Vec3 pos;
  double energy;        // J, unmodulated depth
  double transmission;
  double magnitude;     // inferred oscillation magnitude (count units)
  double lo_phase;      // rad
  double drive;         // applied modulation fraction
};

struct TrajectoryResult {
  double storage_time = 0.0;
  bool escaped = false;
  EscapeChannel escape_channel = EscapeChannel::none;
  int64_t n_detected = 0;
  int64_t n_scatter_events = 0;
  std::vector<uint32_t> tick_counts;        // filled when record_tick_counts
  std::vector<DiagnosticsRow> diagnostics;  // filled when record_diagnostics
};

// Thermal initial state: Gaussian position spread around the trap center,
// Maxwell-Boltzmann velocity with <KE> = ke_factor * depth.
AtomState sample_initial_state(const TrapParams& t, Rng& rng,
                               const InitialStateOptions& opts = {});

// One stochastic integration step: velocity-Verlet under the modulated
// potential, then a Bernoulli-thinned recoil kick at the free-space
// scattering rate. Throws on dt <= 0 or rate*dt > 0.1.
AtomState step(const AtomState& s, const TrapParams& t, const CavityParams& c,
               const NoiseModel& n, double mod, double dt, Rng& rng);

// Poisson photon count over one binning interval.
long sample_detections(double g, const CavityParams& c, double dt, Rng& rng);

// Total energy with the unmodulated depth (used by the escape criterion).
double total_energy(const AtomState& s, const TrapParams& t);

// Full closed-loop trajectory. Exactly one of controller / drive may be
// set (both empty = free evolution under the probe). Deterministic given
// the seed.
TrajectoryResult simulate_trajectory(const SimConfig& sim, const TrapParams& trap,
                                     const CavityParams& cavity, const NoiseModel& noise,
                                     const ControllerConfig* controller,
                                     const OpenLoopDrive* drive, uint64_t seed,
                                     const InitialStateOptions& init_opts = {});

}  // namespace pfc

#endif
