#ifndef PFC_PARAMS_HPP
#define PFC_PARAMS_HPP

#include <cstdint>

#include "pfc/constants.hpp"

namespace pfc {

// Atom-cavity constants and probe settings. All decay rates and the
// coupling g0 are angular (rad/s); detection / scattering rates are
// plain event rates (1/s).
struct CavityParams {
  double g0 = two_pi * 16.0e6;       // rad/s, maximal coupling
  double kappa = two_pi * 1.5e6;     // rad/s, cavity field decay
  double gamma = two_pi * 3.0e6;     // rad/s, atomic dipole decay
  double mode_waist = 19.1e-6;       // m
  double probe_wavelength = 780.0e-9;   // m
  double trap_wavelength = 784.7e-9;    // m
  double cavity_length = 260.0e-6;      // m
  // Detected rate at empty-cavity transmission. The detector efficiency is a
  // free calibration: the default puts a thermal atom's detected rate near
  // 4.5 kHz, just below the radial trap frequency.
  double empty_detect_rate = 1.0e7;     // 1/s
  double max_scatter_rate = 9.5e4;      // 1/s, peak free-space scattering

  void validate() const;  // throws std::invalid_argument
};

// Standing-wave dipole trap.
struct TrapParams {
  double depth = k_boltzmann * 850.0e-6;     // J
  double waist = 19.1e-6;                    // m
  double wavelength = 784.7e-9;              // m
  double atom_mass = 85.0 * atomic_mass_unit;  // kg

  void validate() const;
};

struct TrapFrequencies {
  double omega_radial;  // rad/s
  double omega_axial;   // rad/s
};

// Measurement back-action model. recoil_momentum defaults to h/lambda_probe;
// kick_scale is the calibration dial for motional decoherence.
struct NoiseModel {
  double recoil_momentum = h_planck / 780.0e-9;  // kg m/s
  double kick_scale = 0.0;
  double axial_extra_damping = 0.0;  // 1/s, optional cavity-cooling stand-in

  void validate() const;
};

struct SimConfig {
  double dt_physics = 1.0e-6;        // s
  double max_time = 0.5;             // s
  double escape_radius = 3.0 * 19.1e-6;  // m
  double trapped_threshold = 2.0e-3;     // s, qualification as trapped
  uint64_t rng_seed = 1;

  // artifact plumbing
  bool pin_axial = true;             // freeze z at the antinode (radial runs)
  bool record_tick_counts = false;
  bool record_diagnostics = false;
  int diag_stride = 100;             // controller ticks between diagnostic rows

  void validate(double omega_axial) const;
};

// Initial-state sampler knobs. ke_factor scales the mean kinetic energy in
// units of the trap depth; reject_unbound resamples until the total energy
// is negative (trajectories start trapped).
struct InitialStateOptions {
  double ke_factor = 0.5;
  double spread_factor = 1.0;
  bool reject_unbound = true;
};

}  // namespace pfc

#endif
