#ifndef PFC_CONFIG_HPP
#define PFC_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pfc/atom_dynamics.hpp"
#include "pfc/feedback_dsp.hpp"
#include "pfc/params.hpp"

namespace pfc {

enum class Mode { radial, axial, open_loop, no_feedback };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct SweepSpec {
  std::string parameter;        // e.g. phi_pfb, f_pfb, mod_max
  std::vector<double> values;   // explicit list, or linspace(start, stop, count)
  bool enabled = false;
};

struct ExperimentConfig {
  Mode mode = Mode::radial;
  CavityParams cavity;
  TrapParams trap;
  NoiseModel noise;
  SimConfig sim;
  ControllerConfig controller;
  InitialStateOptions init;
  OpenLoopDrive open_loop;  // used in open_loop mode
  SweepSpec sweep;
  int n_trajectories = 150;
  uint64_t master_seed = 12345;
  int workers = 0;  // 0 = all cores
  std::string output_path = "results";

  void validate() const;  // throws ConfigError with a field path
  std::string digest() const;  // 16-hex-char key over all inputs
  std::string canonical_text() const;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mode-consistent defaults: radial runs decimated at a 1 us tick with
// f_pfb = 7 kHz; axial runs the 8 ns reference tick at f_pfb = 625 kHz with
// a 10x probe.
ExperimentConfig default_config(Mode mode);

// Controller config with mag_ref resolved (auto value 0 maps to the
// full-swing count magnitude 0.5 * empty_detect_rate * tick).
ControllerConfig resolved_controller(const ExperimentConfig& cfg);

// Key-value config text with [section] headers; unknown keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Apply one "section.key=value" override on top of a parsed config.
void apply_override(ExperimentConfig& cfg, const std::string& spec);

// Set the swept parameter on a copy of the config (used per sweep point).
void set_swept_parameter(ExperimentConfig& cfg, const std::string& name, double value);

}  // namespace pfc

#endif
