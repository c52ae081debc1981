#include "pfc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pfc/cavity_physics.hpp"

namespace pfc {

namespace {

constexpr double kDefaultKickScale = 2.05;  // calibrated; see scripts/calibrate_kick_scale.sh

std::string fmt(double v) {
  char buf[48];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string fmt_u64(uint64_t v) {
  char buf[24];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (...) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long n = std::stol(v, &used);
    if (trim(v.substr(used)).empty()) return n;
  } catch (...) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    unsigned long long n = std::stoull(v, &used);
    if (trim(v.substr(used)).empty()) return n;
  } catch (...) {
  }
  throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list of numbers");
  return out;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::radial: return "radial";
    case Mode::axial: return "axial";
    case Mode::open_loop: return "open_loop";
    case Mode::no_feedback: return "no_feedback";
  }
  return "radial";
}

Mode mode_from_string(const std::string& s) {
  if (s == "radial") return Mode::radial;
  if (s == "axial") return Mode::axial;
  if (s == "open_loop") return Mode::open_loop;
  if (s == "no_feedback") return Mode::no_feedback;
  throw ConfigError("mode: expected radial|axial|open_loop|no_feedback, got '" + s + "'");
}

ExperimentConfig default_config(Mode mode) {
  ExperimentConfig c;
  c.mode = mode;
  c.noise.kick_scale = kDefaultKickScale;
  c.noise.recoil_momentum = h_planck / c.cavity.probe_wavelength;
  c.sim.escape_radius = 3.0 * c.trap.waist;

  switch (mode) {
    case Mode::radial:
    case Mode::no_feedback:
    case Mode::open_loop:
      // decimated radial mode: axial motion frozen, 1 us physics step
      c.sim.dt_physics = 1.0e-6;
      c.sim.max_time = 0.5;
      c.sim.pin_axial = true;
      c.controller.tick = 1.0e-6;
      c.controller.f_pfb = 7.0e3;
      c.controller.phi_pfb = 0.5 * pi;
      c.controller.prefilter_len = 1;
      c.controller.mod_max = 0.11;
      // calibrated to the simulated signal scale: a single detected photon in
      // one RBW window reads 2/143 ~ 0.014, warm coherent bursts 0.02-0.05
      c.controller.mag_ref = 0.02;
      c.n_trajectories = 150;
      break;
    case Mode::axial:
      // 8 ns reference tick, probe power x10 (scales detection and
      // free-space scattering alike)
      c.sim.dt_physics = 8.0e-9;
      c.sim.max_time = 0.03;
      c.sim.pin_axial = false;
      c.cavity.empty_detect_rate = 1.0e8;
      c.cavity.max_scatter_rate = 9.5e5;
      c.controller.tick = 8.0e-9;
      c.controller.f_pfb = 625.0e3;
      c.controller.phi_pfb = 0.5 * pi;
      c.controller.prefilter_len = 17;  // 3.2 MHz boxcar at 125 MS/s
      c.controller.mod_max = 0.36;
      c.controller.mag_ref = 0.05;  // calibrated to the simulated signal scale
      c.n_trajectories = 100;
      break;
  }
  if (mode == Mode::open_loop) {
    c.noise.kick_scale = 0.0;
    c.open_loop.freq = 2.0 * derive_trap_frequencies(c.trap).omega_radial / two_pi;
    c.open_loop.modulation = 0.06;
  }
  return c;
}

ControllerConfig resolved_controller(const ExperimentConfig& cfg) {
  ControllerConfig ctrl = cfg.controller;
  if (ctrl.mag_ref <= 0.0)
    ctrl.mag_ref = ControllerConfig::mag_ref_for(cfg.cavity.empty_detect_rate, ctrl.tick);
  return ctrl;
}

void ExperimentConfig::validate() const {
  auto rethrow = [](const char* section, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      throw ConfigError(std::string(section) + ": " + e.what());
    }
  };
  rethrow("cavity", [&] { cavity.validate(); });
  rethrow("trap", [&] { trap.validate(); });
  rethrow("noise", [&] { noise.validate(); });
  rethrow("sim", [&] { sim.validate(derive_trap_frequencies(trap).omega_axial); });
  if (mode == Mode::radial || mode == Mode::axial) {
    rethrow("controller", [&] { resolved_controller(*this).validate(); });
    const double ratio = controller.tick / sim.dt_physics;
    if (std::fabs(ratio - std::lround(ratio)) > 1e-9 * ratio || ratio < 0.999999)
      throw ConfigError("controller.tick: must be an integer multiple of sim.dt_physics");
  }
  if (mode == Mode::open_loop) {
    if (!(std::fabs(open_loop.modulation) < 1.0))
      throw ConfigError("open_loop.modulation: |modulation| must be < 1");
    if (!(open_loop.freq > 0.0)) throw ConfigError("open_loop.freq_hz: must be positive");
  }
  if (n_trajectories < 1) throw ConfigError("experiment.n_trajectories: must be >= 1");
  if (!(init.ke_factor >= 0.0)) throw ConfigError("init.ke_factor: must be >= 0");
  if (!(init.spread_factor >= 0.0)) throw ConfigError("init.spread_factor: must be >= 0");
  if (sweep.enabled) {
    if (sweep.values.empty()) throw ConfigError("sweep: needs at least one value");
    ExperimentConfig probe = *this;
    probe.sweep.enabled = false;
    for (double v : sweep.values) {
      set_swept_parameter(probe, sweep.parameter, v);  // throws on unknown name
    }
  }
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream o;
  o << "mode = " << to_string(mode) << "\n\n";
  o << "[cavity]\n";
  o << "g0_hz = " << fmt(cavity.g0 / two_pi) << "\n";
  o << "kappa_hz = " << fmt(cavity.kappa / two_pi) << "\n";
  o << "gamma_hz = " << fmt(cavity.gamma / two_pi) << "\n";
  o << "mode_waist_m = " << fmt(cavity.mode_waist) << "\n";
  o << "probe_wavelength_m = " << fmt(cavity.probe_wavelength) << "\n";
  o << "trap_wavelength_m = " << fmt(cavity.trap_wavelength) << "\n";
  o << "cavity_length_m = " << fmt(cavity.cavity_length) << "\n";
  o << "empty_detect_rate_hz = " << fmt(cavity.empty_detect_rate) << "\n";
  o << "max_scatter_rate_hz = " << fmt(cavity.max_scatter_rate) << "\n\n";
  o << "[trap]\n";
  o << "depth_uk = " << fmt(trap.depth / k_boltzmann * 1e6) << "\n";
  o << "waist_m = " << fmt(trap.waist) << "\n";
  o << "wavelength_m = " << fmt(trap.wavelength) << "\n";
  o << "atom_mass_u = " << fmt(trap.atom_mass / atomic_mass_unit) << "\n\n";
  o << "[noise]\n";
  o << "kick_scale = " << fmt(noise.kick_scale) << "\n";
  o << "axial_extra_damping_hz = " << fmt(noise.axial_extra_damping) << "\n\n";
  o << "[init]\n";
  o << "ke_factor = " << fmt(init.ke_factor) << "\n";
  o << "spread_factor = " << fmt(init.spread_factor) << "\n";
  o << "reject_unbound = " << (init.reject_unbound ? "true" : "false") << "\n\n";
  o << "[sim]\n";
  o << "dt_physics_s = " << fmt(sim.dt_physics) << "\n";
  o << "max_time_s = " << fmt(sim.max_time) << "\n";
  o << "escape_radius_m = " << fmt(sim.escape_radius) << "\n";
  o << "trapped_threshold_s = " << fmt(sim.trapped_threshold) << "\n";
  o << "pin_axial = " << (sim.pin_axial ? "true" : "false") << "\n";
  o << "record_tick_counts = " << (sim.record_tick_counts ? "true" : "false") << "\n";
  o << "record_diagnostics = " << (sim.record_diagnostics ? "true" : "false") << "\n";
  o << "diag_stride = " << sim.diag_stride << "\n\n";
  o << "[controller]\n";
  o << "tick_s = " << fmt(controller.tick) << "\n";
  o << "f_pfb_hz = " << fmt(controller.f_pfb) << "\n";
  o << "phi_pfb_rad = " << fmt(controller.phi_pfb) << "\n";
  o << "n_periods = " << controller.n_periods << "\n";
  o << "prefilter_len = " << controller.prefilter_len << "\n";
  o << "lock_gain = " << fmt(controller.lock_gain) << "\n";
  o << "mod_max = " << fmt(controller.mod_max) << "\n";
  o << "mag_ref = " << fmt(controller.mag_ref) << "\n\n";
  o << "[open_loop]\n";
  o << "modulation = " << fmt(open_loop.modulation) << "\n";
  o << "freq_hz = " << fmt(open_loop.freq) << "\n";
  o << "phase_rad = " << fmt(open_loop.phase) << "\n\n";
  // workers and output_path are execution details, not result inputs; they
  // stay out of the canonical text so the digest is schedule-independent
  o << "[experiment]\n";
  o << "n_trajectories = " << n_trajectories << "\n";
  o << "master_seed = " << fmt_u64(master_seed) << "\n\n";
  o << "[sweep]\n";
  o << "parameter = " << (sweep.enabled ? sweep.parameter : "") << "\n";
  o << "values = ";
  for (size_t i = 0; i < sweep.values.size(); ++i) o << (i ? "," : "") << fmt(sweep.values[i]);
  o << "\n";
  return o.str();
}

std::string ExperimentConfig::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical_text())));
  return std::string(buf);
}

ExperimentConfig parse_config(const std::string& text) {
  // collect section.key = value pairs first
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    pairs.emplace_back(section.empty() ? key : section + "." + key, value);
  }

  // mode first: it selects the defaults
  Mode mode = Mode::radial;
  for (auto& [k, v] : pairs)
    if (k == "mode") mode = mode_from_string(v);
  ExperimentConfig cfg = default_config(mode);

  double sweep_start = 0.0, sweep_stop = 0.0;
  long sweep_count = 0;
  bool have_range = false;

  for (auto& [key, v] : pairs) {
    if (key == "mode") {
    } else if (key == "cavity.g0_hz") {
      cfg.cavity.g0 = two_pi * parse_double(key, v);
    } else if (key == "cavity.kappa_hz") {
      cfg.cavity.kappa = two_pi * parse_double(key, v);
    } else if (key == "cavity.gamma_hz") {
      cfg.cavity.gamma = two_pi * parse_double(key, v);
    } else if (key == "cavity.mode_waist_m") {
      cfg.cavity.mode_waist = parse_double(key, v);
    } else if (key == "cavity.probe_wavelength_m") {
      cfg.cavity.probe_wavelength = parse_double(key, v);
      cfg.noise.recoil_momentum = h_planck / cfg.cavity.probe_wavelength;
    } else if (key == "cavity.trap_wavelength_m") {
      cfg.cavity.trap_wavelength = parse_double(key, v);
    } else if (key == "cavity.cavity_length_m") {
      cfg.cavity.cavity_length = parse_double(key, v);
    } else if (key == "cavity.empty_detect_rate_hz") {
      cfg.cavity.empty_detect_rate = parse_double(key, v);
    } else if (key == "cavity.max_scatter_rate_hz") {
      cfg.cavity.max_scatter_rate = parse_double(key, v);
    } else if (key == "trap.depth_uk") {
      cfg.trap.depth = k_boltzmann * 1e-6 * parse_double(key, v);
    } else if (key == "trap.waist_m") {
      cfg.trap.waist = parse_double(key, v);
    } else if (key == "trap.wavelength_m") {
      cfg.trap.wavelength = parse_double(key, v);
    } else if (key == "trap.atom_mass_u") {
      cfg.trap.atom_mass = atomic_mass_unit * parse_double(key, v);
    } else if (key == "noise.kick_scale") {
      cfg.noise.kick_scale = parse_double(key, v);
    } else if (key == "noise.axial_extra_damping_hz") {
      cfg.noise.axial_extra_damping = parse_double(key, v);
    } else if (key == "init.ke_factor") {
      cfg.init.ke_factor = parse_double(key, v);
    } else if (key == "init.spread_factor") {
      cfg.init.spread_factor = parse_double(key, v);
    } else if (key == "init.reject_unbound") {
      cfg.init.reject_unbound = parse_bool(key, v);
    } else if (key == "sim.dt_physics_s") {
      cfg.sim.dt_physics = parse_double(key, v);
    } else if (key == "sim.max_time_s") {
      cfg.sim.max_time = parse_double(key, v);
    } else if (key == "sim.escape_radius_m") {
      cfg.sim.escape_radius = parse_double(key, v);
    } else if (key == "sim.trapped_threshold_s") {
      cfg.sim.trapped_threshold = parse_double(key, v);
    } else if (key == "sim.pin_axial") {
      cfg.sim.pin_axial = parse_bool(key, v);
    } else if (key == "sim.record_tick_counts") {
      cfg.sim.record_tick_counts = parse_bool(key, v);
    } else if (key == "sim.record_diagnostics") {
      cfg.sim.record_diagnostics = parse_bool(key, v);
    } else if (key == "sim.diag_stride") {
      cfg.sim.diag_stride = static_cast<int>(parse_int(key, v));
    } else if (key == "controller.tick_s") {
      cfg.controller.tick = parse_double(key, v);
    } else if (key == "controller.f_pfb_hz") {
      cfg.controller.f_pfb = parse_double(key, v);
    } else if (key == "controller.phi_pfb_rad") {
      cfg.controller.phi_pfb = parse_double(key, v);
    } else if (key == "controller.n_periods") {
      cfg.controller.n_periods = static_cast<int>(parse_int(key, v));
    } else if (key == "controller.prefilter_len") {
      cfg.controller.prefilter_len = static_cast<int>(parse_int(key, v));
    } else if (key == "controller.lock_gain") {
      cfg.controller.lock_gain = parse_double(key, v);
    } else if (key == "controller.mod_max") {
      cfg.controller.mod_max = parse_double(key, v);
    } else if (key == "controller.mag_ref") {
      cfg.controller.mag_ref = parse_double(key, v);
    } else if (key == "open_loop.modulation") {
      cfg.open_loop.modulation = parse_double(key, v);
    } else if (key == "open_loop.freq_hz") {
      cfg.open_loop.freq = parse_double(key, v);
    } else if (key == "open_loop.phase_rad") {
      cfg.open_loop.phase = parse_double(key, v);
    } else if (key == "experiment.n_trajectories") {
      cfg.n_trajectories = static_cast<int>(parse_int(key, v));
    } else if (key == "experiment.master_seed") {
      cfg.master_seed = parse_u64(key, v);
    } else if (key == "experiment.workers") {
      cfg.workers = static_cast<int>(parse_int(key, v));
    } else if (key == "experiment.output_path") {
      cfg.output_path = v;
    } else if (key == "sweep.parameter") {
      cfg.sweep.parameter = v;
      cfg.sweep.enabled = !v.empty();
    } else if (key == "sweep.values") {
      if (!v.empty()) cfg.sweep.values = parse_list(key, v);
    } else if (key == "sweep.start") {
      sweep_start = parse_double(key, v);
      have_range = true;
    } else if (key == "sweep.stop") {
      sweep_stop = parse_double(key, v);
      have_range = true;
    } else if (key == "sweep.count") {
      sweep_count = parse_int(key, v);
      have_range = true;
    } else {
      throw ConfigError(key + ": unknown configuration key");
    }
  }

  if (have_range) {
    if (sweep_count < 1) throw ConfigError("sweep.count: must be >= 1 when a range is given");
    cfg.sweep.values.clear();
    for (long i = 0; i < sweep_count; ++i) {
      const double f = sweep_count == 1 ? 0.0 : static_cast<double>(i) / (sweep_count - 1);
      cfg.sweep.values.push_back(sweep_start + f * (sweep_stop - sweep_start));
    }
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& spec) {
  const size_t eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + spec + "': expected section.key=value");
  // reuse the parser: re-parse the canonical text with the override appended
  const std::string key = trim(spec.substr(0, eq));
  const size_t dot = key.find('.');
  std::string text = cfg.canonical_text();
  if (dot == std::string::npos) {
    // top-level key: replace its existing line (canonical text always has one)
    const std::string needle = key + " = ";
    const size_t at = text.rfind(needle, 0) == 0 ? 0 : text.find("\n" + needle);
    if (at == std::string::npos) throw ConfigError("override '" + spec + "': unknown key");
    const size_t line_start = at == 0 ? 0 : at + 1;
    const size_t line_end = text.find('\n', line_start);
    text.replace(line_start, line_end - line_start, key + " = " + trim(spec.substr(eq + 1)));
  } else {
    text += "\n[" + key.substr(0, dot) + "]\n" + key.substr(dot + 1) + " = " + trim(spec.substr(eq + 1)) + "\n";
  }
  cfg = parse_config(text);
}

void set_swept_parameter(ExperimentConfig& cfg, const std::string& name, double value) {
  if (name == "phi_pfb") {
    cfg.controller.phi_pfb = value;
  } else if (name == "f_pfb") {
    cfg.controller.f_pfb = value;
  } else if (name == "mod_max") {
    cfg.controller.mod_max = value;
  } else if (name == "lock_gain") {
    cfg.controller.lock_gain = value;
  } else if (name == "n_periods") {
    cfg.controller.n_periods = static_cast<int>(std::lround(value));
  } else if (name == "kick_scale") {
    cfg.noise.kick_scale = value;
  } else if (name == "empty_detect_rate") {
    cfg.cavity.empty_detect_rate = value;
  } else if (name == "max_scatter_rate") {
    cfg.cavity.max_scatter_rate = value;
  } else if (name == "max_time") {
    cfg.sim.max_time = value;
  } else if (name == "open_loop_phase") {
    cfg.open_loop.phase = value;
  } else if (name == "open_loop_freq") {
    cfg.open_loop.freq = value;
  } else {
    throw ConfigError("sweep.parameter: unknown parameter '" + name + "'");
  }
}

}  // namespace pfc
