#include "pfc/atom_dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pfc {

namespace {

// Velocity-Verlet stepper with the field sample cached between steps. The
// modulation enters as a pure scale factor (1+mod) on the unmodulated
// force, so the cache survives drive updates.
class Stepper {
 public:
  Stepper(const TrapParams& t, const CavityParams& c, const NoiseModel& n, bool pin_axial)
      : trap_(t), cav_(c), noise_(n), pin_axial_(pin_axial), inv_mass_(1.0 / t.atom_mass),
        kick_dv_(n.kick_scale * n.recoil_momentum / t.atom_mass) {}

  void prime(const AtomState& s) { field_ = eval_fields(s.pos, trap_, cav_); }

  const FieldSample& field() const { return field_; }

  long scatter_events() const { return scatter_events_; }

  void advance(AtomState& s, double mod, double dt, Rng& rng) {
    const double scale = (1.0 + mod) * inv_mass_;
    s.vel += (0.5 * dt * scale) * field_.force_unmod;
    s.pos += dt * s.vel;
    if (pin_axial_) s.pos.z = 0.0;
    field_ = eval_fields(s.pos, trap_, cav_);
    s.vel += (0.5 * dt * scale) * field_.force_unmod;

    if (noise_.axial_extra_damping > 0.0 && !pin_axial_)
      s.vel.z *= std::exp(-noise_.axial_extra_damping * dt);

    const double p_sc = scattering_rate(field_.coupling, cav_) * dt;
    if (p_sc > 0.1) {
      std::ostringstream msg;
      msg << "scattering probability " << p_sc << " per step exceeds 0.1 at t=" << s.t
          << "; reduce dt_physics";
      throw std::invalid_argument(msg.str());
    }
    if (rng.uniform() < p_sc) {
      ++scatter_events_;
      // absorption recoil along the cavity axis (random sign), emission
      // recoil in a random direction
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      const Vec3 dir = rng.isotropic_dir();
      if (pin_axial_) {
        s.vel.x += kick_dv_ * dir.x;
        s.vel.y += kick_dv_ * dir.y;
      } else {
        s.vel.z += kick_dv_ * sign;
        s.vel += kick_dv_ * dir;
      }
    }
    if (pin_axial_) s.vel.z = 0.0;
    s.t += dt;
  }

 private:
  const TrapParams& trap_;
  const CavityParams& cav_;
  const NoiseModel& noise_;
  bool pin_axial_;
  double inv_mass_;
  double kick_dv_;
  FieldSample field_{};
  long scatter_events_ = 0;
};

}  // namespace

void SimConfig::validate(double omega_axial) const {
  if (!(dt_physics > 0.0)) throw std::invalid_argument("sim: dt_physics must be positive");
  if (!(max_time > 0.0)) throw std::invalid_argument("sim: max_time must be positive");
  if (!(escape_radius > 0.0)) throw std::invalid_argument("sim: escape_radius must be positive");
  if (!(trapped_threshold >= 0.0)) throw std::invalid_argument("sim: trapped_threshold must be >= 0");
  if (diag_stride < 1) throw std::invalid_argument("sim: diag_stride must be >= 1");
  if (!pin_axial) {
    const double f_axial = omega_axial / two_pi;
    if (dt_physics > 1.0 / (50.0 * f_axial))
      throw std::invalid_argument("sim: dt_physics too coarse for axial motion (need <= 1/(50 f_z))");
  }
}

AtomState sample_initial_state(const TrapParams& t, Rng& rng, const InitialStateOptions& opts) {
  const TrapFrequencies f = derive_trap_frequencies(t);
  // <KE> = ke_factor * depth  =>  kT = (2/3) ke_factor * depth
  const double kT = (2.0 / 3.0) * opts.ke_factor * t.depth;
  const double v_sigma = std::sqrt(kT / t.atom_mass);
  const double x_sigma = opts.spread_factor * (f.omega_radial > 0.0 ? v_sigma / f.omega_radial : 0.0);
  const double z_sigma = opts.spread_factor * (f.omega_axial > 0.0 ? v_sigma / f.omega_axial : 0.0);

  for (int attempt = 0; attempt < 10000; ++attempt) {
    AtomState s;
    s.pos = {x_sigma * rng.normal(), x_sigma * rng.normal(), z_sigma * rng.normal()};
    s.vel = {v_sigma * rng.normal(), v_sigma * rng.normal(), v_sigma * rng.normal()};
    s.t = 0.0;
    if (!opts.reject_unbound || total_energy(s, t) < 0.0) return s;
  }
  throw std::runtime_error("sample_initial_state: no bound state found in 10000 attempts");
}

double total_energy(const AtomState& s, const TrapParams& t) {
  return 0.5 * t.atom_mass * norm2(s.vel) + trap_potential(s.pos, t, 0.0);
}

AtomState step(const AtomState& s, const TrapParams& t, const CavityParams& c,
               const NoiseModel& n, double mod, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (!(std::fabs(mod) < 1.0)) throw std::invalid_argument("step: |mod| must be < 1");
  Stepper stepper(t, c, n, false);
  AtomState out = s;
  stepper.prime(out);
  stepper.advance(out, mod, dt, rng);
  return out;
}

long sample_detections(double g, const CavityParams& c, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_detections: dt must be positive");
  return rng.poisson(detection_rate(g, c) * dt);
}

TrajectoryResult simulate_trajectory(const SimConfig& sim, const TrapParams& trap,
                                     const CavityParams& cavity, const NoiseModel& noise,
                                     const ControllerConfig* controller,
                                     const OpenLoopDrive* drive, uint64_t seed,
                                     const InitialStateOptions& init_opts) {
  if (controller && drive)
    throw std::invalid_argument("simulate_trajectory: controller and open-loop drive are exclusive");

  const double tick = controller ? controller->tick : sim.dt_physics;
  const double ratio = tick / sim.dt_physics;
  const long steps_per_tick = std::lround(ratio);
  if (steps_per_tick < 1 || std::fabs(ratio - static_cast<double>(steps_per_tick)) > 1e-9 * ratio)
    throw std::invalid_argument(
        "simulate_trajectory: controller tick must be an integer multiple of dt_physics");

  Rng rng(seed);
  AtomState state = sample_initial_state(trap, rng, init_opts);
  if (sim.pin_axial) {
    state.pos.z = 0.0;
    state.vel.z = 0.0;
  }

  Stepper stepper(trap, cavity, noise, sim.pin_axial);
  stepper.prime(state);

  std::optional<FeedbackController> ctrl;
  if (controller) ctrl.emplace(*controller);

  TrajectoryResult result;
  const long n_ticks = static_cast<long>(std::ceil(sim.max_time / tick - 0.5e-9));
  if (sim.record_tick_counts) result.tick_counts.reserve(static_cast<size_t>(n_ticks));

  const double r_esc2 = sim.escape_radius * sim.escape_radius;
  const double half_mass = 0.5 * trap.atom_mass;
  double mod = 0.0;
  double drive_level = 0.0;

  for (long k = 0; k < n_ticks; ++k) {
    for (long s = 0; s < steps_per_tick; ++s) stepper.advance(state, mod, sim.dt_physics, rng);

    const FieldSample& field = stepper.field();
    const long count = rng.poisson(detection_rate(field.coupling, cavity) * tick);
    result.n_detected += count;
    if (sim.record_tick_counts) result.tick_counts.push_back(static_cast<uint32_t>(count));

    if (ctrl) {
      drive_level = ctrl->process_tick(static_cast<double>(count)).modulation;
      mod = drive_level;
    } else if (drive) {
      drive_level = drive->modulation * std::sin(two_pi * drive->freq * state.t + drive->phase);
      mod = drive_level;
    }

    const double energy = half_mass * norm2(state.vel) + field.potential_unmod;
    if (!std::isfinite(energy) || !finite(state.pos)) {
      std::ostringstream msg;
      msg << "simulate_trajectory: non-finite state at t=" << state.t;
      throw std::runtime_error(msg.str());
    }

    const double r2 = state.pos.x * state.pos.x + state.pos.y * state.pos.y;
    if (r2 > r_esc2) {
      result.escaped = true;
      result.escape_channel = EscapeChannel::radial;
    } else if (energy > 0.0 && norm2(state.pos) > r_esc2) {
      result.escaped = true;
      result.escape_channel = EscapeChannel::energy;
    }

    if (sim.record_diagnostics && (k % sim.diag_stride == 0 || result.escaped)) {
      DiagnosticsRow row;
      row.t = state.t;
      row.pos = state.pos;
      row.energy = energy;
      row.transmission = transmission(field.coupling, cavity);
      row.magnitude = ctrl ? ctrl->inferred_magnitude() : 0.0;
      row.lo_phase = ctrl ? ctrl->lo_phase() : 0.0;
      row.drive = drive_level;
      result.diagnostics.push_back(row);
    }

    if (result.escaped) {
      result.storage_time = state.t;
      break;
    }
  }

  if (!result.escaped) result.storage_time = sim.max_time;
  result.n_scatter_events = stepper.scatter_events();
  return result;
}

}  // namespace pfc
