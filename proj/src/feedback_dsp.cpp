#include "pfc/feedback_dsp.hpp"

#include <cmath>
#include <stdexcept>

namespace pfc {

int ControllerConfig::rbw_len() const {
  return static_cast<int>(std::lround(static_cast<double>(n_periods) / (f_pfb * tick)));
}

void ControllerConfig::validate() const {
  if (!(tick > 0.0)) throw std::invalid_argument("controller: tick must be positive");
  if (!(f_pfb > 0.0)) throw std::invalid_argument("controller: f_pfb must be positive");
  if (n_periods < 1) throw std::invalid_argument("controller: n_periods must be >= 1");
  if (prefilter_len < 1) throw std::invalid_argument("controller: prefilter_len must be >= 1");
  if (!(lock_gain > 0.0 && lock_gain <= 1.0))
    throw std::invalid_argument("controller: lock_gain must be in (0, 1]");
  if (!(mod_max > 0.0 && mod_max < 1.0))
    throw std::invalid_argument("controller: mod_max must be in (0, 1)");
  if (!(mag_ref > 0.0)) throw std::invalid_argument("controller: mag_ref must be positive");
  if (rbw_len() < 1) throw std::invalid_argument("controller: tau shorter than one tick");
  if (!(f_pfb < 0.5 / tick))
    throw std::invalid_argument("controller: f_pfb must be below the tick Nyquist rate");
}

double ControllerConfig::mag_ref_for(double empty_detect_rate, double tick) {
  return 0.5 * empty_detect_rate * tick;
}

std::complex<double> demodulate(double sample, double theta_ref) {
  return 2.0 * sample * std::complex<double>(std::cos(theta_ref), -std::sin(theta_ref));
}

double lock_lo(double measured_phase, double lo_phase, double lock_gain) {
  return wrap_pi(lo_phase + lock_gain * wrap_pi(measured_phase - lo_phase));
}

double schedule_gain(double magnitude, double mag_ref, double mod_max) {
  const double x = magnitude / mag_ref;
  return mod_max * (x < 1.0 ? x : 1.0);
}

FeedbackController::FeedbackController(const ControllerConfig& cfg)
    : cfg_(cfg), prefilter_(cfg.prefilter_len), rbw_(cfg.rbw_len()) {
  cfg_.validate();
  rbw_len_ = cfg_.rbw_len();
  dtheta_ = two_pi * cfg_.f_pfb * cfg_.tick;
}

DriveSample FeedbackController::process_tick(double count) {
  const double filtered = prefilter_.push(count);
  amplitude_ = rbw_.push(demodulate(filtered, theta_ref_));

  ++tick_index_;
  theta_ref_ = wrap_pi(theta_ref_ + dtheta_);

  // LO lock and amplitude schedule once per completed RBW window; the LO
  // free-runs at f_pfb in between. Zero magnitude carries no phase
  // information, the lock then just keeps free-running.
  if (tick_index_ % static_cast<uint64_t>(rbw_len_) == 0) {
    const double mag = std::abs(amplitude_);
    if (mag > 0.0) lo_phase_ = lock_lo(std::arg(amplitude_), lo_phase_, cfg_.lock_gain);
    scheduled_amplitude_ = schedule_gain(mag, cfg_.mag_ref, cfg_.mod_max);
  }

  double m = scheduled_amplitude_ * std::sin(theta_ref_ + lo_phase_ + cfg_.phi_pfb);
  if (m > cfg_.mod_max) m = cfg_.mod_max;
  if (m < -cfg_.mod_max) m = -cfg_.mod_max;
  return {m};
}

}  // namespace pfc
