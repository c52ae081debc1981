#ifndef PFC_FEEDBACK_DSP_HPP
#define PFC_FEEDBACK_DSP_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "pfc/constants.hpp"

namespace pfc {

inline double wrap_pi(double a) {
  a = std::remainder(a, two_pi);
  if (a <= -pi) a += two_pi;
  return a;
}

// Tick-driven emulation of the FPGA feedback pipeline:
//   count binning -> boxcar prefilter -> IQ demodulation -> RBW boxcar ->
//   complex-to-polar -> LO phase lock (+ phase advance) -> scheduled drive.
struct ControllerConfig {
  double tick = 8.0e-9;      // s, count-binning interval
  double f_pfb = 625.0e3;    // Hz, demodulation / drive frequency
  double phi_pfb = 0.0;      // rad, phase advance of the drive
  int n_periods = 1;         // RBW integration time tau = n_periods / f_pfb
  int prefilter_len = 1;     // boxcar taps ahead of the demodulator
  double lock_gain = 0.5;    // per-update LO correction, in (0, 1]
  double mod_max = 0.11;     // cap on the modulation fraction
  double mag_ref = 0.0;      // RBW magnitude mapped to mod_max; see mag_ref_for()

  // RBW buffer length, round(tau / tick). When tick does not divide tau the
  // residual is < 1 tick; bit-exact reference behavior is defined at the
  // 8 ns tick where the division is exact.
  int rbw_len() const;
  void validate() const;

  // Full-swing transmission oscillation (0 -> 1 at f_pfb) in count units:
  // demodulated magnitude 0.5 times the mean counts per tick at empty cavity.
  static double mag_ref_for(double empty_detect_rate, double tick);
};

// Fixed-length boxcar (moving average) with a running sum.
template <typename T>
class Boxcar {
 public:
  explicit Boxcar(int len = 1) { reset(len); }

  void reset(int len) {
    buf_.assign(static_cast<size_t>(len), T{});
    sum_ = T{};
    head_ = 0;
  }

  // Push one sample, return the mean over the last len samples (zeros
  // before warm-up).
  T push(T v) {
    sum_ += v - buf_[head_];
    buf_[head_] = v;
    head_ = (head_ + 1) % buf_.size();
    return sum_ / static_cast<double>(buf_.size());
  }

  int length() const { return static_cast<int>(buf_.size()); }

 private:
  std::vector<T> buf_;
  T sum_{};
  size_t head_ = 0;
};

// One demodulation step: sample * 2 * exp(-i * theta_ref), with theta_ref =
// 2 pi f_pfb * tick_index * tick. The factor 2 makes a unit sine at f_pfb
// come out with magnitude 1 and phase (tone phase - pi/2) after the RBW.
std::complex<double> demodulate(double sample, double theta_ref);

// First-order phase-locked loop update; returns the new LO phase, wrapped.
double lock_lo(double measured_phase, double lo_phase, double lock_gain);

// Linear gain map with saturation: mod_max * min(magnitude / mag_ref, 1).
double schedule_gain(double magnitude, double mag_ref, double mod_max);

struct DriveSample {
  double modulation = 0.0;  // fraction of trap depth, |modulation| <= mod_max
};

class FeedbackController {
 public:
  explicit FeedbackController(const ControllerConfig& cfg);

  // Process the photon count of one tick, return the drive for the next
  // interval. Deterministic and causal.
  DriveSample process_tick(double count);

  // pipeline observables for diagnostics traces
  double inferred_magnitude() const { return std::abs(amplitude_); }
  double measured_phase() const { return std::arg(amplitude_); }
  double lo_phase() const { return lo_phase_; }
  double scheduled_amplitude() const { return scheduled_amplitude_; }
  uint64_t tick_index() const { return tick_index_; }
  const ControllerConfig& config() const { return cfg_; }

 private:
  ControllerConfig cfg_;
  Boxcar<double> prefilter_;
  Boxcar<std::complex<double>> rbw_;
  std::complex<double> amplitude_{0.0, 0.0};
  double theta_ref_ = 0.0;       // 2 pi f_pfb t, wrapped
  double dtheta_ = 0.0;          // phase advance per tick
  double lo_phase_ = 0.0;        // LO offset relative to theta_ref, wrapped
  double scheduled_amplitude_ = 0.0;
  uint64_t tick_index_ = 0;
  int rbw_len_ = 1;
};

}  // namespace pfc

#endif
