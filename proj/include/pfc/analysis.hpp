#ifndef PFC_ANALYSIS_HPP
#define PFC_ANALYSIS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pfc/atom_dynamics.hpp"
#include "pfc/params.hpp"

namespace pfc {

struct Psd {
  std::vector<double> freq;   // Hz, one-sided bins
  std::vector<double> power;  // PSD, units^2 / Hz
  double df = 0.0;
  double fs = 0.0;
  long n_segments = 0;
};

// Welch periodogram: periodic Hann window, 50 % overlap, per-segment mean
// removal, one-sided normalization (integrated PSD = variance). Throws when
// the series is shorter than 1024 samples or the segment length.
Psd power_spectrum(std::span<const double> series, double sample_dt, int segment_len = 2048);

// Accumulate Welch segments across many trajectories' transmission series
// (counts normalized by empty_detect_rate * tick). Trajectories shorter than
// one segment are skipped. Segments whose mean transmission exceeds
// presence_gate are escape transients (the atom no longer blocks the cavity)
// and are excluded, mirroring the low-transmission trigger that tags a
// stored atom in the first place.
Psd ensemble_transmission_psd(const std::vector<TrajectoryResult>& results,
                              double empty_detect_rate, double tick, int segment_len = 2048,
                              double presence_gate = 0.01);

struct StorageStats {
  double mean = 0.0;  // s, over trapped trajectories only
  double sem = 0.0;   // s
  int count = 0;      // trapped trajectories
  double trapped_fraction = 0.0;
  bool valid = false;  // false when no trajectory qualified as trapped
};

StorageStats storage_stats(std::span<const double> storage_times, double trapped_threshold = 2.0e-3);
StorageStats storage_stats(const std::vector<TrajectoryResult>& results,
                           double trapped_threshold = 2.0e-3);

// ---- transmission spectrum Q fit ------------------------------------------

struct SpectrumFit {
  double q_factor = 0.0;
  double peak_freq = 0.0;   // Hz
  double noise_amp = 0.0;   // 1/f background coefficient b in b/f
  double fit_residual = 0.0;
  double amplitude = 0.0;   // oscillator line strength
  double white_floor = 0.0; // additive white (shot-noise) floor
  bool converged = false;
};

struct QFitOptions {
  double f_radial = 0.0;    // Hz, small-oscillation radial frequency (window anchor)
  double window_lo = 0.2;   // fit window [window_lo, window_hi] * 2 f_radial
  double window_hi = 4.0;
  int multistarts = 8;
  int max_iter = 2000;
};

// Least-squares fit (log-domain) of a stochastically driven damped-oscillator
// line plus b/f plus a white floor:
//   S(f) = P * fp^4 / ((f^2 - fp^2)^2 + (fp f / Q)^2) + b/f + c
// Derivative-free simplex with multi-starts over log Q and peak position.
SpectrumFit fit_q_factor(const Psd& psd, const QFitOptions& opts);

// Synthesis-based forward model: a 2-D stochastic damped oscillator with the
// softening frequency pull of the Gaussian trap, passed through the
// transmission nonlinearity, Welch-averaged. Used to generate spectra with a
// known Q (the synthesis side of the Q-fit cross-check).
struct SynthesisOptions {
  double q = 2.8;
  double amplitude_rms = 0.25;  // oscillation amplitude / waist
  bool nonlinear = true;        // full T(g(r)) map; false = quadratic small-signal map
  bool anharmonic = true;       // amplitude-dependent frequency pull
  double duration = 4.0;        // s
  double sample_dt = 1.0e-6;    // s
  uint64_t seed = 1;
};
std::vector<double> synthesize_transmission(const TrapParams& trap, const CavityParams& cavity,
                                            const SynthesisOptions& opts);

// ---- phase-sweep fits ------------------------------------------------------

struct PeriodicGaussianFit {
  double amplitude = 0.0;
  double phi0 = 0.0;      // rad, wrapped to (-pi, pi]
  double sigma = 0.0;     // rad
  double baseline = 0.0;
  double residual = 0.0;  // weighted rms residual
  bool degenerate = false;
  bool converged = false;
};

// Weighted fit of S(phi) = A exp(-wrap(phi-phi0)^2 / (2 sigma^2)) + B with
// 2 pi wrapping; phi0 is the optimal phase advance.
PeriodicGaussianFit fit_periodic_gaussian(std::span<const double> phases,
                                          std::span<const double> means,
                                          std::span<const double> sems);

struct SinusoidFit {
  double amplitude = 0.0;
  double phi0 = 0.0;       // rad, wrapped
  double baseline = 0.0;
  double amplitude_err = 0.0;
  double phi0_err = 0.0;
  double residual = 0.0;
  bool converged = false;
};

// Weighted linear least squares of S(phi) = A sin(phi - phi0) + B.
SinusoidFit fit_sinusoid(std::span<const double> phases, std::span<const double> means,
                         std::span<const double> sems);

}  // namespace pfc

#endif
