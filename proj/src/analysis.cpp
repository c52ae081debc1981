#include "pfc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include "pfc/cavity_physics.hpp"
#include "pfc/rng.hpp"
#include "pfc/simplex.hpp"

namespace pfc {

namespace {

// In-place iterative radix-2 FFT; n must be a power of two.
void fft(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -two_pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Accumulate Welch segments (periodic Hann, 50% overlap, per-segment linear
// detrend) of one series into acc; returns the number of segments consumed.
// Segments whose mean exceeds level_gate are skipped (used to reject
// stretches where the atom has left the mode and the transmission sits at
// the empty-cavity level).
long welch_accumulate(std::span<const double> series, int seg_len, std::vector<double>& acc,
                      double level_gate = 1e300) {
  const size_t n = static_cast<size_t>(seg_len);
  if (series.size() < n) return 0;

  static thread_local std::vector<double> window;
  if (window.size() != n) {
    window.resize(n);
    for (size_t j = 0; j < n; ++j)
      window[j] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(j) / static_cast<double>(n)));
  }
  double u = 0.0;
  for (double w : window) u += w * w;
  u /= static_cast<double>(n);

  if (acc.size() != n / 2 + 1) acc.assign(n / 2 + 1, 0.0);

  long segments = 0;
  std::vector<std::complex<double>> buf(n);
  for (size_t start = 0; start + n <= series.size(); start += n / 2) {
    // least-squares line through the segment; removing it suppresses the
    // random-walk leakage that would otherwise bury narrow features
    double mean = 0.0, slope_num = 0.0;
    const double tm = 0.5 * static_cast<double>(n - 1);
    for (size_t j = 0; j < n; ++j) mean += series[start + j];
    mean /= static_cast<double>(n);
    if (mean > level_gate) continue;
    double denom = 0.0;
    for (size_t j = 0; j < n; ++j) {
      const double d = static_cast<double>(j) - tm;
      slope_num += d * (series[start + j] - mean);
      denom += d * d;
    }
    const double slope = slope_num / denom;
    for (size_t j = 0; j < n; ++j)
      buf[j] = (series[start + j] - mean - slope * (static_cast<double>(j) - tm)) * window[j];
    fft(buf);
    // one-sided, normalized so the integral over frequency is the variance;
    // the fs factor is applied by the caller
    for (size_t k = 0; k <= n / 2; ++k) {
      const double scale = (k == 0 || k == n / 2) ? 1.0 : 2.0;
      acc[k] += scale * std::norm(buf[k]) / (static_cast<double>(n) * u);
    }
    ++segments;
  }
  return segments;
}

Psd finish_psd(std::vector<double>&& acc, long segments, int seg_len, double fs) {
  Psd psd;
  psd.fs = fs;
  psd.df = fs / static_cast<double>(seg_len);
  psd.n_segments = segments;
  psd.power = std::move(acc);
  const double norm = 1.0 / (static_cast<double>(std::max<long>(segments, 1)) * fs);
  for (double& p : psd.power) p *= norm;
  psd.freq.resize(psd.power.size());
  for (size_t k = 0; k < psd.freq.size(); ++k) psd.freq[k] = static_cast<double>(k) * psd.df;
  return psd;
}

}  // namespace

Psd power_spectrum(std::span<const double> series, double sample_dt, int segment_len) {
  if (series.size() < 1024) throw std::invalid_argument("power_spectrum: series shorter than 1024 samples");
  if (!is_pow2(segment_len)) throw std::invalid_argument("power_spectrum: segment_len must be a power of two");
  if (series.size() < static_cast<size_t>(segment_len))
    throw std::invalid_argument("power_spectrum: series shorter than one segment");
  std::vector<double> acc;
  const long segments = welch_accumulate(series, segment_len, acc);
  return finish_psd(std::move(acc), segments, segment_len, 1.0 / sample_dt);
}

Psd ensemble_transmission_psd(const std::vector<TrajectoryResult>& results,
                              double empty_detect_rate, double tick, int segment_len,
                              double presence_gate) {
  if (!is_pow2(segment_len)) throw std::invalid_argument("ensemble_transmission_psd: segment_len must be a power of two");
  std::vector<double> acc;
  long segments = 0;
  std::vector<double> series;
  const double scale = 1.0 / (empty_detect_rate * tick);
  for (const TrajectoryResult& r : results) {
    if (r.tick_counts.size() < static_cast<size_t>(segment_len)) continue;
    series.resize(r.tick_counts.size());
    for (size_t i = 0; i < series.size(); ++i) series[i] = scale * r.tick_counts[i];
    segments += welch_accumulate(series, segment_len, acc, presence_gate);
  }
  if (segments == 0)
    throw std::runtime_error("ensemble_transmission_psd: no trajectory long enough for one segment");
  return finish_psd(std::move(acc), segments, segment_len, 1.0 / tick);
}

StorageStats storage_stats(std::span<const double> storage_times, double trapped_threshold) {
  StorageStats st;
  const int total = static_cast<int>(storage_times.size());
  double sum = 0.0;
  for (double t : storage_times) {
    if (t >= trapped_threshold) {
      ++st.count;
      sum += t;
    }
  }
  st.trapped_fraction = total > 0 ? static_cast<double>(st.count) / total : 0.0;
  if (st.count == 0) return st;  // valid stays false: degenerate, caller decides
  st.mean = sum / st.count;
  if (st.count > 1) {
    double ss = 0.0;
    for (double t : storage_times)
      if (t >= trapped_threshold) ss += (t - st.mean) * (t - st.mean);
    st.sem = std::sqrt(ss / (st.count - 1)) / std::sqrt(static_cast<double>(st.count));
  }
  st.valid = true;
  return st;
}

StorageStats storage_stats(const std::vector<TrajectoryResult>& results, double trapped_threshold) {
  std::vector<double> times;
  times.reserve(results.size());
  for (const TrajectoryResult& r : results) times.push_back(r.storage_time);
  return storage_stats(times, trapped_threshold);
}

// ---- Q fit -----------------------------------------------------------------

namespace {

double oscillator_line(double f, double fp, double q) {
  const double d = f * f - fp * fp;
  const double g = fp * f / q;
  return fp * fp * fp * fp / (d * d + g * g);
}

struct QFitData {
  std::vector<double> f, logp;
};

double qfit_cost(const QFitData& d, const std::vector<double>& x) {
  // x = {log P, fp, log Q, log b, log c}
  const double p = std::exp(x[0]);
  const double fp = x[1];
  const double q = std::exp(x[2]);
  const double b = std::exp(x[3]);
  const double c = std::exp(x[4]);
  if (!(fp > 0.0) || q < 0.2 || q > 300.0) return 1e100;
  double ss = 0.0;
  for (size_t i = 0; i < d.f.size(); ++i) {
    const double model = p * oscillator_line(d.f[i], fp, q) + b / d.f[i] + c;
    const double r = std::log(model) - d.logp[i];
    ss += r * r;
  }
  return ss;
}

}  // namespace

SpectrumFit fit_q_factor(const Psd& psd, const QFitOptions& opts) {
  if (!(opts.f_radial > 0.0)) throw std::invalid_argument("fit_q_factor: f_radial must be set");
  const double f2 = 2.0 * opts.f_radial;
  const double f_lo = opts.window_lo * f2;
  const double f_hi = opts.window_hi * f2;
  if (psd.freq.empty() || psd.freq.back() < f_hi || psd.freq[1] > f_lo)
    throw std::invalid_argument("fit_q_factor: PSD window too narrow for the fit band");

  QFitData data;
  const double tiny = 1e-300;
  for (size_t i = 1; i < psd.freq.size(); ++i) {
    if (psd.freq[i] < f_lo || psd.freq[i] > f_hi) continue;
    data.f.push_back(psd.freq[i]);
    data.logp.push_back(std::log(std::max(psd.power[i], tiny)));
  }
  if (data.f.size() < 8) throw std::invalid_argument("fit_q_factor: too few PSD bins in the fit band");

  // initial scales from the data
  double peak_val = 0.0, peak_f = f2;
  for (size_t i = 0; i < data.f.size(); ++i) {
    const double v = std::exp(data.logp[i]);
    if (v > peak_val) {
      peak_val = v;
      peak_f = data.f[i];
    }
  }
  double floor_val = std::exp(data.logp.back());
  for (size_t i = data.f.size() - 5; i < data.f.size(); ++i)
    floor_val = std::min(floor_val, std::exp(data.logp[i]));
  floor_val = std::max(floor_val, tiny);

  const double q_starts[4] = {1.6, 2.8, 6.0, 12.0};
  const double fp_starts[2] = {0.92 * peak_f, 1.0 * peak_f};

  SimplexResult best;
  best.value = 1e300;
  SimplexOptions sopts;
  sopts.max_iter = opts.max_iter;
  int starts = 0;
  for (double q0 : q_starts) {
    for (double fp0 : fp_starts) {
      if (starts++ >= opts.multistarts) break;
      std::vector<double> x0 = {std::log(std::max(peak_val / (q0 * q0), tiny)), fp0, std::log(q0),
                                std::log(std::max(0.5 * floor_val * data.f.front(), tiny)),
                                std::log(std::max(0.5 * floor_val, tiny))};
      std::vector<double> step = {1.0, 0.08 * fp0, 0.5, 2.0, 2.0};
      SimplexResult r =
          nelder_mead([&](const std::vector<double>& x) { return qfit_cost(data, x); }, x0, step, sopts);
      if (r.value < best.value) best = r;
    }
  }

  SpectrumFit fit;
  fit.amplitude = std::exp(best.x[0]);
  fit.peak_freq = best.x[1];
  fit.q_factor = std::exp(best.x[2]);
  fit.noise_amp = std::exp(best.x[3]);
  fit.white_floor = std::exp(best.x[4]);
  fit.fit_residual = std::sqrt(best.value / static_cast<double>(data.f.size()));
  fit.converged = best.converged;
  return fit;
}

std::vector<double> synthesize_transmission(const TrapParams& trap, const CavityParams& cavity,
                                            const SynthesisOptions& opts) {
  const TrapFrequencies tf = derive_trap_frequencies(trap);
  const double w0 = tf.omega_radial;
  const double dt = opts.sample_dt;
  const size_t n = static_cast<size_t>(opts.duration / dt);
  const double w = trap.waist;

  Rng rng(opts.seed);
  // complex mode envelopes (carrier included); relaxation at w0/(2Q) with a
  // white drive balancing the target rms amplitude
  std::complex<double> ax(opts.amplitude_rms * w, 0.0), ay(0.0, opts.amplitude_rms * w);
  const double relax = w0 / (2.0 * opts.q);
  const double sigma = opts.amplitude_rms * w * std::sqrt(relax * dt);

  std::vector<double> series(n);
  for (size_t i = 0; i < n; ++i) {
    auto evolve = [&](std::complex<double>& a) {
      const double amp2 = std::norm(a) / (w * w);
      const double omega = opts.anharmonic ? w0 * (1.0 - 0.75 * amp2) : w0;
      const std::complex<double> rot(std::cos(omega * dt), std::sin(omega * dt));
      a = a * rot * std::exp(-relax * dt) + sigma * std::complex<double>(rng.normal(), rng.normal());
    };
    evolve(ax);
    evolve(ay);
    const double x = ax.real();
    const double y = ay.real();
    const double r2 = x * x + y * y;
    if (opts.nonlinear) {
      const double g = cavity.g0 * std::exp(-r2 / (cavity.mode_waist * cavity.mode_waist));
      series[i] = transmission(g, cavity);
    } else {
      series[i] = r2 / (w * w);  // small-signal quadratic map, pure 2-omega content
    }
  }
  return series;
}

// ---- phase-sweep fits -------------------------------------------------------

namespace {

std::vector<double> fit_weights(std::span<const double> sems, size_t n) {
  std::vector<double> wts(n, 1.0);
  bool usable = sems.size() == n;
  for (size_t i = 0; usable && i < n; ++i)
    if (!(sems[i] > 0.0)) usable = false;
  if (usable)
    for (size_t i = 0; i < n; ++i) wts[i] = 1.0 / (sems[i] * sems[i]);
  return wts;
}

}  // namespace

PeriodicGaussianFit fit_periodic_gaussian(std::span<const double> phases,
                                          std::span<const double> means,
                                          std::span<const double> sems) {
  const size_t n = phases.size();
  if (n < 5 || means.size() != n)
    throw std::invalid_argument("fit_periodic_gaussian: need >= 5 (phase, mean) points");
  double span_lo = phases[0], span_hi = phases[0];
  for (double p : phases) {
    span_lo = std::min(span_lo, p);
    span_hi = std::max(span_hi, p);
  }
  if (span_hi - span_lo < 1.5 * pi)
    throw std::invalid_argument("fit_periodic_gaussian: phases must span >= 1.5 pi");

  const std::vector<double> wts = fit_weights(sems, n);
  double lo = means[0], hi = means[0];
  for (double m : means) {
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  const double range = hi - lo;

  auto cost = [&](const std::vector<double>& x) {
    // x = {A, phi0, sigma, B}; the model is a storage-time peak, so A >= 0
    const double sg = x[2];
    if (!(sg > 1e-4) || sg > two_pi || x[0] < 0.0) return 1e100;
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double d = wrap_pi(phases[i] - x[1]);
      const double model = x[0] * std::exp(-d * d / (2.0 * sg * sg)) + x[3];
      ss += wts[i] * (model - means[i]) * (model - means[i]);
    }
    return ss;
  };

  SimplexResult best;
  best.value = 1e300;
  for (int k = 0; k < 8; ++k) {
    const double phi_start = -pi + (two_pi * k) / 8.0;
    std::vector<double> x0 = {range, phi_start, 1.0, lo};
    std::vector<double> step = {0.5 * range + 1e-12, 0.6, 0.5, 0.25 * range + 1e-12};
    SimplexResult r = nelder_mead(cost, x0, step, {});
    if (r.value < best.value) best = r;
  }

  PeriodicGaussianFit fit;
  fit.amplitude = best.x[0];
  fit.phi0 = wrap_pi(best.x[1]);
  fit.sigma = best.x[2];
  fit.baseline = best.x[3];
  double wsum = std::accumulate(wts.begin(), wts.end(), 0.0);
  fit.residual = std::sqrt(best.value / wsum);
  fit.converged = best.converged;

  // significance: nested-model F test of the peak against the constant-only
  // fit (3 extra parameters). An insignificant peak leaves phi0
  // unconstrained and the fit is flagged degenerate.
  double wmean = 0.0;
  for (size_t i = 0; i < n; ++i) wmean += wts[i] * means[i] / wsum;
  double ssr_const = 0.0;
  for (size_t i = 0; i < n; ++i) ssr_const += wts[i] * (means[i] - wmean) * (means[i] - wmean);
  const double df2 = static_cast<double>(n) - 4.0;
  const double f_ratio = (best.value > 0.0 && df2 > 0.0)
                             ? ((ssr_const - best.value) / 3.0) / (best.value / df2)
                             : 1e300;
  fit.degenerate = f_ratio < 6.0 || fit.sigma > pi || fit.sigma < 1e-3 ||
                   std::fabs(fit.amplitude) <= 1e-6 * std::max(std::fabs(fit.baseline), 1e-300);
  return fit;
}

SinusoidFit fit_sinusoid(std::span<const double> phases, std::span<const double> means,
                         std::span<const double> sems) {
  const size_t n = phases.size();
  if (n < 3 || means.size() != n)
    throw std::invalid_argument("fit_sinusoid: need >= 3 (phase, mean) points");
  const std::vector<double> wts = fit_weights(sems, n);

  // normal equations for S = a sin(phi) + b cos(phi) + B
  double m[3][3] = {};
  double rhs[3] = {};
  for (size_t i = 0; i < n; ++i) {
    const double basis[3] = {std::sin(phases[i]), std::cos(phases[i]), 1.0};
    for (int r = 0; r < 3; ++r) {
      rhs[r] += wts[i] * basis[r] * means[i];
      for (int c = 0; c < 3; ++c) m[r][c] += wts[i] * basis[r] * basis[c];
    }
  }

  // invert the 3x3 via Gauss-Jordan, keeping the inverse for the covariance
  double inv[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  double a[3][3];
  std::copy(&m[0][0], &m[0][0] + 9, &a[0][0]);
  const double pivot_floor =
      1e-9 * std::max({std::fabs(m[0][0]), std::fabs(m[1][1]), std::fabs(m[2][2]), 1e-300});
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < pivot_floor)
      throw std::invalid_argument("fit_sinusoid: degenerate phase set (needs >= 3 distinct phases)");
    std::swap(a[col], a[piv]);
    std::swap(inv[col], inv[piv]);
    const double d = a[col][col];
    for (int c = 0; c < 3; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (int c = 0; c < 3; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }

  const double pa = inv[0][0] * rhs[0] + inv[0][1] * rhs[1] + inv[0][2] * rhs[2];
  const double pb = inv[1][0] * rhs[0] + inv[1][1] * rhs[1] + inv[1][2] * rhs[2];
  const double pc = inv[2][0] * rhs[0] + inv[2][1] * rhs[1] + inv[2][2] * rhs[2];

  SinusoidFit fit;
  fit.amplitude = std::sqrt(pa * pa + pb * pb);
  fit.phi0 = std::atan2(-pb, pa);
  fit.baseline = pc;
  fit.converged = true;

  double ss = 0.0, wsum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double model = pa * std::sin(phases[i]) + pb * std::cos(phases[i]) + pc;
    ss += wts[i] * (model - means[i]) * (model - means[i]);
    wsum += wts[i];
  }
  fit.residual = std::sqrt(ss / wsum);

  // parameter covariance; when unweighted, scale by the residual variance
  double scale = 1.0;
  bool weighted = sems.size() == n;
  for (size_t i = 0; weighted && i < n; ++i)
    if (!(sems[i] > 0.0)) weighted = false;
  if (!weighted && n > 3) scale = ss / static_cast<double>(n - 3);
  const double caa = inv[0][0] * scale, cab = inv[0][1] * scale, cbb = inv[1][1] * scale;
  const double amp2 = std::max(fit.amplitude * fit.amplitude, 1e-300);
  fit.amplitude_err = std::sqrt(std::max(0.0, (pa * pa * caa + 2 * pa * pb * cab + pb * pb * cbb) / amp2));
  fit.phi0_err = std::sqrt(std::max(0.0, (pb * pb * caa - 2 * pa * pb * cab + pa * pa * cbb) / (amp2 * amp2)));
  return fit;
}

}  // namespace pfc
