#include "pfc/figures.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pfc/cavity_physics.hpp"

namespace pfc {

namespace {

std::string fmt_sig(double v) {
  char buf[48];
  auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 12);
  return std::string(buf, r.ptr);
}

// 16 phases, uniform over one turn (end point excluded, the map is 2 pi
// periodic)
constexpr const char* kPhaseSweep16 =
    "[sweep]\n"
    "parameter = phi_pfb\n"
    "start = 0.0\n"
    "stop = 5.8904862254808625\n"
    "count = 16\n";

const std::map<std::string, std::string> kFigureConfigs = {
    {"fig2b/desk",
     "# Transmission spectrum of a probed atom without feedback, desk scale.\n"
     "# 200 trajectories with per-tick photon counts recorded; the averaged\n"
     "# Welch spectrum is fitted with the driven damped-oscillator line.\n"
     "mode = no_feedback\n"
     "[sim]\n"
     "max_time_s = 0.3\n"
     "record_tick_counts = true\n"
     "[experiment]\n"
     "n_trajectories = 200\n"
     "master_seed = 20101\n"},
    {"fig2b/full",
     "# Transmission spectrum, full scale (long-running).\n"
     "mode = no_feedback\n"
     "[sim]\n"
     "max_time_s = 0.5\n"
     "record_tick_counts = true\n"
     "[experiment]\n"
     "n_trajectories = 1000\n"
     "master_seed = 20102\n"},
    {"fig3/desk",
     "# Radial feedback storage time vs phase advance, desk scale.\n"
     "# The runner repeats this sweep at f_pfb = 4, 7 and 10 kHz and adds a\n"
     "# no-feedback baseline ensemble.\n"
     "mode = radial\n"
     "[sim]\n"
     "max_time_s = 0.5\n"
     "[experiment]\n"
     "n_trajectories = 120\n"
     "master_seed = 30101\n"},
    {"fig3/full",
     "# Radial feedback storage time vs phase advance, full scale\n"
     "# (long-running: heated points are fast, cooled points run out the\n"
     "# 3 s cap).\n"
     "mode = radial\n"
     "[sim]\n"
     "max_time_s = 3.0\n"
     "[experiment]\n"
     "n_trajectories = 400\n"
     "master_seed = 30102\n"},
    {"fig4/desk",
     "# Storage-time maximum and optimal phase vs feedback frequency, desk\n"
     "# scale. The runner sweeps phi_pfb at each of 5 frequencies between 4\n"
     "# and 10 kHz and reads the maximum off the periodic-Gaussian fit.\n"
     "mode = radial\n"
     "[sim]\n"
     "max_time_s = 0.5\n"
     "[experiment]\n"
     "n_trajectories = 100\n"
     "master_seed = 40101\n"},
    {"fig4/full",
     "# Frequency dependence, full scale (long-running).\n"
     "mode = radial\n"
     "[sim]\n"
     "max_time_s = 3.0\n"
     "[experiment]\n"
     "n_trajectories = 400\n"
     "master_seed = 40102\n"},
    {"fig5/desk",
     "# Axial feedback storage time vs phase advance at the 8 ns reference\n"
     "# tick, desk scale, plus a no-feedback axial baseline.\n"
     "mode = axial\n"
     "[sim]\n"
     "max_time_s = 0.03\n"
     "[experiment]\n"
     "n_trajectories = 100\n"
     "master_seed = 50101\n"},
    {"fig5/full",
     "# Axial feedback, full scale (long-running).\n"
     "mode = axial\n"
     "[sim]\n"
     "max_time_s = 0.1\n"
     "[experiment]\n"
     "n_trajectories = 400\n"
     "master_seed = 50102\n"},
};

ExperimentConfig figure_config(const std::string& name, const std::string& scale) {
  return parse_config(figure_config_text(name, scale));
}

void apply_cli_overrides(ExperimentConfig& cfg, std::optional<uint64_t> seed, int workers) {
  if (seed) cfg.master_seed = *seed;
  if (workers >= 0) cfg.workers = workers;
}

ExperimentConfig baseline_of(const ExperimentConfig& cfg) {
  ExperimentConfig base = cfg;
  base.mode = Mode::no_feedback;
  base.sweep = SweepSpec{};
  base.master_seed = splitmix64(cfg.master_seed ^ 0xBA5Eull);
  return base;
}

ResultRecord ensemble_record(const ExperimentConfig& cfg, const std::string& label) {
  const std::vector<TrajectoryResult> results = run_experiment(cfg);
  ResultRecord rec;
  rec.swept_param = label;
  rec.swept_value = 0.0;
  rec.stats = storage_stats(results, cfg.sim.trapped_threshold);
  rec.n_total = static_cast<int>(results.size());
  rec.seed = cfg.master_seed;
  rec.config_digest = cfg.digest();
  return rec;
}

ExperimentConfig with_phase_sweep(ExperimentConfig cfg) {
  ExperimentConfig swept = parse_config(cfg.canonical_text() + "\n" + kPhaseSweep16);
  return swept;
}

}  // namespace

std::string figure_config_text(const std::string& name, const std::string& scale) {
  const auto it = kFigureConfigs.find(name + "/" + scale);
  if (it == kFigureConfigs.end())
    throw ConfigError("unknown figure '" + name + "' at scale '" + scale +
                      "' (figures: fig2b, fig3, fig4, fig5; scales: desk, full)");
  return it->second;
}

TransmissionSpectrumResult run_transmission_spectrum(const ExperimentConfig& cfg) {
  ExperimentConfig run_cfg = cfg;
  run_cfg.sim.record_tick_counts = true;
  const std::vector<TrajectoryResult> results = run_experiment(run_cfg);

  TransmissionSpectrumResult out;
  out.f_radial = derive_trap_frequencies(run_cfg.trap).omega_radial / two_pi;
  out.psd = ensemble_transmission_psd(results, run_cfg.cavity.empty_detect_rate,
                                      run_cfg.controller.tick, 2048);
  QFitOptions fopts;
  fopts.f_radial = out.f_radial;
  out.fit = fit_q_factor(out.psd, fopts);
  return out;
}

int reproduce_figure(const std::string& name, const std::string& scale, const std::string& out_dir,
                     std::optional<uint64_t> seed_override, int workers_override,
                     const std::vector<std::string>& overrides) {
  std::filesystem::create_directories(out_dir);
  const std::string prefix = out_dir + "/" + name;
  ExperimentConfig cfg = figure_config(name, scale);
  for (const std::string& s : overrides) apply_override(cfg, s);
  apply_cli_overrides(cfg, seed_override, workers_override);
  write_file(prefix + "_config.cfg", cfg.canonical_text());

  bool any_valid = false;

  if (name == "fig2b") {
    const TransmissionSpectrumResult r = run_transmission_spectrum(cfg);
    std::ostringstream table;
    table << "freq_hz,psd_measured,psd_model\n";
    for (size_t i = 1; i < r.psd.freq.size(); ++i) {
      const double f = r.psd.freq[i];
      const double d = f * f - r.fit.peak_freq * r.fit.peak_freq;
      const double g = r.fit.peak_freq * f / r.fit.q_factor;
      const double model = r.fit.amplitude * std::pow(r.fit.peak_freq, 4) / (d * d + g * g) +
                           r.fit.noise_amp / f + r.fit.white_floor;
      table << fmt_sig(f) << ',' << fmt_sig(r.psd.power[i]) << ',' << fmt_sig(model) << '\n';
    }
    write_file(prefix + "_psd.csv", table.str());
    nlohmann::json j;
    j["q_factor"] = r.fit.q_factor;
    j["peak_freq_hz"] = r.fit.peak_freq;
    j["two_omega_radial_hz"] = 2.0 * r.f_radial;
    j["noise_amp"] = r.fit.noise_amp;
    j["white_floor"] = r.fit.white_floor;
    j["fit_residual"] = r.fit.fit_residual;
    j["converged"] = r.fit.converged;
    j["config_digest"] = cfg.digest();
    write_file(prefix + "_fit.json", j.dump(2) + "\n");
    return 0;
  }

  if (name == "fig3") {
    nlohmann::json fits = nlohmann::json::object();
    for (double f_khz : {4.0, 7.0, 10.0}) {
      ExperimentConfig sub = with_phase_sweep(cfg);
      sub.controller.f_pfb = f_khz * 1e3;
      sub.master_seed = splitmix64(cfg.master_seed ^ static_cast<uint64_t>(f_khz * 1000));
      const SweepResult sweep = run_sweep(sub);
      const std::string tag = "f" + std::to_string(static_cast<int>(f_khz * 1000)) + "hz";
      write_file(prefix + "_" + tag + ".csv", results_csv(sweep.records));
      write_file(prefix + "_" + tag + ".json", results_json(sweep, sub));
      for (const ResultRecord& r : sweep.records) any_valid |= r.stats.valid;
      if (sweep.gaussian_fit) {
        const PeriodicGaussianFit& g = *sweep.gaussian_fit;
        fits[tag] = {{"amplitude_s", g.amplitude}, {"phi0_rad", g.phi0},     {"sigma_rad", g.sigma},
                     {"baseline_s", g.baseline},   {"residual", g.residual}, {"degenerate", g.degenerate}};
      }
    }
    const ResultRecord base = ensemble_record(baseline_of(cfg), "no_feedback");
    write_file(prefix + "_baseline.csv", results_csv({base}));
    any_valid |= base.stats.valid;
    write_file(prefix + "_fits.json", fits.dump(2) + "\n");
    return any_valid ? 0 : 3;
  }

  if (name == "fig4") {
    std::ostringstream table;
    table << "f_pfb_hz,max_storage_s,optimal_phi_rad,baseline_s,fit_sigma_rad,n_valid_points\n";
    for (double f_khz : {4.0, 5.5, 7.0, 8.5, 10.0}) {
      ExperimentConfig sub = with_phase_sweep(cfg);
      sub.controller.f_pfb = f_khz * 1e3;
      sub.master_seed = splitmix64(cfg.master_seed ^ static_cast<uint64_t>(f_khz * 1000));
      const SweepResult sweep = run_sweep(sub);
      const std::string tag = "f" + std::to_string(static_cast<int>(f_khz * 1000)) + "hz";
      write_file(prefix + "_" + tag + ".csv", results_csv(sweep.records));
      int n_valid = 0;
      for (const ResultRecord& r : sweep.records)
        if (r.stats.valid) ++n_valid;
      any_valid |= n_valid > 0;
      if (sweep.gaussian_fit && !sweep.gaussian_fit->degenerate) {
        const PeriodicGaussianFit& g = *sweep.gaussian_fit;
        table << fmt_sig(f_khz * 1e3) << ',' << fmt_sig(g.amplitude + g.baseline) << ','
              << fmt_sig(g.phi0) << ',' << fmt_sig(g.baseline) << ',' << fmt_sig(g.sigma) << ','
              << n_valid << '\n';
      } else {
        table << fmt_sig(f_khz * 1e3) << ",nan,nan,nan,nan," << n_valid << '\n';
      }
    }
    write_file(prefix + ".csv", table.str());
    return any_valid ? 0 : 3;
  }

  if (name == "fig5") {
    ExperimentConfig sub = with_phase_sweep(cfg);
    const SweepResult sweep = run_sweep(sub);
    write_file(prefix + ".csv", results_csv(sweep.records));
    write_file(prefix + ".json", results_json(sweep, sub));
    for (const ResultRecord& r : sweep.records) any_valid |= r.stats.valid;
    const ResultRecord base = ensemble_record(baseline_of(cfg), "no_feedback");
    write_file(prefix + "_baseline.csv", results_csv({base}));
    if (sweep.sinusoid_fit) {
      const SinusoidFit& s = *sweep.sinusoid_fit;
      nlohmann::json j = {{"amplitude_s", s.amplitude},
                          {"phi0_rad", s.phi0},
                          {"baseline_s", s.baseline},
                          {"amplitude_err_s", s.amplitude_err},
                          {"phi0_err_rad", s.phi0_err},
                          {"residual", s.residual},
                          {"no_feedback_mean_s", base.stats.valid ? base.stats.mean : 0.0}};
      write_file(prefix + "_fit.json", j.dump(2) + "\n");
    }
    return any_valid ? 0 : 3;
  }

  throw ConfigError("unknown figure '" + name + "'");
}

}  // namespace pfc
