// Command-line front end: run one ensemble, sweep a parameter, reproduce a
// pre-baked experiment, or replay a recorded count stream through the
// feedback pipeline.
//
// Exit codes: 0 success, 1 config error, 2 runtime error, 3 degenerate
// statistics (no trapped trajectory anywhere).

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pfc/analysis.hpp"
#include "pfc/config.hpp"
#include "pfc/figures.hpp"
#include "pfc/sweep.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out = "results";
  std::optional<uint64_t> seed;
  int workers = -1;
  std::string format = "both";
  std::vector<std::string> overrides;
  bool stamp = false;
};

pfc::ExperimentConfig load(const CommonOpts& o) {
  pfc::ExperimentConfig cfg =
      o.config_path.empty() ? pfc::default_config(pfc::Mode::radial) : pfc::load_config_file(o.config_path);
  for (const std::string& s : o.overrides) pfc::apply_override(cfg, s);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.workers >= 0) cfg.workers = o.workers;
  cfg.validate();
  return cfg;
}

void export_tables(const pfc::SweepResult& sweep, const pfc::ExperimentConfig& cfg,
                   const CommonOpts& o) {
  if (o.format == "csv" || o.format == "both")
    pfc::write_file(o.out + ".csv", pfc::results_csv(sweep.records));
  if (o.format == "json" || o.format == "both")
    pfc::write_file(o.out + ".json", pfc::results_json(sweep, cfg, o.stamp));
}

std::string fmt_ms(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f ms", seconds * 1e3);
  return buf;
}

int cmd_run(const CommonOpts& o) {
  const pfc::ExperimentConfig cfg = load(o);
  const std::vector<pfc::TrajectoryResult> results = pfc::run_experiment(cfg);
  const pfc::StorageStats stats = pfc::storage_stats(results, cfg.sim.trapped_threshold);

  pfc::SweepResult table;
  table.config_digest = cfg.digest();
  pfc::ResultRecord rec;
  rec.swept_param = "none";
  rec.swept_value = 0.0;
  rec.stats = stats;
  rec.n_total = static_cast<int>(results.size());
  for (const pfc::TrajectoryResult& r : results) {
    if (r.escape_channel == pfc::EscapeChannel::energy) ++rec.n_escaped_energy;
    if (r.escape_channel == pfc::EscapeChannel::radial) ++rec.n_escaped_radial;
  }
  rec.seed = cfg.master_seed;
  rec.config_digest = cfg.digest();
  table.records.push_back(rec);
  export_tables(table, cfg, o);

  if (cfg.sim.record_diagnostics) {
    for (size_t i = 0; i < results.size(); ++i) {
      if (results[i].diagnostics.empty()) continue;
      std::ostringstream d;
      d << "t_s,x_m,y_m,z_m,energy_j,transmission,magnitude,lo_phase_rad,drive_mod\n";
      for (const pfc::DiagnosticsRow& row : results[i].diagnostics) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      row.t, row.pos.x, row.pos.y, row.pos.z, row.energy, row.transmission,
                      row.magnitude, row.lo_phase, row.drive);
        d << buf;
      }
      pfc::write_file(o.out + "_diag_t" + std::to_string(i) + ".csv", d.str());
    }
  }

  std::cout << "trajectories: " << results.size() << "  trapped: " << stats.count
            << "  trapped_fraction: " << stats.trapped_fraction << "\n";
  if (stats.valid) {
    std::cout << "storage time: " << fmt_ms(stats.mean) << " +- " << fmt_ms(stats.sem) << "\n";
  } else {
    std::cerr << "warning: no trajectory qualified as trapped (threshold "
              << cfg.sim.trapped_threshold << " s)\n";
    return 3;
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o) {
  const pfc::ExperimentConfig cfg = load(o);
  const pfc::SweepResult sweep = pfc::run_sweep(cfg);
  export_tables(sweep, cfg, o);

  bool any_valid = false;
  for (const pfc::ResultRecord& r : sweep.records) {
    if (!r.stats.valid)
      std::cerr << "warning: no trapped trajectories at " << r.swept_param << " = " << r.swept_value
                << "\n";
    any_valid |= r.stats.valid;
  }
  std::cout << "sweep points: " << sweep.records.size() << "  (" << cfg.sweep.parameter << ")\n";
  if (sweep.gaussian_fit && !sweep.gaussian_fit->degenerate)
    std::cout << "periodic Gaussian fit: phi0 = " << sweep.gaussian_fit->phi0
              << " rad, peak = " << fmt_ms(sweep.gaussian_fit->amplitude + sweep.gaussian_fit->baseline)
              << "\n";
  if (sweep.sinusoid_fit)
    std::cout << "sinusoid fit: phi0 = " << sweep.sinusoid_fit->phi0
              << " rad, amplitude = " << fmt_ms(sweep.sinusoid_fit->amplitude) << "\n";
  return any_valid ? 0 : 3;
}

int cmd_replay(const CommonOpts& o, const std::string& counts_path, bool binary_out) {
  const pfc::ExperimentConfig cfg = load(o);
  const pfc::ControllerConfig ctrl = pfc::resolved_controller(cfg);
  const std::vector<double> counts = pfc::read_count_stream(counts_path);
  const std::vector<double> drive = pfc::replay_counts(ctrl, counts);
  if (binary_out)
    pfc::write_count_stream_binary(o.out + "_drive.bin", drive);
  else
    pfc::write_file(o.out + "_drive.csv", pfc::drive_stream_csv(drive));
  std::cout << "replayed " << counts.size() << " ticks\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parametric feedback cooling simulator"};
  app.require_subcommand(1);

  CommonOpts o;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    sub->add_option("--config", o.config_path, "experiment config file")->required(config_required);
    sub->add_option("--out", o.out, "output path prefix");
    sub->add_option_function<uint64_t>(
        "--seed", [&o](const uint64_t& v) { o.seed = v; }, "override master seed");
    sub->add_option("--workers", o.workers, "worker threads (0 = all cores)");
    sub->add_option("--format", o.format, "csv | json | both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--set", o.overrides, "config override section.key=value (repeatable)");
    sub->add_flag("--stamp", o.stamp, "include a wall-clock timestamp in JSON output");
  };

  CLI::App* run = app.add_subcommand("run", "run one ensemble from a config");
  add_common(run, true);

  CLI::App* sweep = app.add_subcommand("sweep", "run the sweep configured in the config file");
  add_common(sweep, true);

  CLI::App* repro = app.add_subcommand("reproduce", "run a pre-baked experiment");
  std::string figure, scale = "desk", out_dir = "figures_out";
  bool dump_config = false;
  std::vector<std::string> repro_overrides;
  repro->add_option("figure", figure, "fig2b | fig3 | fig4 | fig5")->required();
  repro->add_option("--scale", scale, "desk | full")->check(CLI::IsMember({"desk", "full"}));
  repro->add_option("--out", out_dir, "output directory");
  uint64_t repro_seed = 0;
  bool have_repro_seed = false;
  repro->add_option("--seed", repro_seed, "override master seed")->each([&](const std::string&) {
    have_repro_seed = true;
  });
  int repro_workers = -1;
  repro->add_option("--workers", repro_workers, "worker threads (0 = all cores)");
  repro->add_option("--set", repro_overrides, "config override section.key=value (repeatable)");
  repro->add_flag("--dump-config", dump_config, "print the experiment config and exit");

  CLI::App* replay = app.add_subcommand("replay", "run a count stream through the DSP pipeline");
  std::string counts_path;
  bool binary_out = false;
  add_common(replay, true);
  replay->add_option("--counts", counts_path, "recorded count stream (CSV or binary)")->required();
  replay->add_flag("--binary", binary_out, "write the drive stream in binary framing");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (repro->parsed()) {
      if (dump_config) {
        std::cout << pfc::figure_config_text(figure, scale);
        return 0;
      }
      return pfc::reproduce_figure(figure, scale, out_dir,
                                   have_repro_seed ? std::optional<uint64_t>(repro_seed) : std::nullopt,
                                   repro_workers, repro_overrides);
    }
    if (replay->parsed()) return cmd_replay(o, counts_path, binary_out);
  } catch (const pfc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
