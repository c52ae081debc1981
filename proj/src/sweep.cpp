#include "pfc/sweep.hpp"

#include <charconv>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pfc {

namespace {

// >= 9 significant digits, locale-independent
std::string fmt_sig(double v) {
  char buf[48];
  auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 12);
  return std::string(buf, r.ptr);
}

}  // namespace

EnsembleTask make_task(const ExperimentConfig& cfg, const ControllerConfig* ctrl_storage,
                       const OpenLoopDrive* drive_storage) {
  EnsembleTask task;
  task.sim = cfg.sim;
  task.trap = cfg.trap;
  task.cavity = cfg.cavity;
  task.noise = cfg.noise;
  task.init = cfg.init;
  switch (cfg.mode) {
    case Mode::radial:
    case Mode::axial:
      task.controller = ctrl_storage;
      break;
    case Mode::open_loop:
      task.drive = drive_storage;
      break;
    case Mode::no_feedback:
      break;
  }
  return task;
}

std::vector<TrajectoryResult> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ControllerConfig ctrl = resolved_controller(cfg);
  const OpenLoopDrive drive = cfg.open_loop;
  const EnsembleTask task = make_task(cfg, &ctrl, &drive);
  return run_ensemble(cfg.n_trajectories, task, cfg.master_seed, cfg.workers);
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.sweep.enabled) throw ConfigError("sweep: no sweep parameter configured");

  SweepResult out;
  out.config_digest = cfg.digest();
  out.records.reserve(cfg.sweep.values.size());

  for (size_t i = 0; i < cfg.sweep.values.size(); ++i) {
    ExperimentConfig point = cfg;
    point.sweep = SweepSpec{};
    set_swept_parameter(point, cfg.sweep.parameter, cfg.sweep.values[i]);
    point.master_seed = splitmix64(splitmix64(cfg.master_seed) ^ (i + 1));

    const std::vector<TrajectoryResult> results = run_experiment(point);

    ResultRecord rec;
    rec.swept_param = cfg.sweep.parameter;
    rec.swept_value = cfg.sweep.values[i];
    rec.stats = storage_stats(results, point.sim.trapped_threshold);
    rec.n_total = static_cast<int>(results.size());
    for (const TrajectoryResult& r : results) {
      if (r.escape_channel == EscapeChannel::energy) ++rec.n_escaped_energy;
      if (r.escape_channel == EscapeChannel::radial) ++rec.n_escaped_radial;
    }
    rec.seed = point.master_seed;
    rec.config_digest = point.digest();
    out.records.push_back(std::move(rec));
  }

  // the mode's fit across sweep points (phase sweeps only)
  if (cfg.sweep.parameter == "phi_pfb") {
    std::vector<double> phases, means, sems;
    for (const ResultRecord& r : out.records) {
      if (!r.stats.valid) continue;
      phases.push_back(r.swept_value);
      means.push_back(r.stats.mean);
      sems.push_back(r.stats.sem > 0.0 ? r.stats.sem : 0.0);
    }
    bool weighted = true;
    for (double s : sems)
      if (!(s > 0.0)) weighted = false;
    if (!weighted) sems.clear();
    if (phases.size() >= 5 && cfg.mode == Mode::radial) {
      try {
        out.gaussian_fit = fit_periodic_gaussian(phases, means, sems);
      } catch (const std::exception&) {
      }
    } else if (phases.size() >= 3 && cfg.mode == Mode::axial) {
      try {
        out.sinusoid_fit = fit_sinusoid(phases, means, sems);
      } catch (const std::exception&) {
      }
    }
  }
  return out;
}

std::string results_csv(const std::vector<ResultRecord>& records) {
  std::ostringstream o;
  o << "swept_param,swept_value,mean_storage_s,sem_storage_s,n_trapped,n_total,trapped_fraction\n";
  for (const ResultRecord& r : records) {
    o << r.swept_param << ',' << fmt_sig(r.swept_value) << ','
      << (r.stats.valid ? fmt_sig(r.stats.mean) : "nan") << ','
      << (r.stats.valid ? fmt_sig(r.stats.sem) : "nan") << ',' << r.stats.count << ','
      << r.n_total << ',' << fmt_sig(r.stats.trapped_fraction) << '\n';
  }
  return o.str();
}

std::string results_json(const SweepResult& sweep, const ExperimentConfig& cfg,
                         bool with_timestamp) {
  nlohmann::json j;
  j["config_digest"] = sweep.config_digest;
  j["master_seed"] = cfg.master_seed;
  j["mode"] = to_string(cfg.mode);
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::now();
    j["timestamp_unix"] = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  }
  nlohmann::json recs = nlohmann::json::array();
  for (const ResultRecord& r : sweep.records) {
    nlohmann::json e;
    e["swept_param"] = r.swept_param;
    e["swept_value"] = r.swept_value;
    e["mean_storage_s"] = r.stats.valid ? r.stats.mean : 0.0;
    e["sem_storage_s"] = r.stats.valid ? r.stats.sem : 0.0;
    e["valid"] = r.stats.valid;
    e["n_trapped"] = r.stats.count;
    e["n_total"] = r.n_total;
    e["trapped_fraction"] = r.stats.trapped_fraction;
    e["n_escaped_energy"] = r.n_escaped_energy;
    e["n_escaped_radial"] = r.n_escaped_radial;
    e["seed"] = r.seed;
    e["config_digest"] = r.config_digest;
    recs.push_back(e);
  }
  j["records"] = recs;
  if (sweep.gaussian_fit) {
    const PeriodicGaussianFit& f = *sweep.gaussian_fit;
    j["gaussian_fit"] = {{"amplitude_s", f.amplitude}, {"phi0_rad", f.phi0},
                         {"sigma_rad", f.sigma},       {"baseline_s", f.baseline},
                         {"residual", f.residual},     {"degenerate", f.degenerate},
                         {"converged", f.converged}};
  }
  if (sweep.sinusoid_fit) {
    const SinusoidFit& f = *sweep.sinusoid_fit;
    j["sinusoid_fit"] = {{"amplitude_s", f.amplitude},       {"phi0_rad", f.phi0},
                         {"baseline_s", f.baseline},         {"amplitude_err_s", f.amplitude_err},
                         {"phi0_err_rad", f.phi0_err},       {"residual", f.residual}};
  }
  j["config"] = cfg.canonical_text();
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---- count-stream replay ----------------------------------------------------

static constexpr char kStreamMagic[4] = {'P', 'F', 'C', '1'};

std::vector<double> read_count_stream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open count stream: " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, kStreamMagic, 4) == 0) {
    uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    std::vector<double> counts(n);
    for (uint64_t i = 0; i < n; ++i) {
      uint64_t idx;
      uint32_t c;
      in.read(reinterpret_cast<char*>(&idx), sizeof(idx));
      in.read(reinterpret_cast<char*>(&c), sizeof(c));
      if (!in) throw std::runtime_error("truncated binary count stream: " + path);
      counts[i] = static_cast<double>(c);
    }
    return counts;
  }
  // CSV fallback: header optional, lines of tick_index,count
  in.clear();
  in.seekg(0);
  std::vector<double> counts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("tick_index", 0) == 0) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("count stream: expected tick_index,count lines in " + path);
    counts.push_back(std::stod(line.substr(comma + 1)));
  }
  return counts;
}

void write_count_stream_csv(const std::string& path, const std::vector<double>& counts) {
  std::ostringstream o;
  o << "tick_index,count\n";
  for (size_t i = 0; i < counts.size(); ++i) o << i << ',' << fmt_sig(counts[i]) << '\n';
  write_file(path, o.str());
}

void write_count_stream_binary(const std::string& path, const std::vector<double>& counts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kStreamMagic, 4);
  const uint64_t n = counts.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (uint64_t i = 0; i < n; ++i) {
    const uint32_t c = static_cast<uint32_t>(counts[i]);
    out.write(reinterpret_cast<const char*>(&i), sizeof(i));
    out.write(reinterpret_cast<const char*>(&c), sizeof(c));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string drive_stream_csv(const std::vector<double>& drive) {
  std::ostringstream o;
  o << "tick_index,modulation\n";
  for (size_t i = 0; i < drive.size(); ++i) o << i << ',' << fmt_sig(drive[i]) << '\n';
  return o.str();
}

std::vector<double> replay_counts(const ControllerConfig& ctrl, const std::vector<double>& counts) {
  FeedbackController fc(ctrl);
  std::vector<double> drive;
  drive.reserve(counts.size());
  for (double c : counts) drive.push_back(fc.process_tick(c).modulation);
  return drive;
}

}  // namespace pfc
