#ifndef PFC_SWEEP_HPP
#define PFC_SWEEP_HPP

#include <optional>
#include <string>
#include <vector>

#include "pfc/analysis.hpp"
#include "pfc/config.hpp"
#include "pfc/ensemble.hpp"

namespace pfc {

struct ResultRecord {
  std::string swept_param;
  double swept_value = 0.0;
  StorageStats stats;
  int n_total = 0;
  int n_escaped_energy = 0;
  int n_escaped_radial = 0;
  uint64_t seed = 0;            // sweep-point ensemble seed
  std::string config_digest;    // digest of the point's full config
};

struct SweepResult {
  std::vector<ResultRecord> records;
  std::string config_digest;  // digest of the sweep config
  std::optional<PeriodicGaussianFit> gaussian_fit;  // radial mode
  std::optional<SinusoidFit> sinusoid_fit;          // axial mode
};

// Build the per-trajectory task for a (non-sweep) config.
EnsembleTask make_task(const ExperimentConfig& cfg, const ControllerConfig* ctrl_storage,
                       const OpenLoopDrive* drive_storage);

// Run one ensemble described by the config; trajectory seeds derive from
// cfg.master_seed.
std::vector<TrajectoryResult> run_experiment(const ExperimentConfig& cfg);

// Run the configured sweep: one ensemble per swept value (point i uses the
// seed stream (master_seed, i)), storage statistics per point, then the
// mode's fit across points. Deterministic given master_seed; points with no
// trapped trajectory are recorded and the sweep continues.
SweepResult run_sweep(const ExperimentConfig& cfg);

// CSV columns: swept_param, swept_value, mean_storage_s, sem_storage_s,
// n_trapped, n_total, trapped_fraction. Numbers carry >= 9 significant
// digits with a locale-independent decimal point.
std::string results_csv(const std::vector<ResultRecord>& records);
std::string results_json(const SweepResult& sweep, const ExperimentConfig& cfg,
                         bool with_timestamp = false);

void write_file(const std::string& path, const std::string& content);

// Count-stream replay I/O (tick_index,count CSV and a little-endian binary
// framing). The drive dump is symmetric with tick_index,modulation.
std::vector<double> read_count_stream(const std::string& path);
void write_count_stream_csv(const std::string& path, const std::vector<double>& counts);
void write_count_stream_binary(const std::string& path, const std::vector<double>& counts);
std::string drive_stream_csv(const std::vector<double>& drive);

// Feed a recorded count stream through the controller, return the drive.
std::vector<double> replay_counts(const ControllerConfig& ctrl, const std::vector<double>& counts);

}  // namespace pfc

#endif
