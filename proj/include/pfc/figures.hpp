#ifndef PFC_FIGURES_HPP
#define PFC_FIGURES_HPP

#include <optional>
#include <string>

#include "pfc/analysis.hpp"
#include "pfc/config.hpp"
#include "pfc/sweep.hpp"

namespace pfc {

// Pre-baked experiment configurations, keyed by figure name and scale
// ("desk" = minutes on a laptop, "full" = long-running). Throws on unknown
// names.
std::string figure_config_text(const std::string& name, const std::string& scale);

struct TransmissionSpectrumResult {
  Psd psd;
  SpectrumFit fit;
  double f_radial = 0.0;  // Hz, derived small-oscillation frequency
};

// No-feedback transmission ensemble -> averaged PSD -> Q fit.
TransmissionSpectrumResult run_transmission_spectrum(const ExperimentConfig& cfg);

// Runs the named experiment and writes its plot-ready tables into out_dir.
// Returns 0 on success, 3 when every sweep point was degenerate.
int reproduce_figure(const std::string& name, const std::string& scale, const std::string& out_dir,
                     std::optional<uint64_t> seed_override = std::nullopt, int workers_override = -1,
                     const std::vector<std::string>& overrides = {});

}  // namespace pfc

#endif
