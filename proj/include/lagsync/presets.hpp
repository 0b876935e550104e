#pragma once

#include <string>
#include <vector>

#include "lagsync/analysis.hpp"
#include "lagsync/config.hpp"

namespace lagsync {

/// Bundled experiment presets: fig4 (four-robot tracking synchronization),
/// fig5 (ten-robot concurrent hierarchy), fig6a / fig6b (adaptive two-robot,
/// stable and indifferent gains).
std::vector<std::string> preset_names();

/// Directory holding the bundled preset files; the LAGSYNC_PRESET_DIR
/// environment variable overrides the build-time default.
std::string default_preset_dir();

ExperimentConfig load_preset(const std::string& name,
                             const std::string& dir = "");

struct PresetReport {
  bool pass = false;
  std::vector<std::string> lines;
};

/// Evaluates a finished preset run against its expected-behavior checks.
PresetReport evaluate_preset(const std::string& name,
                             const ExperimentConfig& config,
                             const TrajectoryLog& log);

}  // namespace lagsync
