#include "lagsync/presets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#ifndef LAGSYNC_PRESET_DIR
#define LAGSYNC_PRESET_DIR "presets"
#endif

namespace lagsync {

std::vector<std::string> preset_names() {
  return {"fig4", "fig5", "fig6a", "fig6b"};
}

std::string default_preset_dir() {
  if (const char* env = std::getenv("LAGSYNC_PRESET_DIR")) return env;
  return LAGSYNC_PRESET_DIR;
}

ExperimentConfig load_preset(const std::string& name, const std::string& dir) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("unknown preset '" + name +
                      "' (expected fig4, fig5, fig6a or fig6b)");
  }
  const std::string base = dir.empty() ? default_preset_dir() : dir;
  return load_experiment(base + "/" + name + ".json");
}

namespace {

struct Checker {
  PresetReport report;

  void check(const std::string& what, double value, double threshold,
             bool want_below) {
    const bool ok = want_below ? value < threshold : value > threshold;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s: %s = %.4g (%s %.4g)",
                  ok ? "PASS" : "FAIL", what.c_str(), value,
                  want_below ? "<" : ">", threshold);
    report.lines.emplace_back(buf);
    if (!ok) report.pass = false;
  }
};

SyncBasis group_basis(const ExperimentConfig& config, int g) {
  const auto& group = config.scenario.groups[g];
  ModifiedLaplacian lap =
      modified_laplacian(group.graph, group.gains, group.dof());
  if (!lap.symmetric) {
    lap.L = 0.5 * (lap.L + lap.L.transpose()).eval();
    lap.symmetric = true;
  }
  return sync_basis(lap);
}

// sqrt(sum_i ||q_i - mean||^2) at the final sample: the position projection
// onto the complement of the consensus direction for the whole network.
double final_dispersion(const TrajectoryLog& log) {
  const int p = log.robot_count();
  const int n = log.dof(0);
  const int k = log.samples() - 1;
  Vec mean = Vec::Zero(n);
  for (int i = 0; i < p; ++i) {
    mean += log.robots[i].q.row(k).transpose();
  }
  mean /= p;
  double sum = 0.0;
  for (int i = 0; i < p; ++i) {
    sum += (Vec(log.robots[i].q.row(k).transpose()) - mean).squaredNorm();
  }
  return std::sqrt(sum);
}

double tail_mean(const ErrorSeries& series, double fraction) {
  const std::size_t count = series.value.size();
  const std::size_t start =
      static_cast<std::size_t>((1.0 - fraction) * count);
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t k = start; k < count; ++k) {
    sum += series.value[k];
    ++used;
  }
  return used > 0 ? sum / used : 0.0;
}

void evaluate_fig4(const ExperimentConfig& config, const TrajectoryLog& log,
                   Checker& c) {
  const SyncBasis basis = group_basis(config, 0);
  const ErrorSeries sync = sync_error_positions(log, basis);
  c.check("sync error at t_final", sync.final_value(), 1e-3, true);
  const auto tracks = tracking_error(log);
  for (int r = 0; r < log.robot_count(); ++r) {
    c.check("robot " + std::to_string(r + 1) + " tracking error at t_final",
            tracks[r].final_value(), 1e-2, true);
  }
  const RateFit fit_sync = fit_rate(sync);
  const RateFit fit_track = fit_rate(tracking_error_aggregate(log));
  c.check("sync rate fit r^2", fit_sync.r_squared, 0.95, false);
  c.check("tracking rate fit r^2", fit_track.r_squared, 0.95, false);
  c.check("lambda_sync - lambda_track", fit_sync.lambda - fit_track.lambda,
          0.0, false);
}

void evaluate_fig5(const ExperimentConfig& config, const TrajectoryLog& log,
                   Checker& c) {
  for (std::size_t g = 0; g < config.scenario.groups.size(); ++g) {
    const SyncBasis basis = group_basis(config, static_cast<int>(g));
    const ErrorSeries sync =
        sync_error_positions(log, basis, log.group_offsets[g]);
    c.check("group " + std::to_string(g + 1) + " sync error at t_final",
            sync.final_value(), 1e-3, true);
  }
  const auto tracks = tracking_error(log);
  for (std::size_t g = 1; g < config.scenario.groups.size(); ++g) {
    const int offset = log.group_offsets[g];
    for (int i = 0; i < log.group_sizes[g]; ++i) {
      c.check("group " + std::to_string(g + 1) + " robot " +
                  std::to_string(i + 1) + " relayed tracking error",
              tracks[offset + i].final_value(), 1e-2, true);
    }
  }
  c.check("whole-network sync error at t_final", final_dispersion(log), 1e-2,
          true);
}

void evaluate_fig6(const ExperimentConfig& config, const TrajectoryLog& log,
                   bool indifferent, Checker& c) {
  const SyncBasis basis = group_basis(config, 0);
  const ErrorSeries sync = sync_error_positions(log, basis);
  c.check("sync error at t_final", sync.final_value(), 1e-2, true);

  const auto tracks = tracking_error(log);
  if (indifferent) {
    for (int r = 0; r < log.robot_count(); ++r) {
      c.check("robot " + std::to_string(r + 1) +
                  " tracking error tail mean (bounded away from zero)",
              tail_mean(tracks[r], 0.25), 0.05, false);
    }
  } else {
    for (int r = 0; r < log.robot_count(); ++r) {
      c.check("robot " + std::to_string(r + 1) + " tracking error at t_final",
              tracks[r].final_value(), 1e-2, true);
    }
  }

  double max_ahat = 0.0;
  for (int r = 0; r < log.robot_count(); ++r) {
    max_ahat = std::max(max_ahat,
                        log.robots[r].a_hat.cwiseAbs().maxCoeff());
  }
  c.check("parameter estimates bounded, max |a_hat|", max_ahat, 1e3, true);
}

}  // namespace

PresetReport evaluate_preset(const std::string& name,
                             const ExperimentConfig& config,
                             const TrajectoryLog& log) {
  Checker c;
  c.report.pass = true;
  if (name == "fig4") {
    evaluate_fig4(config, log, c);
  } else if (name == "fig5") {
    evaluate_fig5(config, log, c);
  } else if (name == "fig6a") {
    evaluate_fig6(config, log, false, c);
  } else if (name == "fig6b") {
    evaluate_fig6(config, log, true, c);
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c.report;
}

}  // namespace lagsync
