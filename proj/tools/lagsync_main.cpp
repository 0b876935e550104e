// Command-line front end: gain condition checks, config-driven simulation
// runs with CSV output, and the bundled scenario presets.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lagsync/analysis.hpp"
#include "lagsync/config.hpp"
#include "lagsync/presets.hpp"
#include "lagsync/simulator.hpp"

namespace {

using namespace lagsync;

constexpr int kExitOk = 0;
constexpr int kExitConditions = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBlowup = 3;
constexpr int kExitCriteria = 4;

std::string format_vec(const Vec& v) {
  std::ostringstream out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out << " ";
    out << v[i];
  }
  return out.str();
}

struct GroupConditions {
  ConditionReport report;
  bool satisfied;  // requested regime holds
};

GroupConditions analyze_group(const GroupSpec& group) {
  ModifiedLaplacian lap =
      modified_laplacian(group.graph, group.gains, group.dof());
  ModifiedLaplacian sym = lap;
  if (!sym.symmetric) {
    sym.L = 0.5 * (lap.L + lap.L.transpose()).eval();
    sym.symmetric = true;
  }
  const SyncBasis basis = sync_basis(sym);
  GroupConditions out{check_conditions(lap, basis), false};
  // A deliberately indifferent gain choice (D1 = 0) asks for pure
  // synchronization; anything else asks for tracking plus synchronization.
  const bool indifferent_intent =
      out.report.d1.cwiseAbs().maxCoeff() <
      1e-9 * std::max(1.0, group.gains.k1.maxCoeff());
  out.satisfied = indifferent_intent
                      ? out.report.indifferent
                      : (out.report.tracking_ok && out.report.sync_ok);
  return out;
}

void print_conditions(const ExperimentConfig& config) {
  for (std::size_t g = 0; g < config.scenario.groups.size(); ++g) {
    const auto& group = config.scenario.groups[g];
    const GroupConditions cond = analyze_group(group);
    const auto& r = cond.report;
    std::cout << "group " << g + 1 << ": p=" << group.size()
              << " n=" << group.dof() << "\n";
    std::cout << "  tracking_ok=" << (r.tracking_ok ? "yes" : "no")
              << " sync_ok=" << (r.sync_ok ? "yes" : "no")
              << " indifferent=" << (r.indifferent ? "yes" : "no")
              << (r.symmetrized ? " (symmetrized digraph)" : "") << "\n";
    std::cout << "  D1 diag: " << format_vec(r.d1.diagonal()) << "\n";
    std::cout << "  D2 spectrum (descending): " << format_vec(r.d2) << "\n";
    std::cout << "  [L] spectrum (ascending): " << format_vec(r.spectrum)
              << "\n";
    std::cout << "  rate_tracking=" << r.rate_tracking
              << " rate_sync=" << r.rate_sync << "\n";
    const int p = group.size();
    const Vec margin = p >= 3 ? Vec(group.gains.k1 - 2.0 * group.gains.k2)
                              : Vec(group.gains.k1 - group.gains.k2);
    std::cout << "  sufficient condition " << (p >= 3 ? "K1-2K2" : "K1-K2")
              << " > 0: " << ((margin.array() > 0.0).all() ? "yes" : "no")
              << "  (per joint: " << format_vec(margin) << ")\n";
    std::cout << "  requested regime "
              << (cond.satisfied ? "satisfied" : "NOT satisfied") << "\n";
  }
}

bool all_conditions_satisfied(const ExperimentConfig& config) {
  for (const auto& group : config.scenario.groups) {
    if (!analyze_group(group).satisfied) return false;
  }
  return true;
}

TrajectoryLog slice_log(const TrajectoryLog& log, int first, int count) {
  TrajectoryLog out;
  out.dt_sample = log.dt_sample;
  out.t = log.t;
  out.delay_warmup_until = log.delay_warmup_until;
  out.group_offsets = {0};
  out.group_sizes = {count};
  for (int r = first; r < first + count; ++r) out.robots.push_back(log.robots[r]);
  return out;
}

void write_outputs(const ExperimentConfig& config, const TrajectoryLog& log,
                   const std::string& out_dir, const std::string& stem) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const std::string log_path = out_dir + "/" + stem + ".csv";
  bool uniform = true;
  for (int r = 1; r < log.robot_count(); ++r) {
    if (log.dof(r) != log.dof(0) ||
        log.robots[r].a_hat.cols() != log.robots[0].a_hat.cols()) {
      uniform = false;
      break;
    }
  }
  if (uniform) {
    std::ofstream out(log_path);
    log.write_csv(out);
    std::cout << "wrote " << log_path << "\n";
  } else {
    for (std::size_t g = 0; g < log.group_offsets.size(); ++g) {
      const std::string path =
          out_dir + "/" + stem + "_group" + std::to_string(g + 1) + ".csv";
      std::ofstream out(path);
      slice_log(log, log.group_offsets[g], log.group_sizes[g]).write_csv(out);
      std::cout << "wrote " << path << "\n";
    }
  }

  // Per-run metric summary against the first group's spectral basis.
  const auto& group = config.scenario.groups.front();
  ModifiedLaplacian lap =
      modified_laplacian(group.graph, group.gains, group.dof());
  if (!lap.symmetric) {
    lap.L = 0.5 * (lap.L + lap.L.transpose()).eval();
    lap.symmetric = true;
  }
  const SyncBasis basis = sync_basis(lap);
  const bool residual_applies =
      !config.concurrent &&
      (group.controller.law == ControlLaw::TrackingSync ||
       group.controller.law == ControlLaw::Partial);
  ModelList models(group.members.begin(), group.members.end());
  const RunSummary summary =
      summarize(stem, log, basis, residual_applies ? &lap.L : nullptr,
                residual_applies ? &models : nullptr);
  const std::string summary_path = out_dir + "/" + stem + "_summary.csv";
  std::ofstream out(summary_path);
  write_summary_csv(out, {summary});
  std::cout << "wrote " << summary_path << "\n";
}

DisturbanceSpec parse_disturbance(const std::string& text) {
  DisturbanceSpec d;
  const auto first = text.find(':');
  const std::string kind = text.substr(0, first);
  if (kind == "none") return d;
  if (kind == "sinusoid") d.kind = DisturbanceSpec::Kind::Sinusoid;
  else if (kind == "noise") d.kind = DisturbanceSpec::Kind::Noise;
  else throw ConfigError("unknown disturbance '" + kind + "'");
  if (first == std::string::npos) {
    throw ConfigError("disturbance needs a magnitude, e.g. sinusoid:0.1");
  }
  std::string rest = text.substr(first + 1);
  const auto second = rest.find(':');
  d.magnitude = std::stod(rest.substr(0, second));
  if (second != std::string::npos) d.freq_hz = std::stod(rest.substr(second + 1));
  return d;
}

int run_one(const ExperimentConfig& config, const std::string& out_dir,
            const std::string& stem) {
  try {
    const TrajectoryLog log =
        config.concurrent ? run_concurrent(config.sim, config.scenario)
                          : lagsync::run(config.sim, config.scenario.groups[0]);
    write_outputs(config, log, out_dir, stem);
    return kExitOk;
  } catch (const SimulationBlowup& e) {
    std::cerr << "blow-up: " << e.what() << " (last good t = " << e.time
              << " s)\n";
    return kExitBlowup;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lagsync: decentralized synchronization-tracking control of networked "
      "Lagrangian systems"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", preset_name, presets_dir;
  std::string disturbance_text;
  std::uint64_t seed = 0;
  double dt = 0.0, t_final = 0.0;
  bool force = false, dry_run = false;
  int sweep = 1;
  bool have_seed = false;

  auto* verify = app.add_subcommand(
      "verify-gains", "Check tracking/synchronization gain conditions");
  verify->add_option("--config", config_path, "experiment JSON file")
      ->required();

  auto* simulate =
      app.add_subcommand("simulate", "Run an experiment and write CSV logs");
  simulate->add_option("--config", config_path, "experiment JSON file")
      ->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--seed", seed, "override the RNG seed")
      ->each([&](const std::string&) { have_seed = true; });
  simulate->add_option("--dt", dt, "override the integration step [s]");
  simulate->add_option("--t-final", t_final, "override the end time [s]");
  simulate->add_flag("--force", force, "run even if gain conditions fail");
  simulate->add_flag("--dry-run", dry_run,
                     "validate and print the plan without writing");
  simulate->add_option("--disturbance", disturbance_text,
                       "bounded torque disturbance, kind:magnitude[:freq_hz]");
  simulate->add_option("--sweep", sweep,
                       "run N seeds (seed..seed+N-1) as independent runs");

  auto* reproduce = app.add_subcommand(
      "reproduce", "Run a bundled scenario preset and check it");
  reproduce->add_option("--preset", preset_name, "fig4 | fig5 | fig6a | fig6b")
      ->required();
  reproduce->add_option("--out", out_dir, "output directory");
  reproduce->add_option("--presets-dir", presets_dir,
                        "directory holding the preset JSON files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      const ExperimentConfig config = load_experiment(config_path);
      print_conditions(config);
      return all_conditions_satisfied(config) ? kExitOk : kExitConditions;
    }

    if (simulate->parsed()) {
      ExperimentConfig config = load_experiment(config_path);
      if (have_seed) config.sim.seed = seed;
      if (dt > 0.0) config.sim.dt = dt;
      if (t_final > 0.0) config.sim.t_final = t_final;
      if (!disturbance_text.empty()) {
        config.sim.disturbance = parse_disturbance(disturbance_text);
      }
      // Re-validate after overrides.
      config.scenario.validate(config.sim.dt);

      if (!force && !all_conditions_satisfied(config)) {
        std::cerr << "gain conditions not satisfied; use verify-gains for "
                     "details or --force to run anyway\n";
        return kExitConditions;
      }

      if (dry_run) {
        std::cout << "plan: experiment '" << config.name << "'\n";
        for (std::size_t g = 0; g < config.scenario.groups.size(); ++g) {
          const auto& group = config.scenario.groups[g];
          std::cout << "  group " << g + 1 << ": p=" << group.size()
                    << " n=" << group.dof() << "\n";
        }
        const long steps = std::lround(config.sim.t_final / config.sim.dt);
        std::cout << "  steps=" << steps << " dt=" << config.sim.dt
                  << " decimation=" << config.sim.decimation
                  << " seed=" << config.sim.seed << " sweep=" << sweep << "\n";
        std::cout << "  would write " << out_dir << "/" << config.name
                  << ".csv and " << config.name << "_summary.csv\n";
        return kExitOk;
      }

      if (sweep <= 1) {
        return run_one(config, out_dir, config.name);
      }
      std::vector<std::future<int>> futures;
      for (int k = 0; k < sweep; ++k) {
        ExperimentConfig variant = config;
        variant.sim.seed = config.sim.seed + static_cast<std::uint64_t>(k);
        const std::string stem =
            config.name + "_seed" + std::to_string(variant.sim.seed);
        futures.push_back(std::async(std::launch::async,
                                     [variant, out_dir, stem]() {
                                       return run_one(variant, out_dir, stem);
                                     }));
      }
      int rc = kExitOk;
      for (auto& f : futures) rc = std::max(rc, f.get());
      return rc;
    }

    if (reproduce->parsed()) {
      const ExperimentConfig config = load_preset(preset_name, presets_dir);
      TrajectoryLog log;
      try {
        log = config.concurrent
                  ? run_concurrent(config.sim, config.scenario)
                  : lagsync::run(config.sim, config.scenario.groups[0]);
      } catch (const SimulationBlowup& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return kExitBlowup;
      }
      write_outputs(config, log, out_dir, config.name);
      const PresetReport report = evaluate_preset(preset_name, config, log);
      for (const auto& line : report.lines) std::cout << line << "\n";
      std::cout << "preset " << preset_name << ": "
                << (report.pass ? "PASS" : "FAIL") << "\n";
      return report.pass ? kExitOk : kExitCriteria;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
