#pragma once

#include <string>

#include "lagsync/simulator.hpp"

namespace lagsync {

/// Schema or validation failure in an experiment file (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fully parsed experiment: simulation parameters plus one or more robot
/// groups. Single-group experiments use scenario.groups[0].
struct ExperimentConfig {
  std::string name;
  SimConfig sim;
  ConcurrentScenario scenario;
  bool concurrent = false;
};

ExperimentConfig load_experiment(const std::string& path);
ExperimentConfig parse_experiment(const std::string& json_text);

}  // namespace lagsync
