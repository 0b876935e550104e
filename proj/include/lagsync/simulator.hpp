#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "lagsync/controllers.hpp"
#include "lagsync/dynamics.hpp"
#include "lagsync/topology.hpp"
#include "lagsync/trajectory.hpp"

namespace lagsync {

enum class ControlLaw {
  TrackingSync,
  Adaptive,
  Pd,
  VelocityOnly,
  Partial,
  Delayed,
};

struct ControllerSpec {
  ControlLaw law = ControlLaw::TrackingSync;
  double delay_T = 0.0;  // [s], Delayed law only
  Vec a_hat0;            // initial estimate, Adaptive law only
};

struct DisturbanceSpec {
  enum class Kind { None, Sinusoid, Noise };
  Kind kind = Kind::None;
  double magnitude = 0.0;  // [N m], bound on each torque component
  double freq_hz = 0.5;    // Sinusoid only
};

struct InitialConditions {
  double q_bound = 0.5;     // [rad], uniform draw half-width
  double qdot_bound = 0.2;  // [rad/s]
  std::vector<RobotState> explicit_states;  // overrides seeded draws
};

/// Feed of relayed desired trajectories: member i of this group receives
/// (q, qdot) of member sources[i] in group `from_group`, mapped through
/// scale/offset on the matched leading coordinates. qddot_d is estimated by
/// a first-order high-pass differentiator with time constant hp_tau.
struct RelaySpec {
  int from_group = 0;
  std::vector<int> sources;
  double scale = 1.0;
  Vec offset;  // empty = zero
};

struct GroupSpec {
  std::vector<std::shared_ptr<const LagrangianModel>> members;
  CouplingGraph graph;
  Gains gains;
  ControllerSpec controller;
  std::optional<DesiredTrajectory> trajectory;
  std::optional<RelaySpec> relay;
  double hp_tau = 0.01;  // [s], relayed qddot_d filter constant
  /// Piecewise-constant topology switching: (switch time, graph), sorted.
  /// The graph member above is active from t = 0.
  std::vector<std::pair<double, CouplingGraph>> graph_schedule;

  int size() const { return static_cast<int>(members.size()); }
  int dof() const { return members.empty() ? 0 : members.front()->dof(); }
};

struct ConcurrentScenario {
  std::vector<GroupSpec> groups;

  int total_robots() const;
  void validate(double dt) const;
};

struct SimConfig {
  double dt = 1e-3;       // [s]
  double t_final = 10.0;  // [s]
  int decimation = 10;    // log every decimation-th step
  std::uint64_t seed = 0;
  InitialConditions ic;
  DisturbanceSpec disturbance;
};

/// Raised when the integration produces non-finite state.
class SimulationBlowup : public std::runtime_error {
 public:
  SimulationBlowup(double t, const std::string& msg)
      : std::runtime_error(msg), time(t) {}
  double time;
};

/// Time-stamped (q, qdot) history used by the delayed coupling law.
class DelayBuffer {
 public:
  void append(double t, const Vec& q, const Vec& qdot);
  bool empty() const { return t_.empty(); }
  double earliest_time() const;
  double latest_time() const;
  /// Linear interpolation between bracketing samples. Rejects non-causal
  /// queries (t_query beyond the newest sample) and queries before the
  /// first sample.
  void sample(double t_query, Vec& q, Vec& qdot) const;

 private:
  std::vector<double> t_;
  std::vector<Vec> q_;
  std::vector<Vec> qdot_;
};

std::pair<Vec, Vec> delay_sample(const DelayBuffer& buffer, double t_query);

struct NetworkState {
  double t = 0.0;
  std::vector<RobotState> robots;
  std::vector<Vec> a_hat;     // empty vectors when not adaptive
  std::vector<Vec> hp_state;  // relayed qddot_d filter states
  std::vector<DelayBuffer> buffers;
  std::vector<int> graph_index;  // active schedule entry per group
};

struct TrajectoryLog {
  double dt_sample = 0.0;
  std::vector<int> group_offsets;
  std::vector<int> group_sizes;
  std::vector<double> t;
  struct RobotTrack {
    Mat q;      // rows = samples
    Mat qdot;
    Mat q_d;    // reference actually applied (analytic or relayed)
    Mat qdot_d;
    Mat s;
    Mat tau;
    Mat a_hat;  // 0 columns when not adaptive
  };
  std::vector<RobotTrack> robots;
  double delay_warmup_until = 0.0;  // > 0 when the hold-zero policy fired

  int robot_count() const { return static_cast<int>(robots.size()); }
  int samples() const { return static_cast<int>(t.size()); }
  int dof(int robot) const { return static_cast<int>(robots[robot].q.cols()); }

  /// Long-format CSV: t, robot, q1..qn, qd1..qdn, s1..sn, tau1..taun
  /// [, ahat1..ahatk]. Requires a uniform joint count across robots.
  void write_csv(std::ostream& out) const;
};

/// Deterministic fixed-step RK4 integration of the coupled network.
/// Controllers are evaluated at every RK4 stage on stage-consistent
/// snapshots; delay buffers are appended once per step.
class Simulator {
 public:
  Simulator(ConcurrentScenario scenario, SimConfig config);

  const NetworkState& state() const { return state_; }
  const ConcurrentScenario& scenario() const { return scenario_; }
  const SimConfig& config() const { return config_; }

  void step();
  TrajectoryLog run();

 private:
  struct RobotRef {
    int group;
    int member;
    int q_off;   // offset of q in the packed state
    int n;
    int a_off;   // -1 when not adaptive
    int a_dim;
    int z_off;   // -1 when not relayed
  };

  struct StageOutput {
    std::vector<Vec> tau;
    std::vector<TrajectorySample> sample;
    std::vector<Vec> s;
  };

  void derivative(double t, const Vec& x, Vec& dx, StageOutput* out) const;
  const CouplingGraph& active_graph(int group) const;
  int group_offset(int group) const { return group_offsets_[group]; }
  void draw_noise_for_step();
  Vec disturbance(int robot, double t) const;
  void log_row(TrajectoryLog& log, double t, const Vec& x);

  ConcurrentScenario scenario_;
  SimConfig config_;
  NetworkState state_;
  std::vector<RobotRef> refs_;
  std::vector<int> group_offsets_;
  int state_dim_ = 0;
  long step_index_ = 0;
  long total_steps_ = 0;
  bool any_delay_ = false;
  double warmup_until_ = 0.0;
  std::mt19937_64 noise_rng_;
  std::vector<Vec> held_noise_;
  long noise_step_ = -1;  // step the held noise was drawn for

  Vec pack() const;
  void unpack(const Vec& x);
};

TrajectoryLog run(const SimConfig& config, const GroupSpec& scenario);
TrajectoryLog run_concurrent(const SimConfig& config,
                             const ConcurrentScenario& scenario);

}  // namespace lagsync
