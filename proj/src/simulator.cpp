#include "lagsync/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace lagsync {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

// ---------------------------------------------------------------------------
// DelayBuffer

void DelayBuffer::append(double t, const Vec& q, const Vec& qdot) {
  require(t_.empty() || t > t_.back(),
          "DelayBuffer: samples must be time-monotone");
  t_.push_back(t);
  q_.push_back(q);
  qdot_.push_back(qdot);
}

double DelayBuffer::earliest_time() const {
  require(!t_.empty(), "DelayBuffer: empty");
  return t_.front();
}

double DelayBuffer::latest_time() const {
  require(!t_.empty(), "DelayBuffer: empty");
  return t_.back();
}

void DelayBuffer::sample(double t_query, Vec& q, Vec& qdot) const {
  require(!t_.empty(), "DelayBuffer: empty");
  if (t_query > t_.back() + 1e-12) {
    throw ContractViolation("DelayBuffer: non-causal query at t = " +
                            std::to_string(t_query));
  }
  if (t_query < t_.front() - 1e-12) {
    throw ContractViolation("DelayBuffer: query precedes history");
  }
  const auto it = std::lower_bound(t_.begin(), t_.end(), t_query);
  const std::size_t hi =
      std::min<std::size_t>(it - t_.begin(), t_.size() - 1);
  if (hi == 0 || std::abs(t_[hi] - t_query) < 1e-12) {
    q = q_[hi];
    qdot = qdot_[hi];
    return;
  }
  const std::size_t lo = hi - 1;
  const double alpha = (t_query - t_[lo]) / (t_[hi] - t_[lo]);
  q = (1.0 - alpha) * q_[lo] + alpha * q_[hi];
  qdot = (1.0 - alpha) * qdot_[lo] + alpha * qdot_[hi];
}

std::pair<Vec, Vec> delay_sample(const DelayBuffer& buffer, double t_query) {
  Vec q, qdot;
  buffer.sample(t_query, q, qdot);
  return {std::move(q), std::move(qdot)};
}

// ---------------------------------------------------------------------------
// Scenario validation

int ConcurrentScenario::total_robots() const {
  int total = 0;
  for (const auto& g : groups) total += g.size();
  return total;
}

namespace {

void validate_group(const GroupSpec& group, int index, double dt,
                    const std::vector<GroupSpec>& groups) {
  require(!group.members.empty(), "scenario: group without members");
  const int n = group.dof();
  for (const auto& m : group.members) {
    require(m != nullptr, "scenario: null model");
    require(m->dof() == n,
            "scenario: members of one group must share the joint count");
  }
  require(group.graph.p == group.size(),
          "scenario: graph size does not match member count");
  group.gains.validate(n);

  const bool relayed = group.relay.has_value();
  if (relayed) {
    const auto& relay = *group.relay;
    require(relay.from_group >= 0 && relay.from_group < index,
            "scenario: relay edges must point to an earlier group "
            "(cyclic inter-group references rejected)");
    require(static_cast<int>(relay.sources.size()) == group.size(),
            "scenario: one relay source per member");
    const auto& src = groups[relay.from_group];
    for (int s : relay.sources) {
      require(s >= 0 && s < src.size(), "scenario: relay source out of range");
    }
    require(group.hp_tau > 0.0, "scenario: hp_tau must be positive");
    if (relay.offset.size() > 0) {
      require(relay.offset.size() == n,
              "scenario: relay offset length mismatch");
    }
  } else {
    require(group.trajectory.has_value(),
            "scenario: non-relayed group needs a desired trajectory");
    require(group.trajectory->dof() == n,
            "scenario: trajectory joint count mismatch");
  }

  const auto& ctl = group.controller;
  const bool needs_positive_lambda =
      ctl.law == ControlLaw::TrackingSync || ctl.law == ControlLaw::Adaptive ||
      ctl.law == ControlLaw::Partial || ctl.law == ControlLaw::Delayed;
  if (needs_positive_lambda) {
    require((group.gains.lambda.array() > 0.0).all(),
            "scenario: this law needs Lambda > 0");
  }

  switch (ctl.law) {
    case ControlLaw::Adaptive: {
      for (const auto& m : group.members) {
        require(m->has_regressor(),
                "scenario: adaptive law needs a model regressor");
      }
      const int dim_a = static_cast<int>(group.members.front()->params().size());
      require(ctl.a_hat0.size() == dim_a,
              "scenario: a_hat0 length must match the parameter vector");
      require(group.gains.has_gamma() && group.gains.gamma.rows() == dim_a,
              "scenario: adaptive law needs an SPD Gamma of matching size");
      break;
    }
    case ControlLaw::Pd:
    case ControlLaw::VelocityOnly: {
      for (const auto& m : group.members) {
        require(!m->gravity_enabled(),
                "scenario: PD coupling needs the gravity term zero or "
                "cancelled (set gravity_on = false)");
      }
      require(!relayed, "scenario: PD law uses a rest reference, not a relay");
      const auto src = group.trajectory->source();
      require(src == DesiredTrajectory::Source::Rest ||
                  src == DesiredTrajectory::Source::Zero,
              "scenario: PD law needs a rest (qdot_d = 0) reference");
      if (ctl.law == ControlLaw::VelocityOnly) {
        require((group.gains.lambda.array() == 0.0).all(),
                "scenario: velocity-only coupling is the Lambda = 0 case");
      }
      break;
    }
    case ControlLaw::Partial:
      require(group.graph.partial_mask.size() == n,
              "scenario: partial law needs the graph's 0/1 selector");
      break;
    case ControlLaw::Delayed:
      require(ctl.delay_T == 0.0 || ctl.delay_T >= dt,
              "scenario: delay_T must be 0 or at least one step dt");
      break;
    case ControlLaw::TrackingSync:
      break;
  }

  if (group.graph.inhibitory_link) {
    require(group.gains.has_inhibition(),
            "scenario: inhibitory link declared without K_inhib gain");
  }

  double prev = 0.0;
  for (const auto& [t_switch, graph] : group.graph_schedule) {
    require(t_switch > prev, "scenario: graph schedule must be ascending");
    require(graph.p == group.size(),
            "scenario: scheduled graph size mismatch");
    prev = t_switch;
  }
}

}  // namespace

void ConcurrentScenario::validate(double dt) const {
  require(!groups.empty(), "scenario: no groups");
  for (std::size_t g = 0; g < groups.size(); ++g) {
    validate_group(groups[g], static_cast<int>(g), dt, groups);
  }
}

// ---------------------------------------------------------------------------
// TrajectoryLog

namespace {

void append_fields(std::string& line, const Mat& row_source, int row, int cols) {
  char buf[32];
  for (int c = 0; c < cols; ++c) {
    std::snprintf(buf, sizeof(buf), ",%.17g", row_source(row, c));
    line += buf;
  }
}

}  // namespace

void TrajectoryLog::write_csv(std::ostream& out) const {
  require(!robots.empty(), "TrajectoryLog: empty log");
  const int n = dof(0);
  const int dim_a = static_cast<int>(robots.front().a_hat.cols());
  for (const auto& r : robots) {
    require(static_cast<int>(r.q.cols()) == n &&
                static_cast<int>(r.a_hat.cols()) == dim_a,
            "TrajectoryLog: CSV export needs a uniform joint count; write "
            "per-group logs for mixed networks");
  }

  std::string header = "t,robot";
  auto add_cols = [&](const char* stem, int count) {
    for (int j = 1; j <= count; ++j) {
      header += ",";
      header += stem;
      header += std::to_string(j);
    }
  };
  add_cols("q", n);
  add_cols("qd", n);
  add_cols("s", n);
  add_cols("tau", n);
  if (dim_a > 0) add_cols("ahat", dim_a);
  out << header << "\n";

  char buf[32];
  for (int row = 0; row < samples(); ++row) {
    for (int r = 0; r < robot_count(); ++r) {
      std::string line;
      std::snprintf(buf, sizeof(buf), "%.17g", t[row]);
      line += buf;
      line += "," + std::to_string(r + 1);
      append_fields(line, robots[r].q, row, n);
      append_fields(line, robots[r].q_d, row, n);
      append_fields(line, robots[r].s, row, n);
      append_fields(line, robots[r].tau, row, n);
      if (dim_a > 0) append_fields(line, robots[r].a_hat, row, dim_a);
      out << line << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Simulator

Simulator::Simulator(ConcurrentScenario scenario, SimConfig config)
    : scenario_(std::move(scenario)), config_(config) {
  require(config_.dt > 0.0, "sim: dt must be positive");
  require(config_.t_final >= config_.dt, "sim: t_final must cover one step");
  require(config_.decimation >= 1, "sim: decimation must be >= 1");
  scenario_.validate(config_.dt);

  total_steps_ = std::lround(config_.t_final / config_.dt);
  require(std::abs(total_steps_ * config_.dt - config_.t_final) <
              1e-9 * std::max(1.0, config_.t_final),
          "sim: t_final must be an integer number of steps");
  require(total_steps_ % config_.decimation == 0,
          "sim: step count must be divisible by the output decimation");

  // State layout per robot: q, qdot [, a_hat][, hp filter]
  int offset = 0;
  int robot_index = 0;
  for (int g = 0; g < static_cast<int>(scenario_.groups.size()); ++g) {
    const auto& group = scenario_.groups[g];
    group_offsets_.push_back(robot_index);
    const int n = group.dof();
    const bool adaptive = group.controller.law == ControlLaw::Adaptive;
    const int dim_a =
        adaptive ? static_cast<int>(group.members.front()->params().size())
                 : 0;
    for (int i = 0; i < group.size(); ++i) {
      RobotRef ref;
      ref.group = g;
      ref.member = i;
      ref.n = n;
      ref.q_off = offset;
      offset += 2 * n;
      ref.a_dim = dim_a;
      ref.a_off = adaptive ? offset : -1;
      if (adaptive) offset += dim_a;
      ref.z_off = group.relay ? offset : -1;
      if (group.relay) offset += n;
      refs_.push_back(ref);
      ++robot_index;
    }
    if (group.controller.law == ControlLaw::Delayed &&
        group.controller.delay_T > 0.0) {
      any_delay_ = true;
      warmup_until_ = std::max(warmup_until_, group.controller.delay_T);
    }
  }
  state_dim_ = offset;

  // Initial conditions.
  const int p_total = scenario_.total_robots();
  state_.robots.resize(p_total);
  state_.a_hat.resize(p_total);
  state_.hp_state.resize(p_total);
  state_.buffers.resize(p_total);
  state_.graph_index.assign(scenario_.groups.size(), -1);
  state_.t = 0.0;

  if (!config_.ic.explicit_states.empty()) {
    require(static_cast<int>(config_.ic.explicit_states.size()) == p_total,
            "sim: one explicit initial state per robot");
    for (int r = 0; r < p_total; ++r) {
      require(config_.ic.explicit_states[r].dof() == refs_[r].n,
              "sim: explicit initial state dimension mismatch");
      state_.robots[r] = config_.ic.explicit_states[r];
    }
  } else {
    std::mt19937_64 rng(config_.seed);
    std::uniform_real_distribution<double> uq(-config_.ic.q_bound,
                                              config_.ic.q_bound);
    std::uniform_real_distribution<double> uv(-config_.ic.qdot_bound,
                                              config_.ic.qdot_bound);
    for (int r = 0; r < p_total; ++r) {
      Vec q(refs_[r].n), qdot(refs_[r].n);
      for (int j = 0; j < refs_[r].n; ++j) q[j] = uq(rng);
      for (int j = 0; j < refs_[r].n; ++j) qdot[j] = uv(rng);
      state_.robots[r] = RobotState(std::move(q), std::move(qdot));
    }
  }

  for (int r = 0; r < p_total; ++r) {
    const auto& ref = refs_[r];
    const auto& group = scenario_.groups[ref.group];
    if (ref.a_off >= 0) state_.a_hat[r] = group.controller.a_hat0;
    if (ref.z_off >= 0) {
      // Start the high-pass differentiator on the relayed velocity so the
      // initial qddot_d estimate is zero.
      const auto& relay = *group.relay;
      const int src = group_offset(relay.from_group) + relay.sources[ref.member];
      Vec z = Vec::Zero(ref.n);
      const Vec& src_qdot = state_.robots[src].qdot;
      const int matched = std::min<int>(ref.n, src_qdot.size());
      z.head(matched) = relay.scale * src_qdot.head(matched);
      state_.hp_state[r] = z;
    }
    if (group.controller.law == ControlLaw::Delayed &&
        group.controller.delay_T > 0.0) {
      state_.buffers[r].append(0.0, state_.robots[r].q,
                               state_.robots[r].qdot);
    }
  }

  noise_rng_.seed(config_.seed ^ 0x9e3779b97f4a7c15ull);
  held_noise_.assign(p_total, Vec());
}

const CouplingGraph& Simulator::active_graph(int group) const {
  const auto& spec = scenario_.groups[group];
  const int idx = state_.graph_index[group];
  if (idx < 0) return spec.graph;
  return spec.graph_schedule[idx].second;
}

Vec Simulator::pack() const {
  Vec x(state_dim_);
  for (std::size_t r = 0; r < refs_.size(); ++r) {
    const auto& ref = refs_[r];
    x.segment(ref.q_off, ref.n) = state_.robots[r].q;
    x.segment(ref.q_off + ref.n, ref.n) = state_.robots[r].qdot;
    if (ref.a_off >= 0) x.segment(ref.a_off, ref.a_dim) = state_.a_hat[r];
    if (ref.z_off >= 0) x.segment(ref.z_off, ref.n) = state_.hp_state[r];
  }
  return x;
}

void Simulator::unpack(const Vec& x) {
  for (std::size_t r = 0; r < refs_.size(); ++r) {
    const auto& ref = refs_[r];
    state_.robots[r].q = x.segment(ref.q_off, ref.n);
    state_.robots[r].qdot = x.segment(ref.q_off + ref.n, ref.n);
    if (ref.a_off >= 0) state_.a_hat[r] = x.segment(ref.a_off, ref.a_dim);
    if (ref.z_off >= 0) state_.hp_state[r] = x.segment(ref.z_off, ref.n);
  }
}

Vec Simulator::disturbance(int robot, double t) const {
  const auto& d = config_.disturbance;
  const int n = refs_[robot].n;
  switch (d.kind) {
    case DisturbanceSpec::Kind::None:
      return Vec();
    case DisturbanceSpec::Kind::Sinusoid:
      return Vec::Constant(
          n, d.magnitude * std::sin(2.0 * kPi * d.freq_hz * t + robot));
    case DisturbanceSpec::Kind::Noise:
      return held_noise_[robot];
  }
  return Vec();
}

// Noise is piecewise constant over a step: drawn once per step, shared by
// the RK4 stages and by a log row taken at the step's start.
void Simulator::draw_noise_for_step() {
  if (config_.disturbance.kind != DisturbanceSpec::Kind::Noise) return;
  if (noise_step_ == step_index_) return;
  std::uniform_real_distribution<double> u(-config_.disturbance.magnitude,
                                           config_.disturbance.magnitude);
  for (std::size_t r = 0; r < refs_.size(); ++r) {
    Vec d(refs_[r].n);
    for (int j = 0; j < refs_[r].n; ++j) d[j] = u(noise_rng_);
    held_noise_[r] = std::move(d);
  }
  noise_step_ = step_index_;
}

void Simulator::derivative(double t, const Vec& x, Vec& dx,
                           StageOutput* out) const {
  if (!x.allFinite()) {
    throw SimulationBlowup(
        state_.t, "simulation diverged at t = " + std::to_string(state_.t) +
                      " s (non-finite stage state)");
  }
  const int p_total = static_cast<int>(refs_.size());
  std::vector<RobotState> robots(p_total);
  for (int r = 0; r < p_total; ++r) {
    const auto& ref = refs_[r];
    robots[r].q = x.segment(ref.q_off, ref.n);
    robots[r].qdot = x.segment(ref.q_off + ref.n, ref.n);
  }

  // Reference samples (analytic, rest or relayed from the stage state).
  std::vector<TrajectorySample> samples(p_total);
  for (int r = 0; r < p_total; ++r) {
    const auto& ref = refs_[r];
    const auto& group = scenario_.groups[ref.group];
    if (group.relay) {
      const auto& relay = *group.relay;
      const int src =
          group_offset(relay.from_group) + relay.sources[ref.member];
      const int matched = std::min<int>(ref.n, refs_[src].n);
      TrajectorySample s;
      s.q_d = relay.offset.size() > 0 ? relay.offset : Vec::Zero(ref.n);
      s.qdot_d = Vec::Zero(ref.n);
      s.q_d.head(matched) += relay.scale * robots[src].q.head(matched);
      s.qdot_d.head(matched) = relay.scale * robots[src].qdot.head(matched);
      const Vec z = x.segment(ref.z_off, ref.n);
      s.qddot_d = (s.qdot_d - z) / group.hp_tau;
      samples[r] = std::move(s);
    } else {
      samples[r] = group.trajectory->sample(t);
    }
  }

  // Composite signals.
  std::vector<CompositeSignals> signals(p_total);
  for (int r = 0; r < p_total; ++r) {
    signals[r] = reference_signals(
        samples[r], robots[r], scenario_.groups[refs_[r].group].gains.lambda);
  }

  dx.setZero(state_dim_);
  std::vector<Vec> taus(out ? p_total : 0);

  for (int r = 0; r < p_total; ++r) {
    const auto& ref = refs_[r];
    const auto& group = scenario_.groups[ref.group];
    const auto& gains = group.gains;
    const auto& graph = active_graph(ref.group);
    const int base = group_offset(ref.group);
    const auto& edges = graph.in_edges[ref.member];

    Vec tau;
    Mat regressor_cache;
    switch (group.controller.law) {
      case ControlLaw::TrackingSync:
      case ControlLaw::Partial: {
        std::vector<Vec> neighbor_s;
        std::vector<double> weights;
        neighbor_s.reserve(edges.size());
        for (const auto& e : edges) {
          neighbor_s.push_back(signals[base + e.from].s);
          weights.push_back(e.weight);
        }
        const Vec* mask =
            graph.partial_mask.size() > 0 ? &graph.partial_mask : nullptr;
        tau = coupled_tracking_torque(*group.members[ref.member], robots[r],
                                      signals[r], neighbor_s, weights, gains,
                                      graph.self_coupling[ref.member], mask);
        break;
      }
      case ControlLaw::Adaptive: {
        const auto& model = *group.members[ref.member];
        regressor_cache = model.regressor(robots[r].q, robots[r].qdot,
                                          signals[r].qr_dot,
                                          signals[r].qr_ddot);
        tau = regressor_cache * x.segment(ref.a_off, ref.a_dim) -
              gains.k1.cwiseProduct(signals[r].s);
        for (const auto& e : edges) {
          tau += e.weight * gains.k2.cwiseProduct(signals[base + e.from].s);
        }
        break;
      }
      case ControlLaw::Pd:
      case ControlLaw::VelocityOnly: {
        std::vector<RobotState> neighbors;
        std::vector<double> weights;
        for (const auto& e : edges) {
          neighbors.push_back(robots[base + e.from]);
          weights.push_back(e.weight);
        }
        tau = pd_coupled_torque(robots[r], neighbors, weights, gains,
                                samples[r].q_d);
        break;
      }
      case ControlLaw::Delayed: {
        const double T = group.controller.delay_T;
        tau = coupled_tracking_torque(*group.members[ref.member], robots[r],
                                      signals[r], {}, {}, gains);
        for (const auto& e : edges) {
          Vec s_past;
          if (T == 0.0) {
            s_past = signals[base + e.from].s;
          } else {
            const double t_query = t - T;
            const auto& buffer = state_.buffers[base + e.from];
            if (t_query < buffer.earliest_time() - 1e-12) {
              continue;  // warm-up: hold the coupling at zero
            }
            Vec q_past, qdot_past;
            buffer.sample(t_query, q_past, qdot_past);
            // Delayed state, current-time desired trajectory.
            s_past = qdot_past - samples[r].qdot_d +
                     gains.lambda.cwiseProduct(q_past - samples[r].q_d);
          }
          tau += e.weight * gains.k2.cwiseProduct(s_past);
        }
        break;
      }
    }

    if (graph.inhibitory_link && gains.has_inhibition()) {
      const auto [a, b] = *graph.inhibitory_link;
      if (ref.member == a || ref.member == b) {
        const int partner = base + (ref.member == a ? b : a);
        tau += inhibition_torque(signals[r].s, signals[partner].s,
                                 gains.k_inhib);
      }
    }

    const Vec dist = disturbance(r, t);
    if (dist.size() > 0) tau += dist;

    if (!tau.allFinite()) {
      throw SimulationBlowup(
          state_.t, "simulation diverged at t = " + std::to_string(state_.t) +
                        " s (non-finite torque for robot " +
                        std::to_string(r + 1) + ")");
    }
    const Vec qddot =
        forward_dynamics(*group.members[ref.member], robots[r], tau);
    dx.segment(ref.q_off, ref.n) = robots[r].qdot;
    dx.segment(ref.q_off + ref.n, ref.n) = qddot;
    if (ref.a_off >= 0) {
      dx.segment(ref.a_off, ref.a_dim) =
          adaptive_param_rate(regressor_cache, signals[r].s, gains.gamma);
    }
    if (ref.z_off >= 0) {
      dx.segment(ref.z_off, ref.n) =
          (samples[r].qdot_d - x.segment(ref.z_off, ref.n)) / group.hp_tau;
    }
    if (out) taus[r] = std::move(tau);
  }

  if (out) {
    out->tau = std::move(taus);
    out->sample = std::move(samples);
    out->s.resize(p_total);
    for (int r = 0; r < p_total; ++r) out->s[r] = signals[r].s;
  }
}

void Simulator::step() {
  const double t = step_index_ * config_.dt;
  const double dt = config_.dt;

  // Topology switches take effect between steps only.
  for (std::size_t g = 0; g < scenario_.groups.size(); ++g) {
    const auto& schedule = scenario_.groups[g].graph_schedule;
    int idx = -1;
    for (const auto& entry : schedule) {
      if (entry.first <= t + 1e-12) ++idx;
      else break;
    }
    state_.graph_index[g] = idx;
  }

  draw_noise_for_step();

  const Vec x0 = pack();
  Vec k1(state_dim_), k2(state_dim_), k3(state_dim_), k4(state_dim_);
  derivative(t, x0, k1, nullptr);
  derivative(t + 0.5 * dt, x0 + 0.5 * dt * k1, k2, nullptr);
  derivative(t + 0.5 * dt, x0 + 0.5 * dt * k2, k3, nullptr);
  derivative(t + dt, x0 + dt * k3, k4, nullptr);
  const Vec x1 = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  if (!x1.allFinite()) {
    throw SimulationBlowup(
        t, "simulation diverged at t = " + std::to_string(t) + " s");
  }

  ++step_index_;
  state_.t = step_index_ * config_.dt;
  unpack(x1);

  if (any_delay_) {
    for (std::size_t r = 0; r < refs_.size(); ++r) {
      const auto& group = scenario_.groups[refs_[r].group];
      if (group.controller.law == ControlLaw::Delayed &&
          group.controller.delay_T > 0.0) {
        state_.buffers[r].append(state_.t, state_.robots[r].q,
                                 state_.robots[r].qdot);
      }
    }
  }
}

void Simulator::log_row(TrajectoryLog& log, double t, const Vec& x) {
  if (step_index_ < total_steps_) draw_noise_for_step();
  StageOutput out;
  Vec dx;
  derivative(t, x, dx, &out);
  const int row = log.samples();
  log.t.push_back(t);
  for (std::size_t r = 0; r < refs_.size(); ++r) {
    auto& track = log.robots[r];
    track.q.row(row) = x.segment(refs_[r].q_off, refs_[r].n).transpose();
    track.qdot.row(row) =
        x.segment(refs_[r].q_off + refs_[r].n, refs_[r].n).transpose();
    track.q_d.row(row) = out.sample[r].q_d.transpose();
    track.qdot_d.row(row) = out.sample[r].qdot_d.transpose();
    track.s.row(row) = out.s[r].transpose();
    track.tau.row(row) = out.tau[r].transpose();
    if (refs_[r].a_off >= 0) {
      track.a_hat.row(row) =
          x.segment(refs_[r].a_off, refs_[r].a_dim).transpose();
    }
  }
}

TrajectoryLog Simulator::run() {
  TrajectoryLog log;
  log.dt_sample = config_.dt * config_.decimation;
  log.delay_warmup_until = warmup_until_;
  const int rows = static_cast<int>(total_steps_ / config_.decimation) + 1;
  log.robots.resize(refs_.size());
  int offset = 0;
  for (const auto& group : scenario_.groups) {
    log.group_offsets.push_back(offset);
    log.group_sizes.push_back(group.size());
    offset += group.size();
  }
  for (std::size_t r = 0; r < refs_.size(); ++r) {
    auto& track = log.robots[r];
    const int n = refs_[r].n;
    track.q.resize(rows, n);
    track.qdot.resize(rows, n);
    track.q_d.resize(rows, n);
    track.qdot_d.resize(rows, n);
    track.s.resize(rows, n);
    track.tau.resize(rows, n);
    track.a_hat.resize(rows, std::max(refs_[r].a_dim, 0));
  }
  log.t.reserve(rows);

  for (long k = 0; k < total_steps_; ++k) {
    if (k % config_.decimation == 0) {
      log_row(log, k * config_.dt, pack());
    }
    step();
  }
  log_row(log, total_steps_ * config_.dt, pack());
  return log;
}

TrajectoryLog run(const SimConfig& config, const GroupSpec& scenario) {
  ConcurrentScenario wrapped;
  wrapped.groups.push_back(scenario);
  return Simulator(std::move(wrapped), config).run();
}

TrajectoryLog run_concurrent(const SimConfig& config,
                             const ConcurrentScenario& scenario) {
  return Simulator(scenario, config).run();
}

}  // namespace lagsync
