// Acceptance suite: runs every acceptance criterion end to end and
// prints one pass/fail line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "lagsync/analysis.hpp"
#include "lagsync/config.hpp"
#include "lagsync/presets.hpp"
#include "lagsync/simulator.hpp"
#include "support/oracles.hpp"

using namespace lagsync;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> details;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      details.push_back("    FAILED: " + what);
    }
  }

  void expect_lt(double value, double bound, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s = %.4g (bound %.4g)", what.c_str(),
                  value, bound);
    if (!(value < bound)) {
      ok = false;
      details.push_back(std::string("    FAILED: ") + buf);
    } else {
      details.push_back(std::string("    ") + buf);
    }
  }

  void expect_gt(double value, double bound, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s = %.4g (must exceed %.4g)",
                  what.c_str(), value, bound);
    if (!(value > bound)) {
      ok = false;
      details.push_back(std::string("    FAILED: ") + buf);
    } else {
      details.push_back(std::string("    ") + buf);
    }
  }
};

double seconds_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

SyncBasis basis_for(const GroupSpec& group) {
  return sync_basis(modified_laplacian(group.graph, group.gains, group.dof()));
}

ModelList models_of(const GroupSpec& group) {
  return ModelList(group.members.begin(), group.members.end());
}

double max_increment(const ErrorSeries& series) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < series.value.size(); ++k) {
    worst = std::max(worst, series.value[k] - series.value[k - 1]);
  }
  return worst;
}

// --------------------------------------------------------------------------
// 1. Skew-symmetry and regressor identities on random states.

void criterion_1(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(1001);
  std::vector<std::unique_ptr<LagrangianModel>> models;
  models.push_back(std::make_unique<TwoLinkArm>());
  models.push_back(std::make_unique<CartDoublePendulum>());

  double worst_skew = 0.0;
  double worst_regressor = 0.0;
  for (const auto& model : models) {
    const int n = model->dof();
    const Vec a = model->params();
    for (int trial = 0; trial < 1000; ++trial) {
      const Vec q = oracles::random_vec(rng, n, 3.14159);
      const Vec qdot = oracles::random_vec(rng, n, 2.0);
      Vec x = oracles::random_vec(rng, n, 1.0);
      x.normalize();
      worst_skew = std::max(
          worst_skew, std::abs(oracles::skew_residual(*model, q, qdot, x)));

      const Vec qr_dot = oracles::random_vec(rng, n, 2.0);
      const Vec qr_ddot = oracles::random_vec(rng, n, 2.0);
      const ModelTerms terms = model_terms(*model, q, qdot);
      const Vec direct = terms.M * qr_ddot + terms.C * qr_dot + terms.g;
      const Vec via = model->regressor(q, qdot, qr_dot, qr_ddot) * a;
      worst_regressor =
          std::max(worst_regressor, (direct - via).cwiseAbs().maxCoeff());
    }
  }
  c.expect_lt(worst_skew, 1e-9, "max |x'(Mdot - 2C)x| over 1000 draws/model");
  c.expect_lt(worst_regressor, 1e-10, "max |Y a - (M qr_ddot + C qr_dot + g)|");
  c.expect_lt(seconds_since(start), 5.0, "runtime [s]");
}

// --------------------------------------------------------------------------
// 2. Spectral fixtures of the modified Laplacian.

void criterion_2(Check& c) {
  // p = 2 split with the preset-scale gains.
  {
    const Gains gains = Gains::uniform(1, 5.0, 2.0, 1.0);
    const auto lap =
        modified_laplacian(build_graph(GraphKind::Ring, 2), gains, 1);
    const SyncBasis basis = sync_basis(lap);
    c.expect_lt(std::abs(basis.d1(0, 0) - 3.0), 1e-12, "p=2 |D1 - (K1-K2)|");
    c.expect_lt(std::abs(basis.d2[0] - 7.0), 1e-12, "p=2 |D2 - (K1+K2)|");
  }
  // p = 4 ring spectrum (K1-2K2, K1+2K2, K1, K1) -> (1, 9, 5, 5).
  {
    const Gains gains = Gains::uniform(1, 5.0, 2.0, 1.0);
    const auto lap =
        modified_laplacian(build_graph(GraphKind::Ring, 4), gains, 1);
    const SyncBasis basis = sync_basis(lap);
    const double err = std::abs(basis.d1(0, 0) - 1.0) +
                       std::abs(basis.d2[0] - 9.0) +
                       std::abs(basis.d2[1] - 5.0) +
                       std::abs(basis.d2[2] - 5.0);
    c.expect_lt(err, 1e-12, "p=4 spectrum deviation from (1, 9, 5, 5)");
  }
  // Reconstruction across sizes and random diagonal gains.
  std::mt19937 rng(1002);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  double worst = 0.0;
  for (int p : {2, 3, 4, 5}) {
    const int n = 2;
    Gains gains = Gains::uniform(n, 0.0, 0.0, 1.0);
    for (int j = 0; j < n; ++j) {
      gains.k2[j] = u(rng);
      gains.k1[j] = 3.0 + u(rng);
    }
    const auto lap =
        modified_laplacian(build_graph(GraphKind::Ring, p), gains, n);
    const SyncBasis basis = sync_basis(lap);
    Mat v(p * n, p * n);
    v << basis.one_block, basis.v_sync;
    Mat d = Mat::Zero(p * n, p * n);
    d.topLeftCorner(n, n) = basis.d1;
    d.bottomRightCorner((p - 1) * n, (p - 1) * n) = basis.d2_matrix();
    worst = std::max(
        worst, (v * d * v.transpose() - lap.L).cwiseAbs().maxCoeff());
  }
  c.expect_lt(worst, 1e-9, "max reconstruction error ||V diag(D) V' - L||");
}

// --------------------------------------------------------------------------
// 3. Four-robot tracking synchronization at the fig4 preset gains.

void criterion_3(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig config = load_preset("fig4");
  const TrajectoryLog log = run(config.sim, config.scenario.groups[0]);
  const SyncBasis basis = basis_for(config.scenario.groups[0]);

  const ErrorSeries sync = sync_error_positions(log, basis);
  c.expect_lt(sync.final_value(), 1e-3, "sync error at t_final");
  for (const auto& track : tracking_error(log)) {
    c.expect_lt(track.final_value(), 1e-2, "tracking error at t_final");
  }
  const RateFit fit_sync = fit_rate(sync);
  const RateFit fit_track = fit_rate(tracking_error_aggregate(log));
  c.expect_gt(fit_sync.lambda, fit_track.lambda,
              "lambda_sync vs lambda_track");
  c.expect_gt(fit_sync.r_squared, 0.95, "sync fit r^2");
  c.expect_gt(fit_track.r_squared, 0.95, "tracking fit r^2");
  c.expect_lt(seconds_since(start), 30.0, "runtime [s]");
}

// --------------------------------------------------------------------------
// 4. Indifferent regime K1 = 2 K2: synchronized but not tracking.

void criterion_4(Check& c) {
  ExperimentConfig config = load_preset("fig4");
  auto& group = config.scenario.groups[0];
  group.gains.k1 = Vec::Constant(3, 4.0);  // K1 = 2K2 = 4I
  const TrajectoryLog log = run(config.sim, group);

  const SyncBasis basis = basis_for(group);
  c.expect_lt(sync_error_positions(log, basis).final_value(), 1e-3,
              "sync error at t_final");
  for (const auto& track : tracking_error(log)) {
    c.expect_gt(track.min_value(), 0.05, "min-over-time tracking error");
  }
}

// --------------------------------------------------------------------------
// 5. Fast inhibition: one extra link makes the indifferent network track 0.

void criterion_5(Check& c) {
  ExperimentConfig config = load_preset("fig4");
  auto& group = config.scenario.groups[0];
  group.gains.k1 = Vec::Constant(3, 4.0);  // indifferent base law
  group.trajectory = DesiredTrajectory::zero(3);
  apply_inhibition(group.graph, group.gains, 0, 2, group.gains.k2);
  config.sim.t_final = 60.0;

  const TrajectoryLog log = run(config.sim, group);
  const SyncBasis basis = basis_for(group);
  c.expect_lt(sync_error_positions(log, basis).final_value(), 1e-3,
              "sync error at t_final");
  const int last = log.samples() - 1;
  for (int r = 0; r < log.robot_count(); ++r) {
    c.expect_lt(log.robots[r].q.row(last).norm(), 1e-3,
                "robot " + std::to_string(r + 1) + " ||q|| at t_final");
  }
}

// --------------------------------------------------------------------------
// 6. Adaptive synchronization, stable and indifferent gain sets.

void criterion_6(Check& c) {
  for (const std::string name : {"fig6a", "fig6b"}) {
    const ExperimentConfig config = load_preset(name);
    const TrajectoryLog log = run(config.sim, config.scenario.groups[0]);
    const PresetReport report = evaluate_preset(name, config, log);
    for (const auto& line : report.lines) c.details.push_back("    " + line);
    c.expect(report.pass, name + " checks");
  }
}

// --------------------------------------------------------------------------
// 7. PD coupling about a rest reference, with and without Lambda.

void criterion_7(Check& c) {
  GroupSpec group;
  group.members = {std::make_shared<TwoLinkArm>(),
                   std::make_shared<TwoLinkArm>()};
  group.graph = build_graph(GraphKind::Ring, 2);
  group.gains = Gains::uniform(2, 5.0, 2.0, 2.0);
  group.controller.law = ControlLaw::Pd;
  const Vec q_rest = (Vec(2) << 0.6, -0.4).finished();
  group.trajectory = DesiredTrajectory::rest(q_rest);

  SimConfig sim;
  sim.t_final = 60.0;
  sim.seed = 31;
  const TrajectoryLog log = run(sim, group);
  const int last = log.samples() - 1;
  for (int r = 0; r < 2; ++r) {
    c.expect_lt((log.robots[r].q.row(last).transpose() - q_rest).norm(), 1e-2,
                "robot " + std::to_string(r + 1) + " distance to rest");
  }
  c.expect_lt((log.robots[0].q.row(last) - log.robots[1].q.row(last)).norm(),
              1e-2, "position synchronization ||q1 - q2||");
  const ErrorSeries v =
      pd_lyapunov(log, group.gains, models_of(group), q_rest);
  c.expect_lt(max_increment(v), 1e-6, "max Lyapunov increment");

  // Lambda = 0: velocity coupling; only the velocities need synchronize.
  GroupSpec vel = group;
  vel.controller.law = ControlLaw::VelocityOnly;
  vel.gains.lambda.setZero();
  const TrajectoryLog vlog = run(sim, vel);
  const int vlast = vlog.samples() - 1;
  c.expect_lt(
      (vlog.robots[0].qdot.row(vlast) - vlog.robots[1].qdot.row(vlast)).norm(),
      1e-2, "velocity synchronization with Lambda = 0");
}

// --------------------------------------------------------------------------
// 8. Partial-state coupling P = diag(1, 0) still tracks and synchronizes.

void criterion_8(Check& c) {
  GraphOptions options;
  options.partial_mask = (Vec(2) << 1.0, 0.0).finished();
  GroupSpec group;
  group.members = {std::make_shared<TwoLinkArm>(),
                   std::make_shared<TwoLinkArm>()};
  group.graph = build_graph(GraphKind::Ring, 2, options);
  group.gains = Gains::uniform(2, 5.0, 2.0, 5.0);
  group.controller.law = ControlLaw::Partial;
  group.trajectory = DesiredTrajectory::analytic(
      {JointWave{JointWave::Type::Sin, 1.0, M_PI, 0.0},
       JointWave{JointWave::Type::OneMinusCos, 2.0, 0.6 * M_PI, 0.0}});

  SimConfig sim;
  sim.t_final = 40.0;
  sim.seed = 33;
  const TrajectoryLog log = run(sim, group);
  const SyncBasis basis = basis_for(group);
  c.expect_lt(sync_error_positions(log, basis).final_value(), 1e-2,
              "full-state sync error at t_final");
  for (const auto& track : tracking_error(log)) {
    c.expect_lt(track.final_value(), 1e-2, "tracking error at t_final");
  }
}

// --------------------------------------------------------------------------
// 9. Communication delay: synchronization for T in {0.05, 0.2} s and a
//    non-increasing delay functional. The delayed coupling mixes the past
//    state with the current-time reference, so the value-level functional
//    telescopes only when the reference term is constant: the run targets a
//    rest position.

void criterion_9(Check& c) {
  for (double T : {0.05, 0.2}) {
    GroupSpec group;
    group.members = {std::make_shared<TwoLinkArm>(),
                     std::make_shared<TwoLinkArm>()};
    group.graph = build_graph(GraphKind::Ring, 2);
    group.gains = Gains::uniform(2, 5.0, 2.0, 5.0);
    group.controller.law = ControlLaw::Delayed;
    group.controller.delay_T = T;
    group.trajectory =
        DesiredTrajectory::rest((Vec(2) << 0.5, -0.3).finished());

    SimConfig sim;
    sim.t_final = 60.0;
    sim.seed = 37;
    sim.decimation = 1;  // full-rate log for the quadrature
    const TrajectoryLog log = run(sim, group);
    const int last = log.samples() - 1;
    const std::string tag = "T = " + std::to_string(T).substr(0, 4) + " s: ";
    c.expect_lt((log.robots[0].q.row(last) - log.robots[1].q.row(last)).norm(),
                1e-2, tag + "||q1 - q2|| at t_final");
    const ErrorSeries v =
        delay_functional(log, group.gains, T, models_of(group));
    c.expect_lt(max_increment(v), 1e-6,
                tag + "max delay-functional increment");
  }
}

// --------------------------------------------------------------------------
// 10. Concurrent hierarchy of three heterogeneous groups.

void criterion_10(Check& c) {
  const ExperimentConfig config = load_preset("fig5");
  const TrajectoryLog log = run_concurrent(config.sim, config.scenario);
  const PresetReport report = evaluate_preset("fig5", config, log);
  for (const auto& line : report.lines) c.details.push_back("    " + line);
  c.expect(report.pass, "fig5 checks");
}

// --------------------------------------------------------------------------
// 11. Contraction residual along stable runs, O(dt^2) in the step. Checked
//     on a two-robot arm run (full series) and on the four-robot cart run,
//     whose stiff startup burst is below the stencil's resolution for the
//     first few samples and is reported separately.

void criterion_11(Check& c) {
  struct Stats {
    double max_full = 0.0;
    double max_settled = 0.0;  // t >= 0.05 s
    double mean = 0.0;
  };
  auto residual_stats = [&](const GroupSpec& group, double dt) {
    SimConfig sim;
    sim.dt = dt;
    sim.t_final = 20.0;
    sim.decimation = 1;
    sim.seed = 19;
    const auto lap = modified_laplacian(group.graph, group.gains, group.dof());
    const TrajectoryLog log = run(sim, group);
    const ErrorSeries series =
        contraction_residual(log, lap.L, models_of(group));
    Stats stats;
    int count = 0;
    for (std::size_t k = 0; k < series.value.size(); ++k) {
      stats.max_full = std::max(stats.max_full, series.value[k]);
      stats.mean += series.value[k];
      ++count;
      if (series.t[k] >= 0.05) {
        stats.max_settled = std::max(stats.max_settled, series.value[k]);
      }
    }
    stats.mean /= count;
    return stats;
  };

  GroupSpec pair;
  pair.members = {std::make_shared<TwoLinkArm>(),
                  std::make_shared<TwoLinkArm>()};
  pair.graph = build_graph(GraphKind::Ring, 2);
  pair.gains = Gains::uniform(2, 5.0, 2.0, 5.0);
  pair.trajectory = DesiredTrajectory::analytic(
      {JointWave{JointWave::Type::Sin, 1.0, M_PI, 0.0},
       JointWave{JointWave::Type::OneMinusCos, 2.0, 0.6 * M_PI, 0.0}});
  const Stats arm_coarse = residual_stats(pair, 1e-3);
  const Stats arm_fine = residual_stats(pair, 5e-4);
  c.expect_lt(arm_coarse.max_full, 1e-2,
              "two-robot run: max relative residual at dt = 1e-3");
  c.expect_gt(arm_coarse.mean / arm_fine.mean, 2.5,
              "two-robot run: mean residual ratio, dt halved (O(dt^2) ~ 4)");

  const ExperimentConfig fig4 = load_preset("fig4");
  const auto& cart = fig4.scenario.groups[0];
  const Stats cart_coarse = residual_stats(cart, 1e-3);
  const Stats cart_fine = residual_stats(cart, 5e-4);
  char note[120];
  std::snprintf(note, sizeof(note),
                "four-robot run: startup FD burst peaks at %.3g "
                "(first 0.05 s, also O(dt^2))",
                cart_coarse.max_full);
  c.details.emplace_back(std::string("    ") + note);
  c.expect_lt(cart_coarse.max_settled, 1e-2,
              "four-robot run: max relative residual at dt = 1e-3, t >= 0.05");
  c.expect_gt(cart_coarse.max_settled / cart_fine.max_settled, 2.5,
              "four-robot run: residual ratio, dt halved (O(dt^2) ~ 4)");
}

// --------------------------------------------------------------------------
// 12. Model reduction: the synchronized network behaves as one robot.

void criterion_12(Check& c) {
  const ExperimentConfig config = load_preset("fig4");
  const auto& group = config.scenario.groups[0];
  const TrajectoryLog log = run(config.sim, group);
  const SyncBasis basis = basis_for(group);
  const ReducedCompare cmp =
      reduced_model_compare(log, basis, *group.members[0], group.gains,
                            *group.trajectory, 1e-3);
  c.expect(cmp.applicable, "run reaches the synchronization tolerance");
  if (!cmp.applicable) return;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cmp.deviation.value.size(); ++k) {
    worst_excess = std::max(worst_excess, cmp.deviation.value[k] -
                                              cmp.sync_envelope.value[k]);
  }
  c.expect_lt(worst_excess, 1e-3,
              "max (deviation - sync envelope) after synchronization");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "skew-symmetry and regressor identities", criterion_1},
      {2, "spectral fixtures of the modified Laplacian", criterion_2},
      {3, "four-robot tracking synchronization (fig4 preset)",
       criterion_3},
      {4, "indifferent regime: sync without tracking", criterion_4},
      {5, "fast inhibition restores contraction", criterion_5},
      {6, "adaptive synchronization (stable and indifferent)", criterion_6},
      {7, "PD coupling to a rest state", criterion_7},
      {8, "partial-state coupling", criterion_8},
      {9, "time-delayed coupling", criterion_9},
      {10, "concurrent hierarchy of heterogeneous groups", criterion_10},
      {11, "contraction residual along stable runs", criterion_11},
      {12, "model reduction after synchronization", criterion_12},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check check;
    try {
      criterion.body(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.details.push_back(std::string("    exception: ") + e.what());
    }
    std::printf("[%s] criterion %2d: %s\n", check.ok ? "PASS" : "FAIL",
                criterion.id, criterion.title);
    for (const auto& line : check.details) {
      std::printf("%s\n", line.c_str());
    }
    if (!check.ok) ++failures;
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
