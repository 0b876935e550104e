#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "lagsync/simulator.hpp"
#include "lagsync/topology.hpp"
#include "lagsync/trajectory.hpp"

namespace lagsync {

struct ErrorSeries {
  std::vector<double> t;
  std::vector<double> value;

  double final_value() const { return value.empty() ? 0.0 : value.back(); }
  double min_value() const;
  double max_value() const;
};

using ModelList = std::vector<std::shared_ptr<const LagrangianModel>>;

/// ||V_sync' {q}||_2 over time for the p robots starting at `first_robot`.
ErrorSeries sync_error_positions(const TrajectoryLog& log,
                                 const SyncBasis& basis, int first_robot = 0);
/// Same projection applied to the stacked composite variables x = (s_1..s_p).
ErrorSeries sync_error_composite(const TrajectoryLog& log,
                                 const SyncBasis& basis, int first_robot = 0);

/// ||q_i - q_d||_2 per robot, against the reference each robot actually used.
std::vector<ErrorSeries> tracking_error(const TrajectoryLog& log);
/// Norm of the stacked tracking errors of all robots.
ErrorSeries tracking_error_aggregate(const TrajectoryLog& log);

struct FitWindow {
  double t0 = 0.0;
  double t1 = 0.0;
};

struct RateFit {
  double lambda = 0.0;
  double r_squared = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  bool window_shrunk = false;
  bool valid = false;
};

/// Default window: [0.1 t_end, first sample at or below
/// max(1e-6, 2 * final value)] to skip the transient and the floor/plateau.
FitWindow default_fit_window(const ErrorSeries& series);

/// Least-squares slope of log(value) against t; lambda = -slope.
/// Nonpositive samples truncate the window (flagged via window_shrunk).
RateFit fit_rate(const ErrorSeries& series, const FitWindow& window);
RateFit fit_rate(const ErrorSeries& series);

/// |d/dt(x'[M]x) + 2 x'Lx| / (x'[M]x) with the derivative taken by central
/// differences on the log grid. Zero where x'[M]x vanishes.
ErrorSeries contraction_residual(const TrajectoryLog& log, const Mat& laplacian,
                                 const ModelList& models, int first_robot = 0);

/// Time-delay functional x'[M]x + sum_i int_{t-T}^t s_i' K2 s_i, evaluated by
/// trapezoid quadrature over the log; defined from t = T onward.
ErrorSeries delay_functional(const TrajectoryLog& log, const Gains& gains,
                             double T, const ModelList& models,
                             int first_robot = 0);

/// Two-robot PD-coupling Lyapunov function
///   V = 1/2 sum_i qdot_i' M_i qdot_i + 1/2 qtilde_p' (K1-K2)Lambda qtilde_p
///       + 1/2 q_m' (K1+K2)Lambda q_m
ErrorSeries pd_lyapunov(const TrajectoryLog& log, const Gains& gains,
                        const ModelList& models, const Vec& q_rest,
                        int first_robot = 0);

struct ReducedCompare {
  bool applicable = false;
  double t_sync = 0.0;       // first time the sync error dips below tolerance
  ErrorSeries deviation;     // max_i ||q_i - q_reduced||
  ErrorSeries sync_envelope; // sup_{tau >= t} sync error
};

/// Integrates the synchronized reduced dynamics M sdot + C s + D1 s = 0
/// (D1 = K1 - 2K2, or K1 - K2 for p = 2) from the mean state at the first
/// synchronized sample and reports the per-robot deviation.
ReducedCompare reduced_model_compare(const TrajectoryLog& log,
                                     const SyncBasis& basis,
                                     const LagrangianModel& model,
                                     const Gains& gains,
                                     const DesiredTrajectory& trajectory,
                                     double sync_tol = 1e-3,
                                     int first_robot = 0);

struct RunSummary {
  std::string run_id;
  double lambda_sync = 0.0;
  double lambda_track = 0.0;
  double r2_sync = 0.0;
  double r2_track = 0.0;
  double max_residual = 0.0;
  double final_sync_err = 0.0;
  double final_track_err = 0.0;
};

RunSummary summarize(const std::string& run_id, const TrajectoryLog& log,
                     const SyncBasis& basis, const Mat* laplacian,
                     const ModelList* models);

void write_summary_csv(std::ostream& out,
                       const std::vector<RunSummary>& rows);

}  // namespace lagsync
