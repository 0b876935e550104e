#include "lagsync/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace lagsync {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

Vec stack_rows(const TrajectoryLog& log, int first_robot, int p, int row,
               const Mat TrajectoryLog::RobotTrack::* field) {
  const int n = log.dof(first_robot);
  Vec out(p * n);
  for (int i = 0; i < p; ++i) {
    out.segment(i * n, n) =
        (log.robots[first_robot + i].*field).row(row).transpose();
  }
  return out;
}

}  // namespace

double ErrorSeries::min_value() const {
  return value.empty() ? 0.0
                       : *std::min_element(value.begin(), value.end());
}

double ErrorSeries::max_value() const {
  return value.empty() ? 0.0
                       : *std::max_element(value.begin(), value.end());
}

namespace {

ErrorSeries projected_norm(const TrajectoryLog& log, const SyncBasis& basis,
                           int first_robot,
                           const Mat TrajectoryLog::RobotTrack::* field) {
  require(first_robot + basis.p <= log.robot_count(),
          "sync_error: basis exceeds the logged robots");
  require(log.dof(first_robot) == basis.n, "sync_error: joint count mismatch");
  ErrorSeries series;
  series.t = log.t;
  series.value.resize(log.samples());
  for (int k = 0; k < log.samples(); ++k) {
    const Vec stacked = stack_rows(log, first_robot, basis.p, k, field);
    series.value[k] = (basis.v_sync.transpose() * stacked).norm();
  }
  return series;
}

}  // namespace

ErrorSeries sync_error_positions(const TrajectoryLog& log,
                                 const SyncBasis& basis, int first_robot) {
  return projected_norm(log, basis, first_robot,
                        &TrajectoryLog::RobotTrack::q);
}

ErrorSeries sync_error_composite(const TrajectoryLog& log,
                                 const SyncBasis& basis, int first_robot) {
  return projected_norm(log, basis, first_robot,
                        &TrajectoryLog::RobotTrack::s);
}

std::vector<ErrorSeries> tracking_error(const TrajectoryLog& log) {
  std::vector<ErrorSeries> out(log.robot_count());
  for (int r = 0; r < log.robot_count(); ++r) {
    out[r].t = log.t;
    out[r].value.resize(log.samples());
    const auto& track = log.robots[r];
    for (int k = 0; k < log.samples(); ++k) {
      out[r].value[k] = (track.q.row(k) - track.q_d.row(k)).norm();
    }
  }
  return out;
}

ErrorSeries tracking_error_aggregate(const TrajectoryLog& log) {
  ErrorSeries series;
  series.t = log.t;
  series.value.assign(log.samples(), 0.0);
  for (int r = 0; r < log.robot_count(); ++r) {
    const auto& track = log.robots[r];
    for (int k = 0; k < log.samples(); ++k) {
      series.value[k] += (track.q.row(k) - track.q_d.row(k)).squaredNorm();
    }
  }
  for (auto& v : series.value) v = std::sqrt(v);
  return series;
}

FitWindow default_fit_window(const ErrorSeries& series) {
  require(!series.t.empty(), "fit window: empty series");
  FitWindow window;
  const double t_end = series.t.back();
  window.t0 = 0.1 * t_end;
  window.t1 = t_end;
  const double cutoff = std::max(1e-6, 2.0 * series.value.back());
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    if (series.t[k] <= window.t0) continue;
    if (series.value[k] <= cutoff) {
      window.t1 = series.t[k];
      break;
    }
  }
  return window;
}

RateFit fit_rate(const ErrorSeries& series, const FitWindow& window) {
  RateFit fit;
  fit.t0 = window.t0;
  fit.t1 = window.t1;
  std::vector<double> ts, logs;
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    const double t = series.t[k];
    if (t < window.t0 || t > window.t1) continue;
    if (series.value[k] <= 0.0) {
      fit.window_shrunk = true;
      break;  // truncate at the first nonpositive sample
    }
    ts.push_back(t);
    logs.push_back(std::log(series.value[k]));
  }
  if (ts.size() < 3) return fit;
  fit.t1 = ts.back();

  const double count = static_cast<double>(ts.size());
  double mean_t = 0.0, mean_y = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    mean_t += ts[k];
    mean_y += logs[k];
  }
  mean_t /= count;
  mean_y /= count;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double dt = ts[k] - mean_t;
    const double dy = logs[k] - mean_y;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (stt <= 0.0) return fit;
  const double slope = sty / stt;
  fit.lambda = -slope;
  fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
  fit.valid = true;
  return fit;
}

RateFit fit_rate(const ErrorSeries& series) {
  return fit_rate(series, default_fit_window(series));
}

ErrorSeries contraction_residual(const TrajectoryLog& log, const Mat& laplacian,
                                 const ModelList& models, int first_robot) {
  const int p = static_cast<int>(models.size());
  require(p >= 1 && first_robot + p <= log.robot_count(),
          "contraction_residual: model list does not match the log");
  const int n = log.dof(first_robot);
  require(laplacian.rows() == p * n && laplacian.cols() == p * n,
          "contraction_residual: Laplacian size mismatch");
  require(log.samples() >= 3, "contraction_residual: log too short");

  const int count = log.samples();
  std::vector<double> quad(count);   // x'[M]x
  std::vector<double> lform(count);  // x'Lx
  for (int k = 0; k < count; ++k) {
    const Vec x = stack_rows(log, first_robot, p, k,
                             &TrajectoryLog::RobotTrack::s);
    double f = 0.0;
    for (int i = 0; i < p; ++i) {
      const Vec q = log.robots[first_robot + i].q.row(k).transpose();
      const Vec s = x.segment(i * n, n);
      f += s.dot(models[i]->mass_matrix(q) * s);
    }
    quad[k] = f;
    lform[k] = x.dot(laplacian * x);
  }

  const double f_max =
      *std::max_element(quad.begin(), quad.end());
  const double floor = 1e-14 * std::max(1.0, f_max);
  const double h = log.dt_sample;

  ErrorSeries series;
  for (int k = 1; k + 1 < count; ++k) {
    const double fdot = (quad[k + 1] - quad[k - 1]) / (2.0 * h);
    const double resid = std::abs(fdot + 2.0 * lform[k]);
    series.t.push_back(log.t[k]);
    series.value.push_back(quad[k] > floor ? resid / quad[k] : 0.0);
  }
  return series;
}

ErrorSeries delay_functional(const TrajectoryLog& log, const Gains& gains,
                             double T, const ModelList& models,
                             int first_robot) {
  const int p = static_cast<int>(models.size());
  require(p >= 1 && first_robot + p <= log.robot_count(),
          "delay_functional: model list does not match the log");
  const double h = log.dt_sample;
  const long lag = std::lround(T / h);
  require(std::abs(lag * h - T) < 1e-9 * std::max(1.0, T),
          "delay_functional: T must be a multiple of the log sample step");
  require(lag < log.samples(), "delay_functional: log shorter than the delay");

  const int count = log.samples();
  std::vector<double> integrand(count), quad(count);
  for (int k = 0; k < count; ++k) {
    double g = 0.0, f = 0.0;
    for (int i = 0; i < p; ++i) {
      const Vec s = log.robots[first_robot + i].s.row(k).transpose();
      const Vec q = log.robots[first_robot + i].q.row(k).transpose();
      g += s.dot(gains.k2.cwiseProduct(s));
      f += s.dot(models[i]->mass_matrix(q) * s);
    }
    integrand[k] = g;
    quad[k] = f;
  }

  std::vector<double> cumulative(count, 0.0);
  for (int k = 1; k < count; ++k) {
    cumulative[k] =
        cumulative[k - 1] + 0.5 * h * (integrand[k - 1] + integrand[k]);
  }

  ErrorSeries series;
  for (int k = static_cast<int>(lag); k < count; ++k) {
    series.t.push_back(log.t[k]);
    series.value.push_back(quad[k] + cumulative[k] - cumulative[k - lag]);
  }
  return series;
}

ErrorSeries pd_lyapunov(const TrajectoryLog& log, const Gains& gains,
                        const ModelList& models, const Vec& q_rest,
                        int first_robot) {
  require(models.size() == 2, "pd_lyapunov: defined for the two-robot case");
  require(first_robot + 2 <= log.robot_count(),
          "pd_lyapunov: log does not hold two robots");
  const Vec kp = (gains.k1 - gains.k2).cwiseProduct(gains.lambda);
  const Vec km = (gains.k1 + gains.k2).cwiseProduct(gains.lambda);

  ErrorSeries series;
  series.t = log.t;
  series.value.resize(log.samples());
  const auto& r1 = log.robots[first_robot];
  const auto& r2 = log.robots[first_robot + 1];
  for (int k = 0; k < log.samples(); ++k) {
    const Vec q1 = r1.q.row(k).transpose();
    const Vec q2 = r2.q.row(k).transpose();
    const Vec v1 = r1.qdot.row(k).transpose();
    const Vec v2 = r2.qdot.row(k).transpose();
    const Vec qt_p = ((q1 - q_rest) + (q2 - q_rest)) / std::sqrt(2.0);
    const Vec q_m = (q1 - q2) / std::sqrt(2.0);
    double v = 0.5 * v1.dot(models[0]->mass_matrix(q1) * v1) +
               0.5 * v2.dot(models[1]->mass_matrix(q2) * v2);
    v += 0.5 * qt_p.dot(kp.cwiseProduct(qt_p));
    v += 0.5 * q_m.dot(km.cwiseProduct(q_m));
    series.value[k] = v;
  }
  return series;
}

ReducedCompare reduced_model_compare(const TrajectoryLog& log,
                                     const SyncBasis& basis,
                                     const LagrangianModel& model,
                                     const Gains& gains,
                                     const DesiredTrajectory& trajectory,
                                     double sync_tol, int first_robot) {
  ReducedCompare out;
  const ErrorSeries sync = sync_error_positions(log, basis, first_robot);
  int k_sync = -1;
  for (int k = 0; k < log.samples(); ++k) {
    if (sync.value[k] < sync_tol) {
      k_sync = k;
      break;
    }
  }
  if (k_sync < 0) return out;  // never synchronized: not applicable
  out.applicable = true;
  out.t_sync = log.t[k_sync];

  const int p = basis.p;
  const int n = basis.n;
  const Vec d1_eff = p == 2 ? Vec(gains.k1 - gains.k2)
                            : Vec(gains.k1 - 2.0 * gains.k2);

  // Mean state over the synchronized robots at t_sync.
  Vec q = Vec::Zero(n), qdot = Vec::Zero(n);
  for (int i = 0; i < p; ++i) {
    q += log.robots[first_robot + i].q.row(k_sync).transpose();
    qdot += log.robots[first_robot + i].qdot.row(k_sync).transpose();
  }
  q /= p;
  qdot /= p;

  auto deriv = [&](double t, const Vec& state, Vec& dstate) {
    const RobotState rs(state.head(n), state.tail(n));
    const CompositeSignals sig =
        reference_signals(trajectory.sample(t), rs, gains.lambda);
    const Vec tau = model.mass_matrix(rs.q) * sig.qr_ddot +
                    model.coriolis_matrix(rs.q, rs.qdot) * sig.qr_dot +
                    model.gravity(rs.q) - d1_eff.cwiseProduct(sig.s);
    dstate.resize(2 * n);
    dstate.head(n) = rs.qdot;
    dstate.tail(n) = forward_dynamics(model, rs, tau);
  };

  Vec state(2 * n);
  state << q, qdot;
  const double h = log.dt_sample;
  Vec k1v, k2v, k3v, k4v;

  // Suffix max of the sync error (its decaying envelope).
  std::vector<double> envelope(log.samples());
  double running = 0.0;
  for (int k = log.samples() - 1; k >= 0; --k) {
    running = std::max(running, sync.value[k]);
    envelope[k] = running;
  }

  for (int k = k_sync; k < log.samples(); ++k) {
    const double t = log.t[k];
    double dev = 0.0;
    for (int i = 0; i < p; ++i) {
      const Vec qi = log.robots[first_robot + i].q.row(k).transpose();
      dev = std::max(dev, (qi - state.head(n)).norm());
    }
    out.deviation.t.push_back(t);
    out.deviation.value.push_back(dev);
    out.sync_envelope.t.push_back(t);
    out.sync_envelope.value.push_back(envelope[k]);

    if (k + 1 < log.samples()) {
      deriv(t, state, k1v);
      deriv(t + 0.5 * h, state + 0.5 * h * k1v, k2v);
      deriv(t + 0.5 * h, state + 0.5 * h * k2v, k3v);
      deriv(t + h, state + h * k3v, k4v);
      state += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
  }
  return out;
}

RunSummary summarize(const std::string& run_id, const TrajectoryLog& log,
                     const SyncBasis& basis, const Mat* laplacian,
                     const ModelList* models) {
  RunSummary s;
  s.run_id = run_id;
  const ErrorSeries sync = sync_error_positions(log, basis);
  const ErrorSeries track = tracking_error_aggregate(log);
  const RateFit fit_sync = fit_rate(sync);
  const RateFit fit_track = fit_rate(track);
  s.lambda_sync = fit_sync.lambda;
  s.lambda_track = fit_track.lambda;
  s.r2_sync = fit_sync.r_squared;
  s.r2_track = fit_track.r_squared;
  s.final_sync_err = sync.final_value();
  s.final_track_err = track.final_value();
  if (laplacian && models) {
    s.max_residual =
        contraction_residual(log, *laplacian, *models).max_value();
  } else {
    s.max_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

void write_summary_csv(std::ostream& out,
                       const std::vector<RunSummary>& rows) {
  out << "run_id,lambda_sync,lambda_track,r2_sync,r2_track,max_residual,"
         "final_sync_err,final_track_err\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  r.run_id.c_str(), r.lambda_sync, r.lambda_track, r.r2_sync,
                  r.r2_track, r.max_residual, r.final_sync_err,
                  r.final_track_err);
    out << buf;
  }
}

}  // namespace lagsync
