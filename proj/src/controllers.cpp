#include "lagsync/controllers.hpp"

#include <cmath>
#include <vector>

namespace lagsync {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw ContractViolation(msg);
}

Vec feedforward(const LagrangianModel& model, const RobotState& state,
                const CompositeSignals& signals) {
  const ModelTerms terms = model_terms(model, state.q, state.qdot);
  return terms.M * signals.qr_ddot + terms.C * signals.qr_dot + terms.g;
}

}  // namespace

CompositeSignals reference_signals(const TrajectorySample& traj,
                                   const RobotState& state,
                                   const Vec& lambda) {
  const int n = state.dof();
  require(traj.q_d.size() == n && traj.qdot_d.size() == n &&
              traj.qddot_d.size() == n && lambda.size() == n,
          "reference_signals: dimension mismatch");
  CompositeSignals sig;
  sig.qr_dot = traj.qdot_d - lambda.cwiseProduct(state.q - traj.q_d);
  sig.qr_ddot = traj.qddot_d - lambda.cwiseProduct(state.qdot - traj.qdot_d);
  sig.s = state.qdot - sig.qr_dot;
  return sig;
}

Vec coupled_tracking_torque(const LagrangianModel& model,
                            const RobotState& state,
                            const CompositeSignals& signals,
                            std::span<const Vec> neighbor_s,
                            std::span<const double> weights,
                            const Gains& gains, double self_coupling,
                            const Vec* mask) {
  require(neighbor_s.size() == weights.size(),
          "coupled_tracking_torque: one weight per neighbor");
  const Vec k2 =
      mask ? Vec(gains.k2.cwiseProduct(*mask)) : gains.k2;
  Vec tau = feedforward(model, state, signals) -
            gains.k1.cwiseProduct(signals.s) +
            self_coupling * k2.cwiseProduct(signals.s);
  for (std::size_t j = 0; j < neighbor_s.size(); ++j) {
    require(neighbor_s[j].size() == signals.s.size(),
            "coupled_tracking_torque: neighbor dimension mismatch");
    tau += weights[j] * k2.cwiseProduct(neighbor_s[j]);
  }
  return tau;
}

Vec tracking_sync_torque(const LagrangianModel& model, const RobotState& state,
                         const CompositeSignals& signals,
                         std::span<const Vec> neighbor_s, const Gains& gains,
                         int m) {
  require(m >= 1 && static_cast<int>(neighbor_s.size()) == m,
          "tracking_sync_torque: coupled law needs m >= 1 neighbors");
  const std::vector<double> weights(neighbor_s.size(), 2.0 / m);
  return coupled_tracking_torque(model, state, signals, neighbor_s, weights,
                                 gains);
}

Vec inline_endpoint_torque(const LagrangianModel& model,
                           const RobotState& state,
                           const CompositeSignals& signals,
                           const Vec& sole_neighbor_s, const Gains& gains) {
  const Vec neighbors[] = {sole_neighbor_s};
  const double weights[] = {1.0};
  return coupled_tracking_torque(model, state, signals, neighbors, weights,
                                 gains, /*self_coupling=*/1.0);
}

Vec adaptive_torque(const LagrangianModel& model, const RobotState& state,
                    const CompositeSignals& signals,
                    std::span<const Vec> neighbor_s,
                    std::span<const double> weights, const Gains& gains,
                    const Vec& a_hat) {
  require(model.has_regressor(),
          "adaptive_torque: model exposes no regressor");
  require(neighbor_s.size() == weights.size(),
          "adaptive_torque: one weight per neighbor");
  const Mat y =
      model.regressor(state.q, state.qdot, signals.qr_dot, signals.qr_ddot);
  require(a_hat.size() == y.cols(),
          "adaptive_torque: estimate length mismatch");
  Vec tau = y * a_hat - gains.k1.cwiseProduct(signals.s);
  for (std::size_t j = 0; j < neighbor_s.size(); ++j) {
    tau += weights[j] * gains.k2.cwiseProduct(neighbor_s[j]);
  }
  return tau;
}

Vec adaptive_param_rate(const Mat& regressor, const Vec& s, const Mat& gamma) {
  require(gamma.rows() == regressor.cols() && regressor.rows() == s.size(),
          "adaptive_param_rate: dimension mismatch");
  return -gamma * (regressor.transpose() * s);
}

Vec pd_coupled_torque(const RobotState& state,
                      std::span<const RobotState> neighbors,
                      std::span<const double> weights, const Gains& gains,
                      const Vec& q_d_rest) {
  require(neighbors.size() == weights.size(),
          "pd_torque: one weight per neighbor");
  require(q_d_rest.size() == state.dof(), "pd_torque: rest length mismatch");
  auto pd_term = [&](const RobotState& r) -> Vec {
    return r.qdot + gains.lambda.cwiseProduct(r.q - q_d_rest);
  };
  Vec tau = -gains.k1.cwiseProduct(pd_term(state));
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    tau += weights[j] * gains.k2.cwiseProduct(pd_term(neighbors[j]));
  }
  return tau;
}

Vec pd_torque(const RobotState& state, const RobotState& neighbor,
              const Gains& gains, const Vec& q_d_rest) {
  const RobotState neighbors[] = {neighbor};
  const double weights[] = {1.0};
  return pd_coupled_torque(state, neighbors, weights, gains, q_d_rest);
}

Vec partial_state_torque(const LagrangianModel& model, const RobotState& state,
                         const CompositeSignals& signals,
                         std::span<const Vec> neighbor_s, const Gains& gains,
                         const Vec& selector) {
  require(selector.size() == state.dof(),
          "partial_state_torque: selector length mismatch");
  require((selector.array() == 0.0 || selector.array() == 1.0).all(),
          "partial_state_torque: selector entries must be 0 or 1");
  const std::vector<double> weights(neighbor_s.size(), 1.0);
  return coupled_tracking_torque(model, state, signals, neighbor_s, weights,
                                 gains, 0.0, &selector);
}

Vec delayed_torque(const LagrangianModel& model, const RobotState& state,
                   const CompositeSignals& signals,
                   const Vec& delayed_neighbor_s, const Gains& gains) {
  const Vec neighbors[] = {delayed_neighbor_s};
  const double weights[] = {1.0};
  return coupled_tracking_torque(model, state, signals, neighbors, weights,
                                 gains);
}

Vec inhibition_torque(const Vec& s_own, const Vec& s_partner, const Vec& k) {
  require(s_own.size() == s_partner.size() && k.size() == s_own.size(),
          "inhibition_torque: dimension mismatch");
  return -k.cwiseProduct(s_own + s_partner);
}

void apply_inhibition(CouplingGraph& graph, Gains& gains, int a, int b,
                      const Vec& k) {
  require(a >= 0 && a < graph.p && b >= 0 && b < graph.p && a != b,
          "apply_inhibition: member indices out of range");
  require(k.size() == gains.k1.size() && (k.array() > 0.0).all(),
          "apply_inhibition: K must be positive definite");
  const Vec residual = gains.k1 - 2.0 * gains.k2;
  require(residual.cwiseAbs().maxCoeff() < 1e-9,
          "apply_inhibition: base law must be indifferent (K1 = 2 K2)");
  graph.inhibitory_link = std::make_pair(a, b);
  gains.k_inhib = k;
}

}  // namespace lagsync
