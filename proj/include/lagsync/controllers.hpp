#pragma once

#include <span>

#include "lagsync/dynamics.hpp"
#include "lagsync/topology.hpp"
#include "lagsync/trajectory.hpp"

namespace lagsync {

/// Composite tracking variables:
///   qr_dot  = qdot_d - Lambda (q - q_d)
///   qr_ddot = qddot_d - Lambda (qdot - qdot_d)
///   s       = qdot - qr_dot
struct CompositeSignals {
  Vec qr_dot;
  Vec qr_ddot;
  Vec s;
};

CompositeSignals reference_signals(const TrajectorySample& traj,
                                   const RobotState& state,
                                   const Vec& lambda);

/// Exponential synchronization-tracking law, general regular-graph form:
///   tau = M qr_ddot + C qr_dot + g - K1 s_i + sum_j (2/m) K2 s_j
/// For the two-neighbor ring this is the K2 s_{i-1} + K2 s_{i+1} law.
Vec tracking_sync_torque(const LagrangianModel& model, const RobotState& state,
                         const CompositeSignals& signals,
                         std::span<const Vec> neighbor_s, const Gains& gains,
                         int m);

/// Weighted core shared by every composite-variable law. `weights` multiply
/// K2 per neighbor, `self_coupling` is the inline endpoint's K2 feedback to
/// itself and `mask` restricts the coupling to selected joints.
Vec coupled_tracking_torque(const LagrangianModel& model,
                            const RobotState& state,
                            const CompositeSignals& signals,
                            std::span<const Vec> neighbor_s,
                            std::span<const double> weights,
                            const Gains& gains, double self_coupling = 0.0,
                            const Vec* mask = nullptr);

/// Endpoint law of the inline configuration:
///   tau = M qr_ddot + C qr_dot + g - (K1 - K2) s_i + K2 s_j
Vec inline_endpoint_torque(const LagrangianModel& model,
                           const RobotState& state,
                           const CompositeSignals& signals,
                           const Vec& sole_neighbor_s, const Gains& gains);

/// tau = Y(q, qdot, qr_dot, qr_ddot) a_hat - K1 s_i + sum_j w_j K2 s_j
Vec adaptive_torque(const LagrangianModel& model, const RobotState& state,
                    const CompositeSignals& signals,
                    std::span<const Vec> neighbor_s,
                    std::span<const double> weights, const Gains& gains,
                    const Vec& a_hat);

/// Correlation-integral update rate a_hat_dot = -Gamma Y' s. The simulator
/// integrates this with the same RK4 stages as the plant.
Vec adaptive_param_rate(const Mat& regressor, const Vec& s, const Mat& gamma);

/// Linear PD coupling about a rest reference (qdot_d = 0); requires the
/// gravity term to be zero or cancelled by the model flag:
///   tau_i = -K1 (qdot_i + Lambda qtilde_i) + K2 (qdot_j + Lambda qtilde_j)
Vec pd_torque(const RobotState& state, const RobotState& neighbor,
              const Gains& gains, const Vec& q_d_rest);

Vec pd_coupled_torque(const RobotState& state,
                      std::span<const RobotState> neighbors,
                      std::span<const double> weights, const Gains& gains,
                      const Vec& q_d_rest);

/// Partial-state coupling: neighbor terms pass through K2 * P with a 0/1
/// diagonal selector P.
Vec partial_state_torque(const LagrangianModel& model, const RobotState& state,
                         const CompositeSignals& signals,
                         std::span<const Vec> neighbor_s, const Gains& gains,
                         const Vec& selector);

/// Delayed coupling tau = M qr_ddot + C qr_dot + g - K1 s_i + K2 s_j(t - T);
/// equivalently local damping (K1 - K2) plus K2 (s_j(t-T) - s_i(t)).
Vec delayed_torque(const LagrangianModel& model, const RobotState& state,
                   const CompositeSignals& signals,
                   const Vec& delayed_neighbor_s, const Gains& gains);

/// Extra torque -K (s_a + s_b) applied to both ends of an inhibitory link.
Vec inhibition_torque(const Vec& s_own, const Vec& s_partner, const Vec& k);

/// Attach an inhibitory link between members a and b. Requires the base law
/// to be in the indifferent-tracking regime (K1 = 2 K2) and K > 0.
void apply_inhibition(CouplingGraph& graph, Gains& gains, int a, int b,
                      const Vec& k);

}  // namespace lagsync
