#include "lagsync/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lagsync {

RobotState::RobotState(Vec q_in, Vec qdot_in)
    : q(std::move(q_in)), qdot(std::move(qdot_in)) {
  if (q.size() != qdot.size()) {
    throw ContractViolation("RobotState: q and qdot lengths differ");
  }
  if (!q.allFinite() || !qdot.allFinite()) {
    throw ContractViolation("RobotState: non-finite entries");
  }
}

void LagrangianModel::check_dim(const Vec& v, const char* what) const {
  if (v.size() != n_) {
    throw ContractViolation(std::string(what) + ": expected length " +
                            std::to_string(n_) + ", got " +
                            std::to_string(v.size()));
  }
  if (!v.allFinite()) {
    throw ContractViolation(std::string(what) + ": non-finite entries");
  }
}

Mat LagrangianModel::regressor(const Vec&, const Vec&, const Vec&,
                               const Vec&) const {
  throw UnsupportedCapability(name_ + ": no linear parameterization exposed");
}

// ---------------------------------------------------------------------------
// Two-link arm (Slotine & Li two-link manipulator with payload)

namespace {

Eigen::Vector4d lumped_arm_params(const TwoLinkArmParams& p, double scale) {
  Eigen::Vector4d a;
  a[0] = p.I1 + p.m1 * p.lc1 * p.lc1 + p.Ie + p.me * p.lce * p.lce +
         p.me * p.l1 * p.l1;
  a[1] = p.Ie + p.me * p.lce * p.lce;
  a[2] = p.me * p.l1 * p.lce * std::cos(p.delta_e);
  a[3] = p.me * p.l1 * p.lce * std::sin(p.delta_e);
  return scale * a;
}

// Conservative lower bound of eigmin(M) over q: with u = a3*c2 + a4*s2 in
// [-r, r], r = sqrt(a3^2 + a4^2), det M = a2*(a1 - a2) - u^2 and
// trace <= a1 + a2 + 2r, so eigmin >= det / trace at the worst u.
double arm_mass_floor(const Eigen::Vector4d& a) {
  const double r = std::hypot(a[2], a[3]);
  const double det_min = a[1] * (a[0] - a[1]) - r * r;
  const double tr_max = a[0] + a[1] + 2.0 * r;
  return det_min / tr_max;
}

}  // namespace

TwoLinkArm::TwoLinkArm(const TwoLinkArmParams& params, double scale)
    : LagrangianModel(ModelKind::TwoLinkArm, 2,
                      scale == 1.0 ? "two-link-arm"
                                   : "two-link-arm(x" + std::to_string(scale) +
                                         ")",
                      0.0, /*gravity_on=*/false, scale),
      p_(params),
      a_(lumped_arm_params(params, scale)) {
  mass_floor_ = arm_mass_floor(a_);
  if (mass_floor_ <= 0.0) {
    throw ContractViolation("TwoLinkArm: parameters give indefinite M(q)");
  }
}

Mat TwoLinkArm::mass_matrix(const Vec& q) const {
  check_dim(q, "q");
  const double c2 = std::cos(q[1]);
  const double s2 = std::sin(q[1]);
  Mat M(2, 2);
  M(0, 0) = a_[0] + 2.0 * a_[2] * c2 + 2.0 * a_[3] * s2;
  M(0, 1) = a_[1] + a_[2] * c2 + a_[3] * s2;
  M(1, 0) = M(0, 1);
  M(1, 1) = a_[1];
  return M;
}

Mat TwoLinkArm::coriolis_matrix(const Vec& q, const Vec& qdot) const {
  check_dim(q, "q");
  check_dim(qdot, "qdot");
  const double h = a_[2] * std::sin(q[1]) - a_[3] * std::cos(q[1]);
  Mat C(2, 2);
  C(0, 0) = -h * qdot[1];
  C(0, 1) = -h * (qdot[0] + qdot[1]);
  C(1, 0) = h * qdot[0];
  C(1, 1) = 0.0;
  return C;
}

Vec TwoLinkArm::gravity(const Vec& q) const {
  check_dim(q, "q");
  return Vec::Zero(2);  // horizontal plane
}

Mat TwoLinkArm::regressor(const Vec& q, const Vec& qdot, const Vec& qr_dot,
                          const Vec& qr_ddot) const {
  check_dim(q, "q");
  check_dim(qdot, "qdot");
  check_dim(qr_dot, "qr_dot");
  check_dim(qr_ddot, "qr_ddot");
  const double c2 = std::cos(q[1]);
  const double s2 = std::sin(q[1]);
  const double w = qdot[1] * qr_dot[0] + qdot[0] * qr_dot[1] +
                   qdot[1] * qr_dot[1];
  Mat Y = Mat::Zero(2, 4);
  Y(0, 0) = qr_ddot[0];
  Y(0, 1) = qr_ddot[1];
  Y(0, 2) = (2.0 * qr_ddot[0] + qr_ddot[1]) * c2 - w * s2;
  Y(0, 3) = (2.0 * qr_ddot[0] + qr_ddot[1]) * s2 + w * c2;
  Y(1, 1) = qr_ddot[0] + qr_ddot[1];
  Y(1, 2) = qr_ddot[0] * c2 + qdot[0] * qr_dot[0] * s2;
  Y(1, 3) = qr_ddot[0] * s2 - qdot[0] * qr_dot[0] * c2;
  return Y;
}

std::unique_ptr<LagrangianModel> TwoLinkArm::scaled(double factor) const {
  return std::make_unique<TwoLinkArm>(p_, scale_ * factor);
}

// ---------------------------------------------------------------------------
// Cart with double pendulum

namespace {

Eigen::Matrix<double, 6, 1> lumped_cart_params(
    const CartDoublePendulumParams& p, double scale) {
  Eigen::Matrix<double, 6, 1> a;
  a[0] = p.m0 + p.m1 + p.m2;
  a[1] = p.m1 * p.lc1 + p.m2 * p.l1;
  a[2] = p.m2 * p.lc2;
  a[3] = p.m1 * p.lc1 * p.lc1 + p.m2 * p.l1 * p.l1 + p.I1;
  a[4] = p.m2 * p.l1 * p.lc2;
  a[5] = p.m2 * p.lc2 * p.lc2 + p.I2;
  return scale * a;
}

// eigmin(M) is minimized where all cosines align; sample the extreme
// configurations and take the smallest eigenvalue with a safety margin.
double cart_mass_floor(const Eigen::Matrix<double, 6, 1>& a) {
  double floor = std::numeric_limits<double>::max();
  for (double c1 : {-1.0, 1.0}) {
    for (double c2 : {-1.0, 1.0}) {
      Mat M(3, 3);
      M << a[0], a[1] * c1, a[2] * c2,
           a[1] * c1, a[3], a[4] * c1 * c2,
           a[2] * c2, a[4] * c1 * c2, a[5];
      Eigen::SelfAdjointEigenSolver<Mat> es(M);
      floor = std::min(floor, es.eigenvalues().minCoeff());
    }
  }
  return 0.9 * floor;
}

}  // namespace

CartDoublePendulum::CartDoublePendulum(const CartDoublePendulumParams& params,
                                       bool gravity_on, double scale)
    : LagrangianModel(ModelKind::CartDoublePendulum, 3,
                      scale == 1.0 ? "cart-double-pendulum"
                                   : "cart-double-pendulum(x" +
                                         std::to_string(scale) + ")",
                      0.0, gravity_on, scale),
      p_(params),
      a_(lumped_cart_params(params, scale)) {
  mass_floor_ = cart_mass_floor(a_);
  if (mass_floor_ <= 0.0) {
    throw ContractViolation(
        "CartDoublePendulum: parameters give indefinite M(q)");
  }
}

Mat CartDoublePendulum::mass_matrix(const Vec& q) const {
  check_dim(q, "q");
  const double c1 = std::cos(q[1]);
  const double c2 = std::cos(q[2]);
  const double c12 = std::cos(q[1] - q[2]);
  Mat M(3, 3);
  M << a_[0], a_[1] * c1, a_[2] * c2,
       a_[1] * c1, a_[3], a_[4] * c12,
       a_[2] * c2, a_[4] * c12, a_[5];
  return M;
}

Mat CartDoublePendulum::coriolis_matrix(const Vec& q, const Vec& qdot) const {
  check_dim(q, "q");
  check_dim(qdot, "qdot");
  const double s1 = std::sin(q[1]);
  const double s2 = std::sin(q[2]);
  const double s12 = std::sin(q[1] - q[2]);
  Mat C = Mat::Zero(3, 3);
  C(0, 1) = -a_[1] * s1 * qdot[1];
  C(0, 2) = -a_[2] * s2 * qdot[2];
  C(1, 2) = a_[4] * s12 * qdot[2];
  C(2, 1) = -a_[4] * s12 * qdot[1];
  return C;
}

Vec CartDoublePendulum::gravity(const Vec& q) const {
  check_dim(q, "q");
  Vec g = Vec::Zero(3);
  if (gravity_on_) {
    g[1] = -kGravity * a_[1] * std::sin(q[1]);
    g[2] = -kGravity * a_[2] * std::sin(q[2]);
  }
  return g;
}

Mat CartDoublePendulum::regressor(const Vec& q, const Vec& qdot,
                                  const Vec& qr_dot,
                                  const Vec& qr_ddot) const {
  check_dim(q, "q");
  check_dim(qdot, "qdot");
  check_dim(qr_dot, "qr_dot");
  check_dim(qr_ddot, "qr_ddot");
  const double c1 = std::cos(q[1]);
  const double s1 = std::sin(q[1]);
  const double c2 = std::cos(q[2]);
  const double s2 = std::sin(q[2]);
  const double c12 = std::cos(q[1] - q[2]);
  const double s12 = std::sin(q[1] - q[2]);
  const double geff = gravity_on_ ? kGravity : 0.0;
  Mat Y = Mat::Zero(3, 6);
  Y(0, 0) = qr_ddot[0];
  Y(0, 1) = c1 * qr_ddot[1] - s1 * qdot[1] * qr_dot[1];
  Y(0, 2) = c2 * qr_ddot[2] - s2 * qdot[2] * qr_dot[2];
  Y(1, 1) = c1 * qr_ddot[0] - geff * s1;
  Y(1, 3) = qr_ddot[1];
  Y(1, 4) = c12 * qr_ddot[2] + s12 * qdot[2] * qr_dot[2];
  Y(2, 2) = c2 * qr_ddot[0] - geff * s2;
  Y(2, 4) = c12 * qr_ddot[1] - s12 * qdot[1] * qr_dot[1];
  Y(2, 5) = qr_ddot[2];
  return Y;
}

std::unique_ptr<LagrangianModel> CartDoublePendulum::scaled(
    double factor) const {
  return std::make_unique<CartDoublePendulum>(p_, gravity_on_,
                                              scale_ * factor);
}

// ---------------------------------------------------------------------------

ModelTerms model_terms(const LagrangianModel& model, const Vec& q,
                       const Vec& qdot) {
  return ModelTerms{model.mass_matrix(q), model.coriolis_matrix(q, qdot),
                    model.gravity(q)};
}

Vec forward_dynamics(const LagrangianModel& model, const RobotState& state,
                     const Vec& tau) {
  if (tau.size() != model.dof()) {
    throw ContractViolation("forward_dynamics: tau length mismatch");
  }
  if (!tau.allFinite()) {
    throw ContractViolation("forward_dynamics: non-finite tau");
  }
  const ModelTerms terms = model_terms(model, state.q, state.qdot);
  const Vec rhs = tau - terms.C * state.qdot - terms.g;
  return terms.M.ldlt().solve(rhs);
}

}  // namespace lagsync
