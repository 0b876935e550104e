#pragma once

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>

namespace lagsync {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when an operation is requested from a model that cannot provide it
/// (e.g. the linear-in-parameters regressor).
class UnsupportedCapability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown on dimension mismatches and non-finite inputs.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RobotState {
  Vec q;
  Vec qdot;

  RobotState() = default;
  RobotState(Vec q_in, Vec qdot_in);

  int dof() const { return static_cast<int>(q.size()); }
};

struct ModelTerms {
  Mat M;  // symmetric positive definite inertia matrix
  Mat C;  // Christoffel Coriolis/centrifugal matrix, Mdot - 2C skew
  Vec g;  // gravity torque
};

enum class ModelKind { TwoLinkArm, CartDoublePendulum };

/// Closed-form rigid-body model: inertia matrix, Coriolis matrix (Christoffel
/// parameterization, so Mdot - 2C is skew-symmetric by construction), gravity
/// vector and, where available, the regressor Y with M*qr_ddot + C*qr_dot + g
/// = Y * a for the model's physical parameter vector a.
class LagrangianModel {
 public:
  virtual ~LagrangianModel() = default;

  int dof() const { return n_; }
  ModelKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// Declared lower bound on the smallest eigenvalue of M(q) over the
  /// workspace.
  double mass_eigenvalue_floor() const { return mass_floor_; }
  bool gravity_enabled() const { return gravity_on_; }
  double scale() const { return scale_; }

  virtual Mat mass_matrix(const Vec& q) const = 0;
  virtual Mat coriolis_matrix(const Vec& q, const Vec& qdot) const = 0;
  virtual Vec gravity(const Vec& q) const = 0;

  virtual bool has_regressor() const { return false; }
  virtual Mat regressor(const Vec& q, const Vec& qdot, const Vec& qr_dot,
                        const Vec& qr_ddot) const;
  /// True physical parameter vector a (empty when has_regressor() is false).
  virtual Vec params() const { return Vec(); }

  /// Copy of this model with all masses and inertias multiplied by `factor`.
  virtual std::unique_ptr<LagrangianModel> scaled(double factor) const = 0;

 protected:
  LagrangianModel(ModelKind kind, int n, std::string name, double mass_floor,
                  bool gravity_on, double scale)
      : kind_(kind),
        n_(n),
        name_(std::move(name)),
        mass_floor_(mass_floor),
        gravity_on_(gravity_on),
        scale_(scale) {}

  void check_dim(const Vec& v, const char* what) const;

  ModelKind kind_;
  int n_;
  std::string name_;
  double mass_floor_;
  bool gravity_on_;
  double scale_;
};

/// Planar two-link manipulator with a grasped payload, horizontal plane (no
/// gravity term). Linear in the four lumped parameters
///   a1 = I1 + m1*lc1^2 + Ie + me*lce^2 + me*l1^2
///   a2 = Ie + me*lce^2
///   a3 = me*l1*lce*cos(delta_e)
///   a4 = me*l1*lce*sin(delta_e)
struct TwoLinkArmParams {
  double m1 = 1.0;      // link-1 mass [kg]
  double l1 = 1.0;      // link-1 length [m]
  double lc1 = 0.5;     // link-1 center of mass [m]
  double I1 = 0.12;     // link-1 inertia about com [kg m^2]
  double me = 2.0;      // payload mass [kg]
  double lce = 0.6;     // payload com offset [m]
  double Ie = 0.25;     // payload inertia [kg m^2]
  double delta_e = 0.5235987755982988;  // payload com angle [rad] (30 deg)
};

class TwoLinkArm final : public LagrangianModel {
 public:
  explicit TwoLinkArm(const TwoLinkArmParams& params = {}, double scale = 1.0);

  Mat mass_matrix(const Vec& q) const override;
  Mat coriolis_matrix(const Vec& q, const Vec& qdot) const override;
  Vec gravity(const Vec& q) const override;
  bool has_regressor() const override { return true; }
  Mat regressor(const Vec& q, const Vec& qdot, const Vec& qr_dot,
                const Vec& qr_ddot) const override;
  Vec params() const override { return a_; }
  std::unique_ptr<LagrangianModel> scaled(double factor) const override;

  const TwoLinkArmParams& physical_params() const { return p_; }

 private:
  TwoLinkArmParams p_;
  Eigen::Vector4d a_;
};

/// Cart with a double pendulum, 3 DOF (cart position, two link angles from
/// the upward vertical), fully actuated. Linear in the six lumped parameters
///   p1 = m0 + m1 + m2          p4 = m1*lc1^2 + m2*l1^2 + I1
///   p2 = m1*lc1 + m2*l1        p5 = m2*l1*lc2
///   p3 = m2*lc2                p6 = m2*lc2^2 + I2
struct CartDoublePendulumParams {
  double m0 = 2.0;    // cart mass [kg]
  double m1 = 1.0;    // link-1 mass [kg]
  double m2 = 1.0;    // link-2 mass [kg]
  double l1 = 0.5;    // link-1 length [m]
  double lc1 = 0.25;  // link-1 com [m]
  double lc2 = 0.25;  // link-2 com [m]
  double I1 = 1.0 / 48.0;  // link inertias about com [kg m^2]
  double I2 = 1.0 / 48.0;
};

class CartDoublePendulum final : public LagrangianModel {
 public:
  explicit CartDoublePendulum(const CartDoublePendulumParams& params = {},
                              bool gravity_on = true, double scale = 1.0);

  Mat mass_matrix(const Vec& q) const override;
  Mat coriolis_matrix(const Vec& q, const Vec& qdot) const override;
  Vec gravity(const Vec& q) const override;
  bool has_regressor() const override { return true; }
  Mat regressor(const Vec& q, const Vec& qdot, const Vec& qr_dot,
                const Vec& qr_ddot) const override;
  Vec params() const override { return a_; }
  std::unique_ptr<LagrangianModel> scaled(double factor) const override;

  const CartDoublePendulumParams& physical_params() const { return p_; }

 private:
  CartDoublePendulumParams p_;
  Eigen::Matrix<double, 6, 1> a_;
};

inline constexpr double kGravity = 9.81;  // [m/s^2]

/// Evaluate M, C, g at a state. Throws ContractViolation on size mismatch.
ModelTerms model_terms(const LagrangianModel& model, const Vec& q,
                       const Vec& qdot);

/// Solve M(q) qddot = tau - C qdot - g. Rejects non-finite torque.
Vec forward_dynamics(const LagrangianModel& model, const RobotState& state,
                     const Vec& tau);

}  // namespace lagsync
