#include <doctest.h>

#include <memory>
#include <random>
#include <vector>

#include "lagsync/dynamics.hpp"
#include "support/oracles.hpp"

using namespace lagsync;

namespace {

std::vector<std::unique_ptr<LagrangianModel>> all_models() {
  std::vector<std::unique_ptr<LagrangianModel>> models;
  models.push_back(std::make_unique<TwoLinkArm>());
  models.push_back(std::make_unique<CartDoublePendulum>());
  models.push_back(std::make_unique<CartDoublePendulum>(
      CartDoublePendulumParams{}, /*gravity_on=*/false));
  return models;
}

}  // namespace

TEST_CASE("mass matrix is symmetric positive definite over the workspace") {
  std::mt19937 rng(101);
  for (const auto& model : all_models()) {
    for (int trial = 0; trial < 500; ++trial) {
      const Vec q = oracles::random_vec(rng, model->dof(), 3.14159);
      const Mat m = model->mass_matrix(q);
      CHECK(m.isApprox(m.transpose(), 1e-12));
      Eigen::SelfAdjointEigenSolver<Mat> es(m);
      CHECK(es.eigenvalues().minCoeff() >= model->mass_eigenvalue_floor());
    }
    CHECK(model->mass_eigenvalue_floor() > 0.0);
  }
}

TEST_CASE("Mdot - 2C is skew-symmetric (finite-difference Mdot)") {
  std::mt19937 rng(102);
  for (const auto& model : all_models()) {
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Vec q = oracles::random_vec(rng, model->dof(), 3.14159);
      const Vec qdot = oracles::random_vec(rng, model->dof(), 2.0);
      Vec x = oracles::random_vec(rng, model->dof(), 1.0);
      x.normalize();
      worst = std::max(worst,
                       std::abs(oracles::skew_residual(*model, q, qdot, x)));
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("Coriolis matrix vanishes at zero velocity") {
  std::mt19937 rng(103);
  for (const auto& model : all_models()) {
    const Vec q = oracles::random_vec(rng, model->dof(), 3.14159);
    const Vec zero = Vec::Zero(model->dof());
    CHECK(model->coriolis_matrix(q, zero).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("regressor identity Y a = M qr_ddot + C qr_dot + g") {
  std::mt19937 rng(104);
  for (const auto& model : all_models()) {
    REQUIRE(model->has_regressor());
    const Vec a = model->params();
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = model->dof();
      const Vec q = oracles::random_vec(rng, n, 3.14159);
      const Vec qdot = oracles::random_vec(rng, n, 2.0);
      const Vec qr_dot = oracles::random_vec(rng, n, 2.0);
      const Vec qr_ddot = oracles::random_vec(rng, n, 2.0);
      const ModelTerms terms = model_terms(*model, q, qdot);
      const Vec direct = terms.M * qr_ddot + terms.C * qr_dot + terms.g;
      const Vec via_regressor =
          model->regressor(q, qdot, qr_dot, qr_ddot) * a;
      worst = std::max(worst, (direct - via_regressor).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("regressor shape and zero case for the two-link arm") {
  TwoLinkArm arm;
  const Vec q = (Vec(2) << 0.3, -0.7).finished();
  const Vec qdot = (Vec(2) << 0.1, 0.2).finished();
  const Vec zero = Vec::Zero(2);
  const Mat y = arm.regressor(q, qdot, zero, zero);
  CHECK(y.rows() == 2);
  CHECK(y.cols() == 4);  // matches the 4-entry estimate a_hat(0) = (3,1,1,1)
  CHECK((y * arm.params()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward dynamics: feedforward cancellation and substitute-back") {
  std::mt19937 rng(105);
  for (const auto& model : all_models()) {
    const int n = model->dof();
    for (int trial = 0; trial < 200; ++trial) {
      const RobotState state(oracles::random_vec(rng, n, 3.14159),
                             oracles::random_vec(rng, n, 2.0));
      const ModelTerms terms = model_terms(*model, state.q, state.qdot);

      // tau = C qdot + g holds the velocity: qddot = 0.
      const Vec hold = terms.C * state.qdot + terms.g;
      CHECK(forward_dynamics(*model, state, hold).cwiseAbs().maxCoeff() <
            1e-10);

      const Vec tau = oracles::random_vec(rng, n, 5.0);
      const Vec qddot = forward_dynamics(*model, state, tau);
      const Vec residual =
          terms.M * qddot + terms.C * state.qdot + terms.g - tau;
      CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("unforced gravity-free arm conserves energy under RK4") {
  TwoLinkArm arm;
  RobotState state((Vec(2) << 0.4, -0.9).finished(),
                   (Vec(2) << 0.8, -0.3).finished());
  const Vec tau = Vec::Zero(2);
  auto energy = [&](const RobotState& s) {
    return 0.5 * s.qdot.dot(arm.mass_matrix(s.q) * s.qdot);
  };
  const double e0 = energy(state);

  const double dt = 1e-3;
  Vec x(4);
  x << state.q, state.qdot;
  auto deriv = [&](const Vec& y) {
    const RobotState s(y.head(2), y.tail(2));
    Vec d(4);
    d.head(2) = s.qdot;
    d.tail(2) = forward_dynamics(arm, s, tau);
    return d;
  };
  for (int k = 0; k < 10000; ++k) {
    const Vec k1 = deriv(x);
    const Vec k2 = deriv(x + 0.5 * dt * k1);
    const Vec k3 = deriv(x + 0.5 * dt * k2);
    const Vec k4 = deriv(x + dt * k3);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const double e1 = energy(RobotState(x.head(2), x.tail(2)));
  CHECK(std::abs(e1 - e0) < 1e-6);
}

TEST_CASE("scaled variants preserve the invariants") {
  std::mt19937 rng(106);
  for (const auto& base : all_models()) {
    for (double factor : {2.0, 1.5}) {
      const auto scaled = base->scaled(factor);
      CHECK(scaled->params().isApprox(factor * base->params(), 1e-12));
      CHECK(scaled->mass_eigenvalue_floor() > 0.0);
      const Vec q = oracles::random_vec(rng, base->dof(), 3.0);
      const Vec qdot = oracles::random_vec(rng, base->dof(), 2.0);
      Vec x = oracles::random_vec(rng, base->dof(), 1.0);
      x.normalize();
      CHECK(std::abs(oracles::skew_residual(*scaled, q, qdot, x)) < 1e-9);
      const ModelTerms terms = model_terms(*scaled, q, qdot);
      const Vec direct = terms.M * qdot + terms.C * qdot + terms.g;
      const Vec via = scaled->regressor(q, qdot, qdot, qdot) * scaled->params();
      CHECK((direct - via).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

namespace {

// Minimal model without a linear parameterization, for the error path.
class PointMass final : public LagrangianModel {
 public:
  PointMass() : LagrangianModel(ModelKind::TwoLinkArm, 1, "point-mass", 1.0,
                                false, 1.0) {}
  Mat mass_matrix(const Vec&) const override {
    return Mat::Identity(1, 1);
  }
  Mat coriolis_matrix(const Vec&, const Vec&) const override {
    return Mat::Zero(1, 1);
  }
  Vec gravity(const Vec&) const override { return Vec::Zero(1); }
  std::unique_ptr<LagrangianModel> scaled(double) const override {
    return std::make_unique<PointMass>();
  }
};

}  // namespace

TEST_CASE("error paths: dimension mismatch, non-finite torque, no regressor") {
  TwoLinkArm arm;
  CHECK_THROWS_AS(arm.mass_matrix(Vec::Zero(3)), ContractViolation);
  CHECK_THROWS_AS(RobotState(Vec::Zero(2), Vec::Zero(3)), ContractViolation);

  const RobotState state(Vec::Zero(2), Vec::Zero(2));
  Vec bad = Vec::Zero(2);
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(forward_dynamics(arm, state, bad), ContractViolation);
  CHECK_THROWS_AS(forward_dynamics(arm, state, Vec::Zero(3)),
                  ContractViolation);

  PointMass pm;
  CHECK_FALSE(pm.has_regressor());
  CHECK_THROWS_AS(
      pm.regressor(Vec::Zero(1), Vec::Zero(1), Vec::Zero(1), Vec::Zero(1)),
      UnsupportedCapability);
}
