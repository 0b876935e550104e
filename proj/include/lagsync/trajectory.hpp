#pragma once

#include <vector>

#include "lagsync/dynamics.hpp"

namespace lagsync {

/// Desired position, velocity and acceleration at one instant. Relayed
/// references produced inside the simulator use the same carrier.
struct TrajectorySample {
  Vec q_d;
  Vec qdot_d;
  Vec qddot_d;
};

/// One joint's analytic reference signal.
struct JointWave {
  enum class Type { Constant, Ramp, Sin, Cos, OneMinusCos };
  Type type = Type::Constant;
  double amplitude = 0.0;  // or ramp rate for Type::Ramp
  double omega = 0.0;      // [rad/s]
  double offset = 0.0;

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
};

class DesiredTrajectory {
 public:
  enum class Source { Analytic, Zero, Rest };

  static DesiredTrajectory analytic(std::vector<JointWave> joints);
  /// No reference: q_d == 0, the pure-synchronization regime where
  /// qr_dot = -Lambda q and s = qdot + Lambda q.
  static DesiredTrajectory zero(int n);
  static DesiredTrajectory rest(Vec q_rest);

  TrajectorySample sample(double t) const;
  int dof() const { return n_; }
  Source source() const { return source_; }

 private:
  DesiredTrajectory(Source source, int n) : source_(source), n_(n) {}

  Source source_ = Source::Zero;
  int n_ = 0;
  std::vector<JointWave> joints_;
  Vec rest_;
};

}  // namespace lagsync
