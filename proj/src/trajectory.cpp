#include "lagsync/trajectory.hpp"

#include <cmath>

namespace lagsync {

double JointWave::value(double t) const {
  switch (type) {
    case Type::Constant:
      return offset;
    case Type::Ramp:
      return offset + amplitude * t;
    case Type::Sin:
      return offset + amplitude * std::sin(omega * t);
    case Type::Cos:
      return offset + amplitude * std::cos(omega * t);
    case Type::OneMinusCos:
      return offset + amplitude * (1.0 - std::cos(omega * t));
  }
  return 0.0;
}

double JointWave::d1(double t) const {
  switch (type) {
    case Type::Constant:
      return 0.0;
    case Type::Ramp:
      return amplitude;
    case Type::Sin:
      return amplitude * omega * std::cos(omega * t);
    case Type::Cos:
      return -amplitude * omega * std::sin(omega * t);
    case Type::OneMinusCos:
      return amplitude * omega * std::sin(omega * t);
  }
  return 0.0;
}

double JointWave::d2(double t) const {
  switch (type) {
    case Type::Constant:
    case Type::Ramp:
      return 0.0;
    case Type::Sin:
      return -amplitude * omega * omega * std::sin(omega * t);
    case Type::Cos:
      return -amplitude * omega * omega * std::cos(omega * t);
    case Type::OneMinusCos:
      return amplitude * omega * omega * std::cos(omega * t);
  }
  return 0.0;
}

DesiredTrajectory DesiredTrajectory::analytic(std::vector<JointWave> joints) {
  if (joints.empty()) {
    throw ContractViolation("DesiredTrajectory: empty joint list");
  }
  DesiredTrajectory traj(Source::Analytic, static_cast<int>(joints.size()));
  traj.joints_ = std::move(joints);
  return traj;
}

DesiredTrajectory DesiredTrajectory::zero(int n) {
  if (n <= 0) throw ContractViolation("DesiredTrajectory: invalid dof");
  return DesiredTrajectory(Source::Zero, n);
}

DesiredTrajectory DesiredTrajectory::rest(Vec q_rest) {
  if (q_rest.size() == 0) {
    throw ContractViolation("DesiredTrajectory: empty rest position");
  }
  DesiredTrajectory traj(Source::Rest, static_cast<int>(q_rest.size()));
  traj.rest_ = std::move(q_rest);
  return traj;
}

TrajectorySample DesiredTrajectory::sample(double t) const {
  TrajectorySample s;
  s.q_d = Vec::Zero(n_);
  s.qdot_d = Vec::Zero(n_);
  s.qddot_d = Vec::Zero(n_);
  switch (source_) {
    case Source::Analytic:
      for (int j = 0; j < n_; ++j) {
        s.q_d[j] = joints_[j].value(t);
        s.qdot_d[j] = joints_[j].d1(t);
        s.qddot_d[j] = joints_[j].d2(t);
      }
      break;
    case Source::Rest:
      s.q_d = rest_;
      break;
    case Source::Zero:
      break;
  }
  return s;
}

}  // namespace lagsync
