#pragma once

// Test-only numerical oracles, kept independent of the library's own
// evaluation paths.

#include <random>

#include "lagsync/dynamics.hpp"

namespace lagsync::oracles {

/// Mdot along any trajectory through (q, qdot) by central differences:
/// Mdot = (M(q + eps*qdot) - M(q - eps*qdot)) / (2 eps).
inline Mat mdot_fd(const LagrangianModel& model, const Vec& q, const Vec& qdot,
                   double eps = 1e-5) {
  return (model.mass_matrix(q + eps * qdot) -
          model.mass_matrix(q - eps * qdot)) /
         (2.0 * eps);
}

/// x'(Mdot - 2C)x with the finite-difference Mdot; zero for a Christoffel C.
inline double skew_residual(const LagrangianModel& model, const Vec& q,
                            const Vec& qdot, const Vec& x, double eps = 1e-5) {
  const Mat mdot = mdot_fd(model, q, qdot, eps);
  const Mat c = model.coriolis_matrix(q, qdot);
  return x.dot((mdot - 2.0 * c) * x);
}

inline Vec random_vec(std::mt19937& rng, int n, double bound) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace lagsync::oracles
