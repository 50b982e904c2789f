#include "impulse/analytic_oracle.hpp"

#include <cmath>

#include "impulse/errors.hpp"

namespace impulse {

LinearSystem LinearSystem::from_plant(const PlantParams& plant, double d) {
  LinearSystem sys;
  sys.A = {{{0.0, 1.0}, {-plant.K / plant.m, -(d + plant.D) / plant.m}}};
  sys.B = {0.0, 1.0 / plant.m};
  return sys;
}

DampingRegime classify(const PlantParams& plant, double d) noexcept {
  const double total = d + plant.D;
  const double critical = 4.0 * plant.m * plant.K;
  const double disc = total * total - critical;
  if (std::abs(disc) < 1e-9 * critical) return DampingRegime::CriticallyDamped;
  return disc < 0.0 ? DampingRegime::Underdamped : DampingRegime::Overdamped;
}

Matrix2 transition_matrix(const LinearSystem& sys, double t) {
  const auto& A = sys.A;
  const double s = -0.5 * (A[0][0] + A[1][1]);
  const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  const double q = s * s - det;  // (A + sI)^2 = q I

  // Same degeneracy rule as classify(), expressed on the matrix: det = K/m.
  const double scale = 4.0 * std::abs(det);
  double c = 1.0;
  double g = t;
  if (std::abs(4.0 * q) >= 1e-9 * scale) {
    const double w = std::sqrt(std::abs(q));
    if (q < 0.0) {
      c = std::cos(w * t);
      g = std::sin(w * t) / w;
    } else {
      c = std::cosh(w * t);
      g = std::sinh(w * t) / w;
    }
  }
  const double e = std::exp(-s * t);
  Matrix2 out{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double shifted = A[i][j] + (i == j ? s : 0.0);
      out[i][j] = e * ((i == j ? c : 0.0) + g * shifted);
    }
  }
  return out;
}

MotionState exact_state(const LinearSystem& sys, const MotionState& x0, double t) {
  if (t < x0.t) throw ContractViolation("exact_state: t precedes the initial time");
  if (t == x0.t) return x0;
  const Matrix2 phi = transition_matrix(sys, t - x0.t);
  return {t, phi[0][0] * x0.x + phi[0][1] * x0.v, phi[1][0] * x0.x + phi[1][1] * x0.v};
}

VelocityJumpTarget velocity_jump_target(double x0, double d_true, double d_hi, double m) noexcept {
  return {-x0 * (d_hi - d_true) / (2.0 * m), -x0 * d_hi / (2.0 * m)};
}

}  // namespace impulse
