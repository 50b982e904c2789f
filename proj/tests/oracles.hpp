#pragma once

// Test-only reference computations, independent of the library's numerical
// paths.

#include <cmath>
#include <cstdint>
#include <random>

#include "impulse/analytic_oracle.hpp"

namespace impulse::testing {

inline Matrix2 multiply(const Matrix2& a, const Matrix2& b) {
  Matrix2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

/// exp(M) by its defining power series. The argument is first scaled by
/// 2^-s until its norm is below 0.5 so that `terms` terms converge, then the
/// result is squared s times.
inline Matrix2 expm_power_series(const Matrix2& m, int terms = 30) {
  double norm = 0.0;
  for (const auto& row : m) norm = std::max(norm, std::abs(row[0]) + std::abs(row[1]));
  int squarings = 0;
  while (norm > 0.5) {
    norm *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  Matrix2 a{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a[i][j] = m[i][j] * scale;

  Matrix2 sum{{{1.0, 0.0}, {0.0, 1.0}}};
  Matrix2 term = sum;
  for (int n = 1; n < terms; ++n) {
    term = multiply(term, a);
    for (auto& row : term)
      for (auto& x : row) x /= n;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) sum[i][j] += term[i][j];
  }
  for (int s = 0; s < squarings; ++s) sum = multiply(sum, sum);
  return sum;
}

inline MotionState series_state(const LinearSystem& sys, const MotionState& x0, double t) {
  Matrix2 at{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) at[i][j] = sys.A[i][j] * (t - x0.t);
  const Matrix2 phi = expm_power_series(at);
  return {t, phi[0][0] * x0.x + phi[0][1] * x0.v, phi[1][0] * x0.x + phi[1][1] * x0.v};
}

/// Root of f on [a, b] by plain bisection; f(a), f(b) must differ in sign.
template <typename F>
double bisect_root(F&& f, double a, double b, int iters = 200) {
  double fa = f(a);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

/// Seeded uniform draws for property tests.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
  }
  std::uint64_t bits() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace impulse::testing
