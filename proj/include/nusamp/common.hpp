#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace nusamp {

/// Bad argument supplied by the caller (violated precondition).
struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (no bracket, indefinite Gram, overflow, ...).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested a combination the library deliberately does not support.
struct capability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double pi = 3.14159265358979323846264338327950288;

inline bool is_finite(double x) { return std::isfinite(x); }

/// Round half-to-even at `digits` decimal places.
inline double round_half_even(double x, int digits) {
  const double scale = std::pow(10.0, digits);
  const double y = x * scale;
  double r = std::nearbyint(y);  // banker's rounding under default FE mode
  // nearbyint honours the current rounding mode; enforce ties-to-even explicitly.
  if (std::abs(y - std::trunc(y)) == 0.5) {
    const double f = std::floor(y);
    r = (std::fmod(f, 2.0) == 0.0) ? f : f + 1.0;
  }
  return r / scale;
}

/// Solve f(z) = target for a strictly increasing f on (0, inf).
/// Brackets from [lo0, hi0] by doubling, then bisects to `tol` in z.
inline double solve_increasing(const std::function<double(double)>& f,
                               double target, double tol = 1e-12,
                               double lo0 = 1e-8, double hi0 = 1.0) {
  double lo = lo0, hi = hi0;
  double flo = f(lo), fhi = f(hi);
  int guard = 0;
  while (flo > target && lo > 1e-300) {
    lo *= 0.5;
    flo = f(lo);
    if (++guard > 1100) break;
  }
  guard = 0;
  while (fhi < target) {
    hi *= 2.0;
    if (hi > 1e12 || ++guard > 200)
      throw numerical_error("solve_increasing: bracket expansion failed, last bracket [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
    fhi = f(hi);
  }
  if (flo > target)
    throw numerical_error("solve_increasing: lower bracket does not undershoot target");
  for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double log_factorial(int n) { return std::lgamma(double(n) + 1.0); }

inline double factorial(int n) {
  static const double table[] = {1., 1., 2., 6., 24., 120., 720., 5040., 40320.,
                                 362880., 3628800., 39916800., 479001600.,
                                 6227020800., 87178291200., 1307674368000.,
                                 20922789888000., 355687428096000.,
                                 6402373705728000., 121645100408832000.,
                                 2432902008176640000.};
  if (n < 0) throw input_error("factorial: negative argument");
  if (n <= 20) return table[n];
  return std::exp(log_factorial(n));
}

/// Deterministic random source. mt19937_64 is portable; the distributions in
/// <random> are not, so uniforms/normals are derived from raw bits here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nusamp
