#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nusamp/common.hpp"

namespace nusamp {

// Scalar functions controlling the density bounds for derivative sampling.
// All of them are strictly increasing in z on (0, inf), so their inverses are
// computed by bracketing + bisection.

/// Tail of the exponential series: exp(z) - sum_{r<=k} z^r/r!.
/// For z < k the direct form cancels catastrophically, so the tail series
/// sum_{r>k} z^r/r! is used there (truncated at 1e-18 relative).
inline double exp_tail(int k, double z) {
  if (k < 0) throw input_error("exp_tail: k must be >= 0");
  if (!is_finite(z)) throw input_error("exp_tail: z must be finite");
  if (z < 0.0) throw input_error("exp_tail: z must be positive");
  if (z == 0.0) return 0.0;
  if (z >= double(k)) {
    double partial = 0.0, term = 1.0;
    for (int r = 0; r <= k; ++r) {
      partial += term;
      term *= z / double(r + 1);
    }
    return std::exp(z) - partial;
  }
  // first tail term z^{k+1}/(k+1)! in log form to dodge overflow at large k
  double term = std::exp(double(k + 1) * std::log(z) - log_factorial(k + 1));
  double sum = term;
  for (int r = k + 2; r < k + 100000; ++r) {
    term *= z / double(r);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

/// (z + sqrt(z(d+z)))/d — the optimal covering parameter.
inline double sigma_star(int d, double z) {
  if (d < 1) throw input_error("sigma_star: d must be >= 1");
  if (!is_finite(z) || z <= 0.0) throw input_error("sigma_star: z must be positive");
  return (z + std::sqrt(z * (double(d) + z))) / double(d);
}

/// h_k(z) = exp(z) * exp_tail(k, z).
inline double h_k(int k, double z) {
  if (!is_finite(z) || z <= 0.0) throw input_error("h_k: z must be positive");
  if (z > 700.0)
    throw numerical_error("h_k: z=" + std::to_string(z) + " saturates exp; max supported is 700");
  return std::exp(z) * exp_tail(k, z);
}

/// g_{k,d}(z) = (1+2*sigma_star)^{d/2} exp(z/sigma_star) exp_tail(k, z).
inline double g_kd(int k, int d, double z) {
  if (!is_finite(z) || z <= 0.0) throw input_error("g_kd: z must be positive");
  if (z > 700.0)
    throw numerical_error("g_kd: z=" + std::to_string(z) + " saturates exp; max supported is 700");
  const double s = sigma_star(d, z);
  return std::pow(1.0 + 2.0 * s, 0.5 * double(d)) * std::exp(z / s) * exp_tail(k, z);
}

/// H_k(w): inverse of h_k, to 1e-10 absolute in z.
inline double inv_h_k(int k, double w) {
  if (!is_finite(w) || w <= 0.0) throw input_error("inv_h_k: w must be positive");
  return solve_increasing([k](double z) { return h_k(k, z); }, w, 1e-12);
}

/// G_{k,d}(w): inverse of g_{k,d}.
inline double inv_g_kd(int k, int d, double w) {
  if (!is_finite(w) || w <= 0.0) throw input_error("inv_g_kd: w must be positive");
  return solve_increasing([k, d](double z) { return g_kd(k, d, z); }, w, 1e-12);
}

enum class ConstantBranch { H, G };

struct DensityConstant {
  double value = 0.0;
  ConstantBranch branch = ConstantBranch::H;  // which inverse attained the max
  double h_inv = 0.0;                         // H_k(1)
  double g_inv = 0.0;                         // G_{k,d}(1)
};

/// C(k,d) = max{H_k(1), G_{k,d}(1)} with the attaining branch.
inline DensityConstant density_constant(int k, int d) {
  DensityConstant out;
  out.h_inv = inv_h_k(k, 1.0);
  out.g_inv = inv_g_kd(k, d, 1.0);
  if (out.g_inv > out.h_inv) {
    out.value = out.g_inv;
    out.branch = ConstantBranch::G;
  } else {
    out.value = out.h_inv;
    out.branch = ConstantBranch::H;
  }
  return out;
}

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool lower_positive = true;  // false => density too large, lower bound vacuous
};

/// Frame bounds of the multivariate derivative-sampling theorem at
/// x = m_omega * b * delta:
///   A = e^{-d} (1 - min{h_k(x), g_{k,d}(x)})^2,  B = exp(2x + x^2).
inline FrameBounds frame_bounds_multi(int k, int d, double delta, double m_omega, double b) {
  if (delta <= 0.0 || m_omega <= 0.0 || b <= 0.0)
    throw input_error("frame_bounds_multi: delta, m_omega, b must be positive");
  const double x = m_omega * b * delta;
  FrameBounds out;
  out.upper = std::exp(2.0 * x + x * x);
  const double m = std::min(h_k(k, x), g_kd(k, d, x));
  if (m >= 1.0) {
    out.lower = 0.0;
    out.lower_positive = false;
  } else {
    out.lower = std::exp(-double(d)) * (1.0 - m) * (1.0 - m);
  }
  return out;
}

/// Univariate bounds via the Wirtinger constant c_{k+1}:
///   A = e^{-1} (1 - (c_{k+1} delta m)^ {k+1})^2,
///   B = (1 + 2 delta m / pi)^2 exp((delta m)^2).
inline FrameBounds frame_bounds_1d(int k, double delta, double m_omega, double c_k1) {
  if (delta <= 0.0 || m_omega <= 0.0 || c_k1 <= 0.0)
    throw input_error("frame_bounds_1d: arguments must be positive");
  const double x = delta * m_omega;
  FrameBounds out;
  out.upper = std::pow(1.0 + 2.0 * x / pi, 2) * std::exp(x * x);
  const double e = std::pow(c_k1 * x, k + 1);
  if (e >= 1.0) {
    out.lower = 0.0;
    out.lower_positive = false;
  } else {
    out.lower = std::exp(-1.0) * (1.0 - e) * (1.0 - e);
  }
  return out;
}

/// Spatio-temporal (line-by-line) bounds: the temporal factors
/// (1 -+ 2 delta_t m_t / pi)^2 multiply the spatial bounds, which come from
/// the univariate theorem when the spatial variable is one-dimensional
/// (total dimension d = 2, requires c_{k+1}) and from the multivariate
/// theorem for d >= 3.
inline FrameBounds tensor_bounds(int k, int d, double delta_t, double m_omega_t,
                                 double delta_z, double m_omega_z, double b,
                                 double c_k1 = 0.0) {
  if (d < 2) throw input_error("tensor_bounds: d must be >= 2");
  if (delta_t <= 0.0 || m_omega_t <= 0.0)
    throw input_error("tensor_bounds: temporal arguments must be positive");
  const double t = delta_t * m_omega_t;
  FrameBounds spatial;
  if (d == 2) {
    if (c_k1 <= 0.0)
      throw input_error("tensor_bounds: d=2 requires the Wirtinger constant c_{k+1}");
    spatial = frame_bounds_1d(k, delta_z, m_omega_z, c_k1);
  } else {
    spatial = frame_bounds_multi(k, d, delta_z, m_omega_z, b);
  }
  FrameBounds out;
  const double lo_t = 1.0 - 2.0 * t / pi;
  const double hi_t = 1.0 + 2.0 * t / pi;
  out.upper = hi_t * hi_t * spatial.upper;
  if (lo_t <= 0.0 || !spatial.lower_positive) {
    out.lower = 0.0;
    out.lower_positive = false;
  } else {
    out.lower = lo_t * lo_t * spatial.lower;
  }
  return out;
}

/// Largest admissible perturbation: log(1 + sqrt(A/B)) / (m_omega * b).
inline double perturbation_budget(double A, double B, double m_omega, double b) {
  if (!(A > 0.0) || !(B > 0.0) || A > B)
    throw input_error("perturbation_budget: need 0 < A <= B");
  if (m_omega <= 0.0 || b <= 0.0)
    throw input_error("perturbation_budget: m_omega, b must be positive");
  return std::log1p(std::sqrt(A / B)) / (m_omega * b);
}

/// Bounds after perturbing every point by at most eps (in the star norm):
///   A~ = (sqrt(A) - sqrt(B)(e^{m b eps} - 1))^2,  B~ = B e^{2 m b eps}.
inline FrameBounds perturbed_bounds(double A, double B, double m_omega, double b, double eps) {
  if (!(A > 0.0) || !(B > 0.0) || A > B)
    throw input_error("perturbed_bounds: need 0 < A <= B");
  if (eps < 0.0) throw input_error("perturbed_bounds: eps must be >= 0");
  const double x = m_omega * b * eps;
  FrameBounds out;
  out.upper = B * std::exp(2.0 * x);
  const double root = std::sqrt(A) - std::sqrt(B) * std::expm1(x);
  if (root <= 0.0) {
    out.lower = 0.0;
    out.lower_positive = false;
  } else {
    out.lower = root * root;
  }
  return out;
}

/// W(1/e) for the large-k slope of H_k(1); Newton on w e^w = 1/e.
inline double lambert_w_inv_e() {
  const double target = std::exp(-1.0);
  double w = 0.25;
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double step = (w * ew - target) / (ew * (1.0 + w));
    w -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return w;
}

struct SlopeRow {
  int k;
  double h_slope;  // H_k(1)/(k+1)
  double g_slope;  // G_{k,d}(1)/(k+1)
  double c_slope;  // C(k,d)/(k+1)
};

struct SlopeTable {
  std::vector<SlopeRow> rows;
  double h_limit;  // W(1/e)
  double g_limit;  // 1/e
};

/// Slopes of the density constants against k+1, with their limits.
inline SlopeTable asymptotic_slopes(int k_max, int d = 1, int k_step = 10) {
  if (k_max < 50) throw input_error("asymptotic_slopes: k_max must be >= 50");
  SlopeTable out;
  out.h_limit = lambert_w_inv_e();
  out.g_limit = std::exp(-1.0);
  for (int k = 0; k <= k_max; k += k_step) {
    SlopeRow row;
    row.k = k;
    const double hk = inv_h_k(k, 1.0);
    const double gk = inv_g_kd(k, d, 1.0);
    row.h_slope = hk / double(k + 1);
    row.g_slope = gk / double(k + 1);
    row.c_slope = std::max(hk, gk) / double(k + 1);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace nusamp
