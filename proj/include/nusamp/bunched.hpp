#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nusamp/common.hpp"
#include "nusamp/frame.hpp"
#include "nusamp/kernel.hpp"
#include "nusamp/quadrature.hpp"
#include "nusamp/sampling.hpp"

namespace nusamp {

// Bunched sampling: per center x_{n,0} there are s extra samples inside
// [x_{n,0}-h, x_{n,0}+h].  Interpolating a degree-s polynomial on each bunch
// yields a non-orthogonal fusion frame; weighting the divided differences
// yields an ordinary frame.  Both sums are evaluated here together with the
// explicit density constants.

// ---------------------------------------------------------------------------
// divided differences and interpolation forms

struct DividedDiffTable {
  std::vector<double> points;
  std::vector<double> coeffs;  // diagonal: order-m divided difference
};

inline DividedDiffTable divided_differences(const std::vector<double>& points,
                                            const std::vector<double>& values) {
  if (points.size() != values.size() || points.empty())
    throw input_error("divided_differences: points/values mismatch");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j]) throw input_error("divided_differences: coincident points");
  DividedDiffTable table;
  table.points = points;
  std::vector<double> work = values;
  table.coeffs.resize(points.size());
  table.coeffs[0] = work[0];
  for (std::size_t order = 1; order < points.size(); ++order) {
    for (std::size_t i = 0; i + order < points.size(); ++i)
      work[i] = (work[i + 1] - work[i]) / (points[i + order] - points[i]);
    table.coeffs[order] = work[0];
  }
  return table;
}

/// Newton-form evaluation of the interpolant.
inline double newton_eval(const DividedDiffTable& table, double x) {
  double acc = 0.0;
  for (std::size_t m = table.coeffs.size(); m-- > 0;)
    acc = acc * (x - table.points[m]) + table.coeffs[m];
  return acc;
}

/// Lagrange-form evaluation (independent algebraic route, used as an oracle
/// against the Newton form).
inline double lagrange_eval(const std::vector<double>& points,
                            const std::vector<double>& values, double x) {
  if (points.size() != values.size() || points.empty())
    throw input_error("lagrange_eval: points/values mismatch");
  double acc = 0.0;
  for (std::size_t m = 0; m < points.size(); ++m) {
    double num = 1.0, den = 1.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == m) continue;
      num *= (x - points[j]);
      den *= (points[m] - points[j]);
    }
    acc += values[m] * num / den;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// density constants

/// The bunched density constant: the root z of
///   (1+tau)^s z^{s+1} (1 + 4z/pi) / (s+1)! = 1,
/// solved in log space (monotone), to 1e-10.
inline double bunched_constant(int s, double tau) {
  if (s < 0) throw input_error("bunched_constant: s must be >= 0");
  if (!(tau > 0.0) || tau > 1.0) throw input_error("bunched_constant: tau must lie in (0,1]");
  const double logtau = double(s) * std::log1p(tau);
  const double logfact = log_factorial(s + 1);
  auto logf = [&](double z) {
    return logtau + double(s + 1) * std::log(z) + std::log1p(4.0 * z / pi) - logfact;
  };
  return solve_increasing(logf, 0.0, 1e-12, 1e-8, 1.0);
}

/// E = (1+tau)^s (delta m)^{s+1} (1 + 4 delta m / pi) / (s+1)!; the fusion
/// frame bounds are A = (1-E)^2, B = (1+E)^2 (valid when E < 1).
inline double bunched_defect(int s, double tau, double delta, double m_omega) {
  const double x = delta * m_omega;
  return std::pow(1.0 + tau, s) * std::pow(x, s + 1) * (1.0 + 4.0 * x / pi) /
         factorial(s + 1);
}

inline FrameBounds fusion_bounds(int s, double tau, double delta, double m_omega) {
  const double e = bunched_defect(s, tau, delta, m_omega);
  FrameBounds out;
  out.upper = (1.0 + e) * (1.0 + e);
  if (e >= 1.0) {
    out.lower = 0.0;
    out.lower_positive = false;
  } else {
    out.lower = (1.0 - e) * (1.0 - e);
  }
  return out;
}

/// Bounds of the divided-difference frame:
///   A = e^{-1} (1-E)^2,
///   B = (1 + 2(1+tau) delta m / pi)^2 exp(((1+tau) delta m)^2) / (1+tau)^2.
inline FrameBounds divided_diff_bounds(int s, double tau, double delta, double m_omega) {
  const double e = bunched_defect(s, tau, delta, m_omega);
  const double y = (1.0 + tau) * delta * m_omega;
  FrameBounds out;
  out.upper = std::pow(1.0 + 2.0 * y / pi, 2) * std::exp(y * y) / ((1.0 + tau) * (1.0 + tau));
  if (e >= 1.0) {
    out.lower = 0.0;
    out.lower_positive = false;
  } else {
    out.lower = std::exp(-1.0) * (1.0 - e) * (1.0 - e);
  }
  return out;
}

/// Density margin of the combined bunched + derivative (Hermite) sampling:
///   (1+tau)^{s(k+1)} (delta m)^{(s+1)(k+1)} (1 + 4 delta m/pi) / ((s+1)(k+1))!
/// compared against 1.  Evaluated in log space; admissible iff margin < 1.
struct CombinedDensity {
  bool admissible = false;
  double margin = 0.0;      // the displayed quantity (may overflow to inf)
  double log_margin = 0.0;  // always finite
};

inline CombinedDensity combined_density_check(int s, int k, double tau, double delta,
                                              double m_omega) {
  if (s < 0 || k < 0) throw input_error("combined_density_check: s, k must be >= 0");
  if (!(tau > 0.0) || !(delta > 0.0) || !(m_omega > 0.0))
    throw input_error("combined_density_check: tau, delta, m_omega must be positive");
  const double x = delta * m_omega;
  const double n = double(s + 1) * double(k + 1);
  CombinedDensity out;
  out.log_margin = double(s) * double(k + 1) * std::log1p(tau) + n * std::log(x) +
                   std::log1p(4.0 * x / pi) - std::lgamma(n + 1.0);
  out.margin = std::exp(out.log_margin);
  out.admissible = out.log_margin < 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// frame / fusion-frame sums on bunched sets

/// sum_n int_{V_n} |p_n(f)|^2 dx, each integral by Gauss-Legendre with s+1
/// nodes (exact for the degree-2s integrand).
inline double fusion_frame_sum(const TestFunction& f, const BunchedSet& set) {
  const auto z = breakpoints(set.center_set());
  const int s = set.s();
  const auto& rule = gauss_legendre_cached(s + 1);
  double total = 0.0;
  for (std::size_t n = 0; n < set.centers.size(); ++n) {
    const auto pts = set.bunch(n);
    std::vector<double> values(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) values[i] = eval(f, {pts[i]});
    const auto table = divided_differences(pts, values);
    total += rule.integrate(
        [&](double x) {
          const double p = newton_eval(table, x);
          return p * p;
        },
        z[n], z[n + 1]);
  }
  return total;
}

struct DividedDiffSum {
  double value = 0.0;
  bool confluent_fallback = false;  // h below 1e-5: analytic derivatives used
};

/// True when order-s divided differences over a bunch of width h carry no
/// usable signal in doubles: the Newton scale (W h)^s / s! sits below the
/// roundoff floor that the table's 1/h^s amplification produces.  The 1e-5
/// width floor applies regardless of order.
inline bool divided_diff_degenerate(int s, double W, double h) {
  if (s == 0) return false;
  if (h < 1e-5 / W) return true;
  return std::pow(W * h, s) / factorial(s) < 1e-10;
}

/// sum_n sum_{m<=s} mu_{n,m} |D_{x_{n,0},...,x_{n,m}} f|^2 with the Newton
/// weights mu_{n,m} = m! int_{V_n} N_{n,m}^2.  For degenerate bunch widths
/// the divided differences are replaced by their confluent limit
/// f^{(m)}(x_{n,0})/m! to avoid catastrophic cancellation.
inline DividedDiffSum divided_diff_frame_sum(const TestFunction& f, const BunchedSet& set,
                                             const BunchWeightTable& weights) {
  const int s = set.s();
  DividedDiffSum out;
  const bool confluent = divided_diff_degenerate(s, f.domain.extent, set.h);
  out.confluent_fallback = confluent;
  for (std::size_t n = 0; n < set.centers.size(); ++n) {
    std::vector<double> dd(std::size_t(s) + 1);
    if (confluent) {
      const auto derivs = eval_derivatives_1d(f, set.centers[n], s);
      for (int m = 0; m <= s; ++m) dd[std::size_t(m)] = derivs[std::size_t(m)] / factorial(m);
    } else {
      const auto pts = set.bunch(n);
      std::vector<double> values(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) values[i] = eval(f, {pts[i]});
      dd = divided_differences(pts, values).coeffs;
    }
    for (int m = 0; m <= s; ++m)
      out.value += weights.mu[n][std::size_t(m)] * dd[std::size_t(m)] * dd[std::size_t(m)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// truncation tails (window [-L, L], centers y_j, coefficient masses |c_j|)

/// Fusion sum tail: |p_n(f)| <= |f| + max|f^{(s+1)}| ((1+tau) delta)^{s+1}/(s+1)!
/// on each outside cell, integrated with the same envelope machinery as the
/// derivative tails.
inline double tail_bound_fusion(int s, double tau, double delta, double W, double L,
                                const std::vector<double>& coeffs,
                                const std::vector<double>& centers) {
  const double K = std::pow((1.0 + tau) * delta, s + 1) / factorial(s + 1);
  double ymax = 0.0;
  for (double y : centers) ymax = std::max(ymax, std::abs(y));
  const double Ti = L - 2.0 * delta - ymax;
  if (!(Ti > 0.0)) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (int part = 0; part < 2; ++part) {
    const int l = (part == 0) ? 0 : s + 1;   // |f| part and the error part
    const double factor = (part == 0) ? 1.0 : K;
    const double amp = std::pow(W, l + 1) / pi;
    const double kappa = detail::jl_env_kappa(l, W * Ti);
    for (int side = 0; side < 2; ++side) {
      double sa = 0.0, sa_over_t = 0.0;
      for (std::size_t j = 0; j < coeffs.size(); ++j) {
        const double dist = (side == 0) ? (L - centers[j]) : (L + centers[j]);
        const double a = std::abs(coeffs[j]) * amp * kappa / W;
        sa += a;
        sa_over_t += a / (dist - 2.0 * delta);
      }
      total += 2.0 * factor * factor * sa * sa_over_t;  // (a+b)^2 <= 2a^2+2b^2
    }
  }
  return total;
}

/// Divided-difference sum tail: mu_{n,m} <= m! ((1+tau) delta)^{2m} meas(V_n)
/// and |D_m f| <= max_cell |f^{(m)}|/m!.
inline double tail_bound_divided(int s, double tau, double delta, double W, double L,
                                 const std::vector<double>& coeffs,
                                 const std::vector<double>& centers) {
  double ymax = 0.0;
  for (double y : centers) ymax = std::max(ymax, std::abs(y));
  const double Ti = L - 2.0 * delta - tau * delta - ymax;
  if (!(Ti > 0.0)) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (int m = 0; m <= s; ++m) {
    const double mom = std::pow((1.0 + tau) * delta, 2 * m) / factorial(m);
    const double amp = std::pow(W, m + 1) / pi;
    const double kappa = detail::jl_env_kappa(m, W * Ti);
    for (int side = 0; side < 2; ++side) {
      double sa = 0.0, sa_over_t = 0.0;
      for (std::size_t j = 0; j < coeffs.size(); ++j) {
        const double dist = (side == 0) ? (L - centers[j]) : (L + centers[j]);
        const double a = std::abs(coeffs[j]) * amp * kappa / W;
        sa += a;
        sa_over_t += a / (dist - 2.0 * delta - tau * delta);
      }
      total += mom * sa * sa_over_t;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// harness

struct BunchedConfig {
  double W = 1.0;
  int s = 1;
  double tau = 1.0;
  double spacing = 1.0;
  double jitter = 0.0;
  double window_halflength = 0.0;
  int num_functions = 50;
  int kernels_per_function = 8;
  double coeff_scale = 1.0;
  std::uint64_t seed = 1;
  bool random_offsets = false;
  bool exploratory = false;
};

struct BunchedReport {
  FrameReport fusion;
  FrameReport divided;
  double delta = 0.0;
  double h = 0.0;
  bool pass() const { return fusion.pass() && divided.pass(); }
};

/// Runs the fusion-frame and divided-difference sums on a generated bunched
/// set and checks both against their theoretical bounds.
inline BunchedReport verify_bunched(const BunchedConfig& cfg) {
  if (cfg.s < 0) throw input_error("verify_bunched: s must be >= 0");
  BunchedReport out;
  const double L = detail::aligned_halflength(cfg.window_halflength, cfg.spacing);
  const auto centers = jittered_set_1d(cfg.spacing, cfg.jitter, {-L, L}, cfg.seed);
  const auto set = make_bunched(centers, cfg.s, cfg.tau, cfg.random_offsets, cfg.seed + 1);
  out.delta = set.delta;
  out.h = set.h;
  const double m = cfg.W;
  const double defect = bunched_defect(cfg.s, cfg.tau, set.delta, m);
  const bool valid = defect < 1.0;
  if (!valid && !cfg.exploratory)
    throw input_error("verify_bunched: density above the bunched bound (defect = " +
                      std::to_string(defect) + " >= 1); pass exploratory to probe");

  for (FrameReport* rep : {&out.fusion, &out.divided}) {
    rep->delta = set.delta;
    rep->m_omega = m;
    rep->bounds_valid = valid;
    detail::echo(*rep, "W", cfg.W);
    detail::echo(*rep, "s", cfg.s);
    detail::echo(*rep, "tau", cfg.tau);
    detail::echo(*rep, "spacing", cfg.spacing);
    detail::echo(*rep, "jitter", cfg.jitter);
    detail::echo(*rep, "window_halflength", L);
    detail::echo(*rep, "num_functions", cfg.num_functions);
    detail::echo(*rep, "kernels_per_function", cfg.kernels_per_function);
    detail::echo(*rep, "seed", double(cfg.seed));
    detail::echo(*rep, "delta", set.delta);
    detail::echo(*rep, "h", set.h);
  }
  if (valid) {
    const auto fb = fusion_bounds(cfg.s, cfg.tau, set.delta, m);
    out.fusion.A_theory = fb.lower;
    out.fusion.B_theory = fb.upper;
    const auto db = divided_diff_bounds(cfg.s, cfg.tau, set.delta, m);
    out.divided.A_theory = db.lower;
    out.divided.B_theory = db.upper;
  }

  const auto weights = bunched_weights(set);
  const Domain dom = interval_domain(cfg.W);
  for (int i = 0; i < cfg.num_functions; ++i) {
    const auto f = random_test_function(dom, cfg.kernels_per_function, L / 2.0,
                                        cfg.coeff_scale, detail::fn_seed(cfg.seed, i));
    const double n2 = norm_squared(f);
    if (n2 <= 0.0) continue;
    std::vector<double> ys;
    for (const auto& y : f.centers) ys.push_back(y[0]);
    out.fusion.ratios.push_back(fusion_frame_sum(f, set) / n2);
    out.fusion.tails.push_back(
        tail_bound_fusion(cfg.s, cfg.tau, set.delta, cfg.W, L, f.coeffs, ys) / n2);
    out.divided.ratios.push_back(divided_diff_frame_sum(f, set, weights).value / n2);
    out.divided.tails.push_back(
        tail_bound_divided(cfg.s, cfg.tau, set.delta, cfg.W, L, f.coeffs, ys) / n2);
  }
  detail::verdicts(out.fusion);
  detail::verdicts(out.divided);
  return out;
}

// ---------------------------------------------------------------------------
// tau -> 0 limit of the divided-difference sum

struct TauLimitReport {
  std::vector<double> taus;
  std::vector<double> sums;        // divided-difference frame sums
  std::vector<double> deviations;  // |sum - limit| / max(limit, tiny)
  double limit = 0.0;              // derivative frame sum with moment weights
  bool confluent_fallback = false;
};

/// As tau -> 0 the divided-difference frame sum converges to the derivative
/// frame sum sum_n sum_{m<=s} (1/m!) int_{V_n} (x-x_{n,0})^{2m} dx
/// |f^{(m)}(x_{n,0})|^2 (the weights_1d table at order s).
inline TauLimitReport tau_limit_check(const TestFunction& f, const SamplingSet1D& centers,
                                      int s, const std::vector<double>& tau_sequence) {
  for (std::size_t i = 0; i + 1 < tau_sequence.size(); ++i)
    if (!(tau_sequence[i] > tau_sequence[i + 1]))
      throw input_error("tau_limit_check: tau sequence must decrease");
  TauLimitReport rep;
  rep.limit = frame_sum(f, centers, weights_1d(centers, s), s);
  for (double tau : tau_sequence) {
    const auto set = make_bunched(centers, s, tau);
    const auto weights = bunched_weights(set);
    const auto sum = divided_diff_frame_sum(f, set, weights);
    rep.confluent_fallback = rep.confluent_fallback || sum.confluent_fallback;
    rep.taus.push_back(tau);
    rep.sums.push_back(sum.value);
    rep.deviations.push_back(std::abs(sum.value - rep.limit) /
                             std::max(rep.limit, 1e-300));
  }
  return rep;
}

}  // namespace nusamp
