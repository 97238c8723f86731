#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nusamp/constants.hpp"
#include "nusamp/kernel.hpp"
#include "nusamp/sampling.hpp"
#include "nusamp/wirtinger.hpp"

namespace nusamp {

// Evaluates the weighted derivative frame sums on concrete finite sampling
// sets and compares them against the theoretical bounds.  The theorems speak
// about bi-infinite sets; here everything outside the window is budgeted by
// an explicit envelope-based tail bound (see tail_bound_1d / tail_bound_box).

// ---------------------------------------------------------------------------
// frame sums

/// sum_n sum_{l<=k} mu[n][l] |f^(l)(x_n)|^2 over explicit 1D positions.
inline double frame_sum(const TestFunction& f, const std::vector<double>& positions,
                        const WeightTable1D& weights, int k) {
  if (positions.size() != weights.mu.size())
    throw input_error("frame_sum: positions/weights mismatch");
  if (weights.k < k) throw input_error("frame_sum: weight table is too short");
  double total = 0.0;
  for (std::size_t n = 0; n < positions.size(); ++n) {
    const auto derivs = eval_derivatives_1d(f, positions[n], k);
    for (int l = 0; l <= k; ++l)
      total += weights.mu[n][std::size_t(l)] * derivs[std::size_t(l)] * derivs[std::size_t(l)];
  }
  return total;
}

inline double frame_sum(const TestFunction& f, const SamplingSet1D& set,
                        const WeightTable1D& weights, int k) {
  return frame_sum(f, set.points, weights, k);
}

/// sum_n sum_{|alpha|<=k} mu[n][alpha] |D^alpha f(x_n)|^2.
inline double frame_sum(const TestFunction& f, const SamplingSetND& set,
                        const WeightTableND& weights, int k) {
  if (set.points.size() != weights.mu.size())
    throw input_error("frame_sum: set/weights mismatch");
  if (weights.k < k) throw input_error("frame_sum: weight table is too short");
  const auto alphas = multi_indices_upto(set.window.dim(), k);
  double total = 0.0;
  for (std::size_t n = 0; n < set.points.size(); ++n) {
    const auto derivs = eval_derivatives_at(f, set.points[n], k);
    for (std::size_t a = 0; a < alphas.size(); ++a)
      total += weights.mu[n][a] * derivs[a] * derivs[a];
  }
  return total;
}

// ---------------------------------------------------------------------------
// truncation tails

namespace detail {

/// Non-increasing envelope B_l(u) >= |J_l(u)| = |int_0^1 t^l e^{iut} dt|:
/// B_0 = min(1, 2/u), B_l = min(1/(l+1), (1 + l B_{l-1})/u).
inline double jl_env(int l, double u) {
  double b = std::min(1.0, 2.0 / u);
  for (int m = 1; m <= l; ++m) b = std::min(1.0 / double(m + 1), (1.0 + m * b) / u);
  return b;
}

/// kappa with u * B_l(u) <= kappa for all u >= u0.
inline double jl_env_kappa(int l, double u0) {
  if (l == 0) return 2.0;
  return 1.0 + l * jl_env(l - 1, u0);
}

/// int_0^inf B_m(v)^2 dv (trapezoid plus analytic 1/v tail).
inline double jl_env_sq_integral(int m) {
  static std::vector<double> cache(max_deriv_order + 1, -1.0);
  if (cache[std::size_t(m)] >= 0.0) return cache[std::size_t(m)];
  const double V = 400.0, dv = 0.02;
  double acc = 0.0;
  double prev = jl_env(m, 1e-9);
  for (double v = dv; v <= V; v += dv) {
    const double cur = jl_env(m, v);
    acc += 0.5 * dv * (prev * prev + cur * cur);
    prev = cur;
  }
  acc += jl_env_kappa(m, V) * jl_env_kappa(m, V) / V;
  cache[std::size_t(m)] = acc;
  return acc;
}

}  // namespace detail

/// Tail of the 1D derivative frame sum outside the window [-L, L] for
/// f = sum_j c_j Phi(. - y_j).  Uses |Phi^(l)(x)| <= (W^{l+1}/pi) B_l(W|x|),
/// mu_{n,l} <= (delta^{2l}/l!) mu_{n,0}, and the fact that the outside cells
/// tile the complement (starting at most 2 delta inside the edge), so the
/// point sum is bounded by an integral of the envelope plus one edge point.
/// Absolute bound; divide by ||f||^2 for the ratio.
inline double tail_bound_1d(int k, double delta, double W, double L,
                            const std::vector<double>& coeffs,
                            const std::vector<double>& centers) {
  if (coeffs.size() != centers.size()) throw input_error("tail_bound_1d: size mismatch");
  double ymax = 0.0;
  for (double y : centers) ymax = std::max(ymax, std::abs(y));
  const double Ti = L - 2.0 * delta - ymax;
  if (!(Ti > 0.0)) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (int l = 0; l <= k; ++l) {
    const double mom = std::pow(delta, 2 * l) / factorial(l);  // mu_{n,l}/mu_{n,0} bound
    const double mu_edge = 2.0 * delta * mom;                  // largest single weight
    const double amp = std::pow(W, l + 1) / pi;
    const double kappa = detail::jl_env_kappa(l, W * Ti);
    for (int side = 0; side < 2; ++side) {
      double edge = 0.0;    // sum_j |c_j| B_l at the nearest outside point
      double sa = 0.0;      // Cauchy-Schwarz pieces for the integrated bulk
      double sa_over_t = 0.0;
      for (std::size_t j = 0; j < coeffs.size(); ++j) {
        const double dist = (side == 0) ? (L - centers[j]) : (L + centers[j]);
        edge += std::abs(coeffs[j]) * amp * detail::jl_env(l, W * dist);
        const double a = std::abs(coeffs[j]) * amp * kappa / W;
        sa += a;
        sa_over_t += a / (dist - 2.0 * delta);
      }
      total += mu_edge * edge * edge + mom * sa * sa_over_t;
    }
  }
  return total;
}

/// Same bound for a box window [-L, L]^2 (four half-strips; corners are
/// counted twice, which only loosens the bound).  Y = max center coordinate,
/// b_norm the star-norm equivalence constant.  Outside cells tile the strips,
/// so the point sums become envelope integrals (cells reach at most 2 b delta
/// inward); one extra edge line of points is budgeted separately.
inline double tail_bound_box2(int k, double delta, double b_norm, double W, double L,
                              double Y, double C1) {
  const double r2 = b_norm * delta;  // Euclidean radius bound of a Voronoi cell
  const double Ti = L - Y - 2.0 * r2;
  if (!(Ti > 0.0)) return std::numeric_limits<double>::infinity();
  const auto alphas = multi_indices_upto(2, k);
  double total = 0.0;
  for (const auto& alpha : alphas) {
    const int a0 = alpha[0], a1 = alpha[1];
    const double mom = std::pow(r2, 2 * (a0 + a1)) / (factorial(a0) * factorial(a1));
    // two strips orthogonal to each axis; `m` decays along the strip normal
    // (envelope integrated from Ti, which absorbs the inward cell reach),
    // `c` is integrated across the strip
    for (int axis = 0; axis < 2; ++axis) {
      const int m = (axis == 0) ? a0 : a1;
      const int c = (axis == 0) ? a1 : a0;
      const double amp_m = std::pow(W, m + 1) / pi;
      const double amp_c = std::pow(W, c + 1) / pi;
      const double cross = amp_c * amp_c *
                           (2.0 * (Y + 2.0 * r2) / ((c + 1.0) * (c + 1.0)) +
                            2.0 / W * detail::jl_env_sq_integral(c));
      const double kappa = detail::jl_env_kappa(m, W * Ti);
      const double decay_int = kappa * kappa / (W * W * Ti);
      total += C1 * C1 * 2.0 * mom * cross * amp_m * amp_m * decay_int;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// reports

struct FrameReport {
  std::vector<std::pair<std::string, std::string>> config;  // resolved config echo
  double delta = 0.0;
  double m_omega = 0.0;
  double b_norm = 1.0;
  double A_theory = 0.0;
  double B_theory = 0.0;
  bool bounds_valid = true;   // false on exploratory above-bound runs
  double tail_tol = 0.0;      // max_f tail_f / (A ||f||^2)
  std::vector<double> ratios;
  std::vector<double> tails;  // per-function tail / ||f||^2
  std::vector<int> violations;
  std::string replay;         // serialized worst offender, empty when passing

  bool pass() const { return bounds_valid && violations.empty(); }
  double min_ratio() const {
    double m = std::numeric_limits<double>::infinity();
    for (double r : ratios) m = std::min(m, r);
    return m;
  }
  double max_ratio() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double r : ratios) m = std::max(m, r);
    return m;
  }
};

namespace detail {

inline std::uint64_t fn_seed(std::uint64_t base, int i) {
  return base ^ (0x9E3779B97F4A7C15ull * std::uint64_t(i + 1));
}

inline double coeff_mass(const TestFunction& f) {
  double c1 = 0.0;
  for (double c : f.coeffs) c1 += std::abs(c);
  return c1;
}

inline void echo(FrameReport& rep, const std::string& key, double value) {
  std::ostringstream os;
  os.precision(12);
  os << value;
  rep.config.emplace_back(key, os.str());
}

inline void verdicts(FrameReport& rep) {
  rep.violations.clear();
  if (!rep.bounds_valid) return;
  double tol = 0.0;
  for (double t : rep.tails) tol = std::max(tol, t / rep.A_theory);
  rep.tail_tol = tol;
  for (std::size_t i = 0; i < rep.ratios.size(); ++i) {
    const bool lo = rep.ratios[i] >= rep.A_theory * (1.0 - tol);
    const bool hi = rep.ratios[i] <= rep.B_theory * (1.0 + tol);
    if (!lo || !hi) rep.violations.push_back(int(i));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// univariate verification

struct FrameConfig1D {
  double W = 1.0;        // interval frequency domain [-W, W]
  int k = 0;             // derivatives sampled
  double spacing = 1.0;  // jittered grid parameters
  double jitter = 0.0;
  double window_halflength = 0.0;  // 0 = choose automatically (grid aligned)
  int num_functions = 50;
  int kernels_per_function = 8;
  double coeff_scale = 1.0;
  std::uint64_t seed = 1;
  bool exploratory = false;  // allow delta above the density bound
};

namespace detail {

inline double aligned_halflength(double requested, double spacing) {
  const double want = (requested > 0.0) ? requested : std::max(3500.0, 60.0 * spacing);
  const double m = std::ceil(want / spacing - 0.5);
  return (m + 0.5) * spacing;
}

}  // namespace detail

/// Runs N random test functions against the univariate derivative theorem.
inline FrameReport verify_frame_1d(const FrameConfig1D& cfg) {
  if (cfg.k < 0 || cfg.k > 11) throw input_error("verify_frame_1d: k out of range");
  FrameReport rep;
  const double L = detail::aligned_halflength(cfg.window_halflength, cfg.spacing);
  const auto set = jittered_set_1d(cfg.spacing, cfg.jitter, {-L, L}, cfg.seed);
  rep.delta = density_1d(set);
  rep.m_omega = cfg.W;
  rep.b_norm = 1.0;
  const double c_k1 = wirtinger_constant_cached(cfg.k + 1).c;

  detail::echo(rep, "W", cfg.W);
  detail::echo(rep, "k", cfg.k);
  detail::echo(rep, "spacing", cfg.spacing);
  detail::echo(rep, "jitter", cfg.jitter);
  detail::echo(rep, "window_halflength", L);
  detail::echo(rep, "num_functions", cfg.num_functions);
  detail::echo(rep, "kernels_per_function", cfg.kernels_per_function);
  detail::echo(rep, "coeff_scale", cfg.coeff_scale);
  detail::echo(rep, "seed", double(cfg.seed));
  detail::echo(rep, "delta", rep.delta);
  detail::echo(rep, "c_k1", c_k1);

  const double margin = c_k1 * rep.delta * rep.m_omega;
  if (margin >= 1.0) {
    if (!cfg.exploratory)
      throw input_error(
          "verify_frame_1d: density above the sufficient bound "
          "(c_{k+1} * delta * m_omega = " + std::to_string(margin) +
          " >= 1); the theorem gives no guarantee here. Pass exploratory "
          "to probe anyway (no verdicts).");
    rep.bounds_valid = false;
  } else {
    const auto fb = frame_bounds_1d(cfg.k, rep.delta, rep.m_omega, c_k1);
    rep.A_theory = fb.lower;
    rep.B_theory = fb.upper;
  }

  const auto weights = weights_1d(set, cfg.k);
  const Domain dom = interval_domain(cfg.W);
  int worst = -1;
  double worst_excess = 0.0;
  for (int i = 0; i < cfg.num_functions; ++i) {
    const auto f = random_test_function(dom, cfg.kernels_per_function, L / 2.0,
                                        cfg.coeff_scale, detail::fn_seed(cfg.seed, i));
    const double n2 = norm_squared(f);
    if (n2 <= 0.0) continue;
    const double ratio = frame_sum(f, set, weights, cfg.k) / n2;
    std::vector<double> ys;
    for (const auto& y : f.centers) ys.push_back(y[0]);
    const double tail = tail_bound_1d(cfg.k, rep.delta, cfg.W, L, f.coeffs, ys) / n2;
    rep.ratios.push_back(ratio);
    rep.tails.push_back(tail);
    if (rep.bounds_valid) {
      const double excess = std::max(rep.A_theory - ratio, ratio - rep.B_theory);
      if (worst < 0 || excess > worst_excess) {
        worst = i;
        worst_excess = excess;
      }
    }
  }
  detail::verdicts(rep);
  if (!rep.violations.empty() && worst >= 0) {
    std::ostringstream os;
    const auto f = random_test_function(dom, cfg.kernels_per_function, L / 2.0,
                                        cfg.coeff_scale, detail::fn_seed(cfg.seed, worst));
    write_test_function(os, f);
    os << "---- sampling set\n";
    write_points(os, set);
    rep.replay = os.str();
  }
  return rep;
}

// ---------------------------------------------------------------------------
// multivariate (box, d = 2) verification

struct FrameConfigND {
  double W = 1.0;  // box frequency domain [-W, W]^d
  int d = 2;
  int k = 0;
  double spacing = 0.5;
  double jitter = 0.0;
  double window_halflength = 0.0;
  double star_q = 2.0;  // density norm
  int weight_resolution = 420;
  int density_resolution = 1200;
  int num_functions = 50;
  int kernels_per_function = 8;
  double coeff_scale = 1.0;
  std::uint64_t seed = 1;
  bool exploratory = false;
};

/// |x|_2 <= b |x|_q with the optimal b for the l^q norm in dimension d.
inline double norm_equivalence_b(int d, double q) {
  if (q < 1.0) throw input_error("norm_equivalence_b: q must be >= 1");
  if (q <= 2.0) return 1.0;
  if (std::isinf(q)) return std::sqrt(double(d));
  return std::pow(double(d), 0.5 - 1.0 / q);
}

/// Jittered grid in the plane over an aligned square window.
inline SamplingSetND jittered_grid_2d(double spacing, double jitter, double L,
                                      double star_q, std::uint64_t seed) {
  if (jitter < 0.0 || jitter >= 0.5 * spacing)
    throw input_error("jittered_grid_2d: jitter must lie in [0, spacing/2)");
  SamplingSetND set;
  set.window.lo = {-L, -L};
  set.window.hi = {L, L};
  set.star_q = star_q;
  Rng rng(seed);
  const long n_hi = long(std::floor((L - jitter) / spacing + 1e-12));
  for (long i = -n_hi; i <= n_hi; ++i)
    for (long j = -n_hi; j <= n_hi; ++j)
      set.points.push_back({double(i) * spacing + (jitter > 0 ? rng.uniform(-jitter, jitter) : 0.0),
                            double(j) * spacing + (jitter > 0 ? rng.uniform(-jitter, jitter) : 0.0)});
  return set;
}

inline FrameReport verify_frame_nd(const FrameConfigND& cfg) {
  if (cfg.d != 2) throw capability_error("verify_frame_nd: the harness runs d = 2 boxes");
  if (cfg.k < 0) throw input_error("verify_frame_nd: k must be >= 0");
  FrameReport rep;
  const double want =
      cfg.window_halflength > 0 ? cfg.window_halflength : std::max(12.0, 18.0 * cfg.spacing);
  const double L = detail::aligned_halflength(want, cfg.spacing);
  auto set = jittered_grid_2d(cfg.spacing, cfg.jitter, L, cfg.star_q, cfg.seed);
  set.grid_resolution = cfg.density_resolution;
  const auto dens = density_nd(set);
  rep.delta = dens.value + dens.uncertainty;  // conservative on both bounds
  const Domain dom = box_domain(2, cfg.W);
  rep.m_omega = dom.m_omega();
  rep.b_norm = norm_equivalence_b(2, cfg.star_q);

  detail::echo(rep, "W", cfg.W);
  detail::echo(rep, "d", cfg.d);
  detail::echo(rep, "k", cfg.k);
  detail::echo(rep, "spacing", cfg.spacing);
  detail::echo(rep, "jitter", cfg.jitter);
  detail::echo(rep, "window_halflength", L);
  detail::echo(rep, "star_q", cfg.star_q);
  detail::echo(rep, "weight_resolution", cfg.weight_resolution);
  detail::echo(rep, "density_resolution", cfg.density_resolution);
  detail::echo(rep, "num_functions", cfg.num_functions);
  detail::echo(rep, "kernels_per_function", cfg.kernels_per_function);
  detail::echo(rep, "seed", double(cfg.seed));
  detail::echo(rep, "delta", rep.delta);
  detail::echo(rep, "delta_uncertainty", dens.uncertainty);

  const double x = rep.m_omega * rep.b_norm * rep.delta;
  const double c_kd = density_constant(cfg.k, cfg.d).value;
  if (x >= c_kd) {
    if (!cfg.exploratory)
      throw input_error(
          "verify_frame_nd: density above the sufficient bound (m b delta = " +
          std::to_string(x) + " >= C(k,d) = " + std::to_string(c_kd) +
          "); pass exploratory to probe anyway.");
    rep.bounds_valid = false;
  } else {
    const auto fb = frame_bounds_multi(cfg.k, cfg.d, rep.delta, rep.m_omega, rep.b_norm);
    rep.A_theory = fb.lower;
    rep.B_theory = fb.upper;
  }

  set.grid_resolution = cfg.weight_resolution;
  const auto weights = weights_nd(set, cfg.k);
  for (int i = 0; i < cfg.num_functions; ++i) {
    const auto f = random_test_function(dom, cfg.kernels_per_function, L / 2.0,
                                        cfg.coeff_scale, detail::fn_seed(cfg.seed, i));
    const double n2 = norm_squared(f);
    if (n2 <= 0.0) continue;
    const double ratio = frame_sum(f, set, weights, cfg.k) / n2;
    double ymax = 0.0;
    for (const auto& y : f.centers)
      ymax = std::max({ymax, std::abs(y[0]), std::abs(y[1])});
    const double tail = tail_bound_box2(cfg.k, rep.delta, rep.b_norm, cfg.W, L, ymax,
                                        detail::coeff_mass(f)) / n2;
    rep.ratios.push_back(ratio);
    rep.tails.push_back(tail);
  }
  detail::verdicts(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Shannon exactness (uniform Nyquist grid, k = 0)

/// At the Nyquist spacing pi/W the weighted sample sum is exactly ||f||^2
/// (orthonormal sinc expansion), so the computed ratios must equal 1 within
/// the documented tail tolerance.
inline FrameReport shannon_exactness(double W, int num_functions, int kernels,
                                     std::uint64_t seed, double window_halflength = 0.0) {
  FrameReport rep;
  const double spacing = pi / W;
  const double L = detail::aligned_halflength(
      window_halflength > 0 ? window_halflength : 1500.0 * spacing, spacing);
  const auto set = jittered_set_1d(spacing, 0.0, {-L, L}, seed);
  rep.delta = density_1d(set);
  rep.m_omega = W;
  rep.A_theory = 1.0;
  rep.B_theory = 1.0;
  detail::echo(rep, "W", W);
  detail::echo(rep, "spacing", spacing);
  detail::echo(rep, "window_halflength", L);
  detail::echo(rep, "num_functions", num_functions);
  detail::echo(rep, "kernels_per_function", kernels);
  detail::echo(rep, "seed", double(seed));
  const auto weights = weights_1d(set, 0);
  const Domain dom = interval_domain(W);
  for (int i = 0; i < num_functions; ++i) {
    const auto f =
        random_test_function(dom, kernels, L / 2.0, 1.0, detail::fn_seed(seed, i));
    const double n2 = norm_squared(f);
    if (n2 <= 0.0) continue;
    std::vector<double> ys;
    for (const auto& y : f.centers) ys.push_back(y[0]);
    rep.ratios.push_back(frame_sum(f, set, weights, 0) / n2);
    rep.tails.push_back(tail_bound_1d(0, rep.delta, W, L, f.coeffs, ys) / n2);
  }
  rep.tail_tol = 0.0;
  for (std::size_t i = 0; i < rep.ratios.size(); ++i) {
    rep.tail_tol = std::max(rep.tail_tol, rep.tails[i]);
    if (std::abs(rep.ratios[i] - 1.0) > rep.tails[i]) rep.violations.push_back(int(i));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// upper-bound lemmas (k = 0 cell-measure weights)

struct UpperLemmaReport {
  double ratio = 0.0;        // sum / ||f||^2
  double bound_ball = 0.0;   // exp(2 b delta r)
  double bound_split = 0.0;  // (1+2 sigma*)^d exp(2 b delta m / sigma*)
  bool pass = false;
};

inline UpperLemmaReport check_upper_lemma(const TestFunction& f, const SamplingSet1D& set) {
  const double delta = density_1d(set);
  const double n2 = norm_squared(f);
  const auto weights = weights_1d(set, 0);
  UpperLemmaReport rep;
  rep.ratio = frame_sum(f, set, weights, 0) / n2;
  const double W = f.domain.extent;  // interval: r = m_omega = W, b = 1
  rep.bound_ball = std::exp(2.0 * delta * W);
  const double s = sigma_star(1, delta * W);
  rep.bound_split = (1.0 + 2.0 * s) * std::exp(2.0 * delta * W / s);
  rep.pass = rep.ratio <= std::min(rep.bound_ball, rep.bound_split) * (1.0 + 1e-12);
  return rep;
}

inline UpperLemmaReport check_upper_lemma(const TestFunction& f, const SamplingSetND& set) {
  const auto dens = density_nd(set);
  const double delta = dens.value + dens.uncertainty;
  const double n2 = norm_squared(f);
  const auto weights = weights_nd(set, 0);
  UpperLemmaReport rep;
  rep.ratio = frame_sum(f, set, weights, 0) / n2;
  const int d = set.window.dim();
  const double b = norm_equivalence_b(d, set.star_q);
  const double r = f.domain.enclosing_radius();
  const double m = f.domain.m_omega();
  rep.bound_ball = std::exp(2.0 * b * delta * r);
  const double s = sigma_star(d, b * delta * m);
  rep.bound_split = std::pow(1.0 + 2.0 * s, d) * std::exp(2.0 * b * delta * m / s);
  rep.pass = rep.ratio <= std::min(rep.bound_ball, rep.bound_split) * (1.0 + 1e-12);
  return rep;
}

// ---------------------------------------------------------------------------
// perturbation experiment

struct PerturbConfig {
  double W = 1.0;
  int k = 0;
  double spacing = 1.0;   // base uniform grid
  double epsilon = 0.0;   // absolute perturbation radius; used if >= 0
  double epsilon_fraction = -1.0;  // fraction of the admissible budget, if >= 0
  double window_halflength = 0.0;
  int num_functions = 50;
  int kernels_per_function = 8;
  double coeff_scale = 1.0;
  std::uint64_t seed = 1;
  // optional externally-known base bounds (e.g. A = B = 1 for the exact
  // Nyquist grid); when <= 0 the univariate theorem supplies them
  double base_A = -1.0;
  double base_B = -1.0;
};

struct PerturbReport {
  FrameReport frame;      // ratios vs the perturbed bounds
  double base_A = 0.0, base_B = 0.0;
  double epsilon = 0.0;
  double budget = 0.0;    // admissible perturbation bound
};

/// Perturbs every point of the base uniform grid by an independent uniform
/// displacement of size <= epsilon and verifies the definite bounds
/// A~ = (sqrt A - sqrt B (e^{m eps} - 1))^2 and B~ = B e^{2 m eps}.
/// Weights stay those of the base set.
inline PerturbReport perturb_experiment(const PerturbConfig& cfg) {
  if (cfg.k < 0 || cfg.k > 11) throw input_error("perturb_experiment: k out of range");
  PerturbReport out;
  FrameReport& rep = out.frame;
  const double L = detail::aligned_halflength(cfg.window_halflength, cfg.spacing);
  const auto base = jittered_set_1d(cfg.spacing, 0.0, {-L, L}, cfg.seed);
  rep.delta = density_1d(base);
  rep.m_omega = cfg.W;

  if (cfg.base_A > 0.0 && cfg.base_B > 0.0) {
    out.base_A = cfg.base_A;
    out.base_B = cfg.base_B;
  } else {
    const double c_k1 = wirtinger_constant_cached(cfg.k + 1).c;
    if (c_k1 * rep.delta * cfg.W >= 1.0)
      throw input_error(
          "perturb_experiment: base grid density exceeds the univariate bound; "
          "supply explicit base_A/base_B for externally-known frames");
    const auto fb = frame_bounds_1d(cfg.k, rep.delta, cfg.W, c_k1);
    out.base_A = fb.lower;
    out.base_B = fb.upper;
  }
  out.budget = perturbation_budget(out.base_A, out.base_B, cfg.W, 1.0);
  out.epsilon = (cfg.epsilon_fraction >= 0.0) ? cfg.epsilon_fraction * out.budget
                                              : cfg.epsilon;
  if (out.epsilon < 0.0) throw input_error("perturb_experiment: negative epsilon");
  if (out.epsilon >= out.budget && out.epsilon > 0.0)
    throw input_error("perturb_experiment: epsilon = " + std::to_string(out.epsilon) +
                      " exceeds the admissible bound " + std::to_string(out.budget));

  detail::echo(rep, "W", cfg.W);
  detail::echo(rep, "k", cfg.k);
  detail::echo(rep, "spacing", cfg.spacing);
  detail::echo(rep, "window_halflength", L);
  detail::echo(rep, "num_functions", cfg.num_functions);
  detail::echo(rep, "seed", double(cfg.seed));
  detail::echo(rep, "base_A", out.base_A);
  detail::echo(rep, "base_B", out.base_B);
  detail::echo(rep, "epsilon", out.epsilon);
  detail::echo(rep, "budget", out.budget);

  const auto pb = perturbed_bounds(out.base_A, out.base_B, cfg.W, 1.0, out.epsilon);
  rep.A_theory = pb.lower;
  rep.B_theory = pb.upper;
  rep.bounds_valid = pb.lower_positive;

  // perturbed positions, base weights
  Rng rng(cfg.seed ^ 0xABCDEF0123456789ull);
  std::vector<double> positions = base.points;
  if (out.epsilon > 0.0)
    for (auto& x : positions) x += rng.uniform(-out.epsilon, out.epsilon);
  const auto weights = weights_1d(base, cfg.k);

  const Domain dom = interval_domain(cfg.W);
  for (int i = 0; i < cfg.num_functions; ++i) {
    const auto f = random_test_function(dom, cfg.kernels_per_function, L / 2.0,
                                        cfg.coeff_scale, detail::fn_seed(cfg.seed, i));
    const double n2 = norm_squared(f);
    if (n2 <= 0.0) continue;
    const double ratio = frame_sum(f, positions, weights, cfg.k) / n2;
    std::vector<double> ys;
    for (const auto& y : f.centers) ys.push_back(y[0]);
    const double tail = tail_bound_1d(cfg.k, rep.delta + out.epsilon, cfg.W,
                                      L - out.epsilon, f.coeffs, ys) / n2;
    rep.ratios.push_back(ratio);
    rep.tails.push_back(tail);
  }
  detail::verdicts(rep);
  return out;
}

}  // namespace nusamp
