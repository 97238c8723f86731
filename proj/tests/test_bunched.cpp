#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "nusamp/bunched.hpp"

using namespace nusamp;
using Catch::Approx;

TEST_CASE("divided differences on polynomials") {
  // constant
  const auto c = divided_differences({0.0, 0.5, 1.5, 2.0}, {3.0, 3.0, 3.0, 3.0});
  CHECK(c.coeffs[0] == 3.0);
  for (std::size_t m = 1; m < c.coeffs.size(); ++m)
    CHECK(c.coeffs[m] == Approx(0.0).margin(1e-15));

  // x^2 at {0, 1, 2}: orders (0, 1, 1)
  const auto q = divided_differences({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0});
  CHECK(q.coeffs[0] == Approx(0.0).margin(1e-15));
  CHECK(q.coeffs[1] == Approx(1.0).epsilon(1e-15));
  CHECK(q.coeffs[2] == Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(divided_differences({0.0, 0.0}, {1.0, 2.0}), input_error);
}

TEST_CASE("Newton form equals Lagrange form") {
  Rng rng(404);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> pts, vals;
    for (int i = 0; i < 6; ++i) {
      pts.push_back(double(i) + rng.uniform(-0.3, 0.3));
      vals.push_back(rng.normal());
    }
    const auto table = divided_differences(pts, vals);
    for (int p = 0; p <= 100; ++p) {
      const double x = -1.0 + 7.0 * p / 100.0;
      CHECK(newton_eval(table, x) == Approx(lagrange_eval(pts, vals, x)).margin(1e-9));
    }
  }
}

TEST_CASE("interpolation is a projection (idempotent)") {
  Rng rng(7);
  std::vector<double> pts{0.0, -0.2, 0.13, 0.31};
  std::vector<double> vals{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  const auto p1 = divided_differences(pts, vals);
  // re-interpolate the polynomial at the same nodes
  std::vector<double> vals2(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) vals2[i] = newton_eval(p1, pts[i]);
  const auto p2 = divided_differences(pts, vals2);
  for (double x : {-0.5, 0.05, 0.2, 0.7}) {
    CHECK(newton_eval(p2, x) == Approx(newton_eval(p1, x)).margin(1e-12));
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(vals2[i] == Approx(vals[i]).margin(1e-12));
}

TEST_CASE("bunched density constants") {
  CHECK(bunched_constant(0, 1.0) == Approx(0.5766).margin(5e-5));
  CHECK(bunched_constant(9, 1.0 / 16.0) == Approx(3.6099).margin(5e-5));
  // s = 0: independent of tau
  for (double tau : {1.0, 0.5, 0.25, 0.125, 0.0625})
    CHECK(bunched_constant(0, tau) == Approx(bunched_constant(0, 1.0)).epsilon(1e-10));
  // defect at the constant equals 1
  for (int s : {0, 3, 7}) {
    const double z = bunched_constant(s, 0.5);
    CHECK(bunched_defect(s, 0.5, z, 1.0) == Approx(1.0).margin(1e-9));
  }
  CHECK_THROWS_AS(bunched_constant(-1, 1.0), input_error);
  CHECK_THROWS_AS(bunched_constant(1, 0.0), input_error);
}

TEST_CASE("bunched constant asymptote") {
  for (double tau : {1.0, 0.25, 0.0625}) {
    const double v = bunched_constant(60, tau) * (1.0 + tau) * std::exp(1.0) / 61.0;
    CHECK(v == Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("combined bunched + derivative density margin") {
  // k = 0 reduces to the bunched condition
  for (double delta : {0.3, 0.6, 0.9}) {
    const auto cd = combined_density_check(2, 0, 0.5, delta, 1.0);
    CHECK(cd.margin == Approx(bunched_defect(2, 0.5, delta, 1.0)).epsilon(1e-12));
  }
  // s = 0, tau -> 0: (delta m)^{k+1}/(k+1)! (1 + 4 delta m / pi)
  const auto cd = combined_density_check(0, 3, 1e-12, 0.8, 1.0);
  const double expect = std::pow(0.8, 4) / 24.0 * (1.0 + 4.0 * 0.8 / pi);
  CHECK(cd.margin == Approx(expect).epsilon(1e-9));

  // the margin crosses 1 near (s+1)(k+1)/((1+tau) e m) for large s, k
  const int s = 30, k = 30;
  const double tau = 0.25, m = 1.0;
  double lo = 1.0, hi = 2000.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (combined_density_check(s, k, tau, mid, m).log_margin < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double root = 0.5 * (lo + hi);
  const double asym = double(s + 1) * double(k + 1) / ((1.0 + tau) * std::exp(1.0) * m);
  CHECK(root == Approx(asym).epsilon(0.05));
}

TEST_CASE("fusion frame sum basics") {
  const auto centers = jittered_set_1d(1.0, 0.0, {-20.5, 20.5}, 1);
  const auto set = make_bunched(centers, 2, 0.5);
  TestFunction zero{interval_domain(1.0), {{0.0}}, {0.0}};
  CHECK(fusion_frame_sum(zero, set) == 0.0);

  // interpolation reproduces degree <= s exactly on each cell: feeding
  // polynomial values yields the polynomial's integral
  const auto z = breakpoints(centers);
  const auto& rule = gauss_legendre_cached(4);
  auto poly = [](double x) { return 0.3 - 0.8 * x + 0.1 * x * x; };
  for (std::size_t n : {std::size_t(3), std::size_t(17)}) {
    const auto pts = set.bunch(n);
    std::vector<double> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = poly(pts[i]);
    const auto table = divided_differences(pts, vals);
    const double direct = rule.integrate(
        [&](double x) { return poly(x) * poly(x); }, z[n], z[n + 1]);
    const double interp = rule.integrate(
        [&](double x) {
          const double p = newton_eval(table, x);
          return p * p;
        },
        z[n], z[n + 1]);
    CHECK(interp == Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("interpolation error bound on cells") {
  const auto centers = jittered_set_1d(0.9, 0.05, {-60.75, 60.75}, 3);
  const int s = 3;
  const auto set = make_bunched(centers, s, 0.5);
  const auto f = random_test_function(interval_domain(1.0), 8, 30.0, 1.0, 5);
  const auto z = breakpoints(centers);
  // |f^{(s+1)}| <= m^{s+1} per coefficient mass; use the dense-grid max
  for (std::size_t n = 40; n < 45; ++n) {
    const auto pts = set.bunch(n);
    std::vector<double> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(f, {pts[i]});
    const auto table = divided_differences(pts, vals);
    double max_deriv = 0.0;
    for (int g = 0; g <= 60; ++g) {
      const double x = z[n] + (z[n + 1] - z[n]) * g / 60.0;
      max_deriv = std::max(max_deriv,
                           std::abs(eval_derivatives_1d(f, x, s + 1)[std::size_t(s) + 1]));
    }
    const double bound = max_deriv / factorial(s + 1) *
                         std::pow(1.0 + set.tau, s) * std::pow(set.delta, s + 1);
    for (int g = 0; g <= 30; ++g) {
      const double x = z[n] + (z[n + 1] - z[n]) * g / 30.0;
      CHECK(std::abs(eval(f, {x}) - newton_eval(table, x)) <= bound * (1.0 + 1e-6) + 1e-14);
    }
  }
}

TEST_CASE("divided-difference sum at s=0 is the k=0 frame sum") {
  const auto centers = jittered_set_1d(0.8, 0.15, {-40.4, 40.4}, 11);
  const auto set = make_bunched(centers, 0, 0.5);
  const auto weights = bunched_weights(set);
  const auto f = random_test_function(interval_domain(1.0), 8, 20.0, 1.0, 2);
  const auto dd = divided_diff_frame_sum(f, set, weights);
  const double plain = frame_sum(f, centers, weights_1d(centers, 0), 0);
  CHECK(dd.value == Approx(plain).epsilon(1e-12));
  CHECK_FALSE(dd.confluent_fallback);

  TestFunction zero{interval_domain(1.0), {{0.0}}, {0.0}};
  CHECK(divided_diff_frame_sum(zero, set, weights).value == 0.0);
}

TEST_CASE("bunched harness: fusion and divided-difference sandwiches") {
  BunchedConfig cfg;
  cfg.W = 1.0;
  cfg.s = 1;
  cfg.tau = 1.0;
  cfg.spacing = 1.2;  // delta m = 0.6 < H(1,1) = 0.7218
  cfg.jitter = 0.0;   // tau = 1 requires uniform centers
  cfg.window_halflength = 900.0;
  cfg.num_functions = 15;
  cfg.seed = 4;
  const auto rep = verify_bunched(cfg);
  CHECK(rep.fusion.bounds_valid);
  CHECK(rep.fusion.A_theory ==
        Approx(std::pow(1.0 - bunched_defect(1, 1.0, rep.delta, 1.0), 2)).epsilon(1e-12));
  CHECK(rep.pass());

  BunchedConfig c2;
  c2.W = 1.0;
  c2.s = 2;
  c2.tau = 0.25;
  c2.spacing = 1.9;  // delta m ~ 1.0 < H(2,1/4) = 1.1578
  c2.jitter = 0.1;
  c2.window_halflength = 900.0;
  c2.num_functions = 15;
  c2.seed = 8;
  const auto rep2 = verify_bunched(c2);
  CHECK(rep2.pass());

  // above the bunched bound: refused
  BunchedConfig over = cfg;
  over.spacing = 2.0;
  over.num_functions = 2;
  CHECK_THROWS_AS(verify_bunched(over), input_error);
}

TEST_CASE("tau -> 0 limit of the divided-difference sum") {
  const auto centers = jittered_set_1d(0.6, 0.03, {-300.3, 300.3}, 17);
  const auto f = random_test_function(interval_domain(1.0), 8, 150.0, 1.0, 3);

  // s = 0: no offsets, deviation identically zero
  const auto rep0 = tau_limit_check(f, centers, 0, {0.5, 0.25, 0.125});
  for (double d : rep0.deviations) CHECK(d == 0.0);

  // s = 2, tau halving from 1/4: deviation decreases monotonically
  const auto rep2 = tau_limit_check(f, centers, 2, {0.25, 0.125, 0.0625, 0.03125});
  for (std::size_t i = 0; i + 1 < rep2.deviations.size(); ++i)
    CHECK(rep2.deviations[i + 1] < rep2.deviations[i]);
  CHECK_FALSE(rep2.confluent_fallback);

  // the limit matches the derivative frame sum within 1e-4 at tau = 1e-3
  const auto repl = tau_limit_check(f, centers, 2, {1e-2, 1e-3});
  CHECK(repl.deviations.back() <= 1e-4);

  // widths below the double-precision signal floor switch to the confluent
  // limit and are flagged
  const auto repc = tau_limit_check(f, centers, 4, {1e-3});
  CHECK(repc.confluent_fallback);
  CHECK(repc.deviations.back() <= 1e-6);

  CHECK_THROWS_AS(tau_limit_check(f, centers, 2, {0.1, 0.2}), input_error);
}
