#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "nusamp/frame.hpp"

using namespace nusamp;
using Catch::Approx;

TEST_CASE("frame_sum basics") {
  const auto set = jittered_set_1d(1.0, 0.0, {-10.5, 10.5}, 1);
  const auto weights = weights_1d(set, 1);
  TestFunction zero{interval_domain(1.0), {{0.0}}, {0.0}};
  CHECK(frame_sum(zero, set, weights, 1) == 0.0);

  TestFunction f{interval_domain(1.0), {{0.3}, {-2.0}}, {1.0, -0.5}};
  CHECK(frame_sum(f, set, weights, 1) > 0.0);
}

TEST_CASE("Shannon exactness at the Nyquist grid") {
  const auto rep = shannon_exactness(1.0, 20, 8, 11);
  REQUIRE(rep.ratios.size() == 20);
  CHECK(rep.tail_tol <= 0.01);  // documented tolerance stays below 1%
  for (std::size_t i = 0; i < rep.ratios.size(); ++i)
    CHECK(std::abs(rep.ratios[i] - 1.0) <= rep.tails[i]);
  CHECK(rep.pass());
}

TEST_CASE("univariate sandwich at delta*m = 0.3 (k=0)") {
  FrameConfig1D cfg;
  cfg.W = 1.0;
  cfg.k = 0;
  cfg.spacing = 0.58;
  cfg.jitter = 0.01;
  cfg.window_halflength = 4500.0;
  cfg.num_functions = 25;
  cfg.seed = 5;
  const auto rep = verify_frame_1d(cfg);
  CHECK(rep.delta <= 0.31);
  // A matches the Wirtinger-based closed form with c_1 = 2/pi
  const double expect_A =
      std::exp(-1.0) * std::pow(1.0 - (2.0 / pi) * rep.delta, 2);
  CHECK(rep.A_theory == Approx(expect_A).epsilon(1e-12));
  CHECK(rep.pass());
  for (double r : rep.ratios) {
    CHECK(r >= rep.A_theory * (1.0 - rep.tail_tol));
    CHECK(r <= rep.B_theory * (1.0 + rep.tail_tol));
  }
  // at this density the tail budget is far below the lower bound
  CHECK(rep.tail_tol < 0.05);
}

TEST_CASE("univariate sandwich with derivatives (k=1, jittered)") {
  FrameConfig1D cfg;
  cfg.W = 1.0;
  cfg.k = 1;
  cfg.spacing = 2.0;
  cfg.jitter = 0.3;
  cfg.num_functions = 25;
  cfg.seed = 7;
  const auto rep = verify_frame_1d(cfg);
  CHECK(rep.bounds_valid);
  CHECK(rep.pass());
}

TEST_CASE("oversampling limit: ratios within 1% of 1") {
  FrameConfig1D cfg;
  cfg.W = 1.0;
  cfg.k = 0;
  cfg.spacing = 0.1;
  cfg.jitter = 0.0;
  cfg.window_halflength = 2000.0;
  cfg.num_functions = 15;
  cfg.seed = 3;
  const auto rep = verify_frame_1d(cfg);
  CHECK(rep.delta <= 0.05 + 1e-12);
  for (double r : rep.ratios) CHECK(std::abs(r - 1.0) <= 0.01);
}

TEST_CASE("above-bound densities are refused unless exploratory") {
  FrameConfig1D cfg;
  cfg.W = 1.0;
  cfg.k = 0;
  cfg.spacing = 4.0;  // delta m ~ 2 > pi/2
  cfg.num_functions = 3;
  CHECK_THROWS_AS(verify_frame_1d(cfg), input_error);
  cfg.exploratory = true;
  const auto rep = verify_frame_1d(cfg);
  CHECK_FALSE(rep.bounds_valid);
  CHECK(rep.violations.empty());  // exploratory runs carry no verdicts
}

TEST_CASE("scale covariance of the ratios") {
  FrameConfig1D a;
  a.W = 1.0;
  a.k = 1;
  a.spacing = 1.4;
  a.jitter = 0.2;
  a.window_halflength = 120.0;
  a.num_functions = 10;
  a.seed = 21;
  const auto ra = verify_frame_1d(a);
  const double c = 3.0;  // dilate space by c, shrink the band by c
  FrameConfig1D b = a;
  b.W = a.W / c;
  b.spacing = a.spacing * c;
  b.jitter = a.jitter * c;
  b.window_halflength = a.window_halflength * c;
  const auto rb = verify_frame_1d(b);
  REQUIRE(ra.ratios.size() == rb.ratios.size());
  for (std::size_t i = 0; i < ra.ratios.size(); ++i)
    CHECK(rb.ratios[i] == Approx(ra.ratios[i]).epsilon(1e-8));
  CHECK(rb.A_theory == Approx(ra.A_theory).epsilon(1e-9));
  CHECK(rb.delta == Approx(c * ra.delta).epsilon(1e-12));
}

TEST_CASE("empirical min ratio degrades as the density grows") {
  std::vector<double> mins;
  for (double spacing : {0.5, 0.9, 1.3, 1.9, 2.6}) {
    FrameConfig1D cfg;
    cfg.W = 1.0;
    cfg.k = 0;
    cfg.spacing = spacing;
    cfg.jitter = 0.1 * spacing;
    cfg.num_functions = 20;
    cfg.seed = 77;
    cfg.exploratory = spacing > 2.0;  // last point sits above the bound
    mins.push_back(verify_frame_1d(cfg).min_ratio());
  }
  for (std::size_t i = 0; i + 1 < mins.size(); ++i)
    CHECK(mins[i + 1] <= mins[i] + 1e-3);
}

TEST_CASE("box-domain sandwich (d=2)") {
  FrameConfigND cfg;
  cfg.W = 1.0;
  cfg.k = 1;
  cfg.spacing = 0.68;
  cfg.jitter = 0.02;
  cfg.num_functions = 12;
  cfg.kernels_per_function = 6;
  cfg.seed = 9;
  const auto rep = verify_frame_nd(cfg);
  CHECK(rep.bounds_valid);
  CHECK(rep.m_omega == Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(rep.pass());
  // the sandwich holds even with no tail slack at all
  for (double r : rep.ratios) {
    CHECK(r >= rep.A_theory);
    CHECK(r <= rep.B_theory);
  }

  FrameConfigND coarse = cfg;
  coarse.spacing = 1.4;  // delta above C(1,2)/(m b)
  coarse.num_functions = 2;
  CHECK_THROWS_AS(verify_frame_nd(coarse), input_error);
}

TEST_CASE("upper-bound lemmas hold on 1D sets") {
  const Domain dom = interval_domain(1.0);
  // single kernel on a uniform grid: both bounds hold with slack
  const auto grid = jittered_set_1d(1.0, 0.0, {-60.5, 60.5}, 1);
  TestFunction single{dom, {{0.4}}, {1.0}};
  const auto rep = check_upper_lemma(single, grid);
  CHECK(rep.pass);
  CHECK(rep.ratio < rep.bound_ball);
  CHECK(rep.ratio < rep.bound_split);

  // delta -> 0 sends both bound factors to 1 (the split bound like sqrt(delta))
  const auto dense = jittered_set_1d(0.002, 0.0, {-40.001, 40.001}, 1);
  const auto rep2 = check_upper_lemma(single, dense);
  CHECK(rep2.bound_ball == Approx(1.0).margin(0.05));
  CHECK(rep2.bound_split == Approx(1.0).margin(0.25));
  CHECK(rep2.pass);

  // property sweep: 20 random functions on a jittered set, zero violations
  const auto jit = jittered_set_1d(0.8, 0.2, {-80.4, 80.4}, 13);
  for (int i = 0; i < 20; ++i) {
    const auto f = random_test_function(dom, 8, 40.0, 1.0, 1000 + i);
    CHECK(check_upper_lemma(f, jit).pass);
  }
}

TEST_CASE("upper-bound lemmas hold on 2D sets") {
  const Domain dom = box_domain(2, 1.0);
  auto set = jittered_grid_2d(0.5, 0.05, 10.25, 2.0, 4);
  set.grid_resolution = 700;
  for (int i = 0; i < 5; ++i) {
    const auto f = random_test_function(dom, 6, 5.0, 1.0, 50 + i);
    auto wset = set;
    wset.grid_resolution = 400;
    const auto rep = check_upper_lemma(f, wset);
    CHECK(rep.pass);
  }
}

TEST_CASE("perturbation experiment") {
  // epsilon = 0 reproduces the base bounds exactly
  PerturbConfig cfg;
  cfg.W = 1.0;
  cfg.k = 0;
  cfg.spacing = 0.8 * pi;
  cfg.epsilon = 0.0;
  cfg.num_functions = 12;
  cfg.seed = 15;
  const auto rep0 = perturb_experiment(cfg);
  const double c1 = 2.0 / pi;
  const auto base = frame_bounds_1d(0, 0.4 * pi, 1.0, c1);
  CHECK(rep0.frame.A_theory == Approx(base.lower).epsilon(1e-9));
  CHECK(rep0.frame.B_theory == Approx(base.upper).epsilon(1e-9));
  CHECK(rep0.frame.pass());

  // 50% and 90% of the admissible budget
  for (double frac : {0.5, 0.9}) {
    PerturbConfig c2 = cfg;
    c2.epsilon = -1.0;
    c2.epsilon_fraction = frac;
    const auto rep = perturb_experiment(c2);
    CHECK(rep.epsilon == Approx(frac * rep.budget).epsilon(1e-12));
    CHECK(rep.frame.bounds_valid);
    CHECK(rep.frame.pass());
  }

  // beyond the budget: refused with a diagnostic
  PerturbConfig over = cfg;
  over.epsilon = 10.0;
  CHECK_THROWS_AS(perturb_experiment(over), input_error);

  // exact Nyquist grid: A = B = 1 by the orthonormal expansion, admissible
  // eps up to ln 2; run at eps = 0.2
  PerturbConfig nyq;
  nyq.W = 1.0;
  nyq.k = 0;
  nyq.spacing = pi;
  nyq.base_A = 1.0;
  nyq.base_B = 1.0;
  nyq.epsilon = 0.2;
  nyq.num_functions = 12;
  nyq.seed = 23;
  const auto repn = perturb_experiment(nyq);
  CHECK(repn.budget == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(repn.frame.pass());
}
