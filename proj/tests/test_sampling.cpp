#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <sstream>

#include "nusamp/sampling.hpp"

using namespace nusamp;
using Catch::Approx;

TEST_CASE("density_1d on simple sets") {
  SamplingSet1D grid;
  grid.window = {-10.0, 10.0};
  for (int n = -10; n <= 10; ++n) grid.points.push_back(n);
  CHECK(density_1d(grid) == Approx(0.5).epsilon(1e-15));

  SamplingSet1D three{{0.0, 1.0, 3.0}, {0.0, 3.0}};
  CHECK(density_1d(three) == Approx(1.0).epsilon(1e-15));

  SamplingSet1D empty{{}, {0.0, 1.0}};
  CHECK_THROWS_AS(density_1d(empty), input_error);
}

TEST_CASE("density_1d vs dense-scan oracle") {
  SamplingSet1D set;
  set.window = {-20.0, 20.0};
  for (int n = -19; n <= 19; ++n) set.points.push_back(n + 0.3 * std::sin(double(n)));
  const double delta = density_1d(set);
  double scan = 0.0;
  const int N = 1000000;
  for (int i = 0; i <= N; ++i) {
    const double x = set.window.lo + set.window.length() * i / N;
    double best = 1e300;
    for (double p : set.points) best = std::min(best, std::abs(x - p));
    scan = std::max(scan, best);
  }
  CHECK(delta == Approx(scan).margin(1e-5));
}

TEST_CASE("jittered sets") {
  const Window1D w{-30.0, 30.0};
  const auto uniform = jittered_set_1d(1.5, 0.0, w, 1);
  CHECK(density_1d(uniform) == Approx(0.75).epsilon(1e-12));

  const auto a = jittered_set_1d(1.0, 0.3, w, 42);
  const auto b = jittered_set_1d(1.0, 0.3, w, 42);
  CHECK(a.points == b.points);  // determinism
  const auto c = jittered_set_1d(1.0, 0.3, w, 43);
  CHECK(a.points != c.points);

  // with a grid-aligned window (edges mid-gap) the clipped set inherits the
  // density bound of the bi-infinite jittered grid
  const Window1D aligned{-30.5, 30.5};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = jittered_set_1d(1.0, 0.3, aligned, seed);
    CHECK(density_1d(s) <= 0.5 + 0.3 + 1e-12);
  }
  CHECK_THROWS_AS(jittered_set_1d(1.0, 0.6, w, 0), input_error);
}

TEST_CASE("weights_1d closed forms on the unit grid") {
  SamplingSet1D grid;
  grid.window = {-5.5, 5.5};
  for (int n = -5; n <= 5; ++n) grid.points.push_back(n);
  const auto table = weights_1d(grid, 2);
  // interior cells are [-1/2, 1/2] around each point
  CHECK(table.mu[5][0] == Approx(1.0).epsilon(1e-14));
  CHECK(table.mu[5][1] == Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(table.mu[5][2] == Approx(1.0 / 160.0).epsilon(1e-14));
}

TEST_CASE("1D cells tile the window and weights are positive") {
  const auto set = jittered_set_1d(0.9, 0.2, {-25.0, 25.0}, 7);
  const auto z = breakpoints(set);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) total += z[i + 1] - z[i];
  CHECK(total == Approx(set.window.length()).margin(1e-12));

  const auto table = weights_1d(set, 3);
  for (std::size_t n = 0; n < set.points.size(); ++n) {
    CHECK(table.mu[n][0] == Approx(z[n + 1] - z[n]).margin(1e-14));  // cell measure
    for (double m : table.mu[n]) CHECK(m >= 0.0);
  }
}

TEST_CASE("1D scaling covariance") {
  const auto set = jittered_set_1d(1.1, 0.25, {-12.0, 12.0}, 3);
  const double c = 2.75;
  SamplingSet1D scaled;
  scaled.window = {set.window.lo * c, set.window.hi * c};
  for (double x : set.points) scaled.points.push_back(c * x);
  CHECK(density_1d(scaled) == Approx(c * density_1d(set)).epsilon(1e-12));
  const auto t0 = weights_1d(set, 2), t1 = weights_1d(scaled, 2);
  for (std::size_t n = 0; n < set.points.size(); ++n)
    for (int l = 0; l <= 2; ++l)
      CHECK(t1.mu[n][l] == Approx(std::pow(c, 1 + 2 * l) * t0.mu[n][l]).epsilon(1e-11));
}

namespace {

SamplingSetND unit_grid_2d(int half, double q, int resolution) {
  SamplingSetND set;
  set.window.lo = {-half - 0.5, -half - 0.5};
  set.window.hi = {half + 0.5, half + 0.5};
  for (int i = -half; i <= half; ++i)
    for (int j = -half; j <= half; ++j)
      set.points.push_back({double(i), double(j)});
  set.star_q = q;
  set.grid_resolution = resolution;
  return set;
}

}  // namespace

TEST_CASE("density_nd on the integer grid") {
  auto set = unit_grid_2d(3, std::numeric_limits<double>::infinity(), 350);
  auto d = density_nd(set);
  CHECK(d.value == Approx(0.5).margin(d.uncertainty + 1e-12));

  set.star_q = 2.0;
  d = density_nd(set);
  CHECK(d.value == Approx(std::sqrt(2.0) / 2.0).margin(d.uncertainty + 1e-12));
}

TEST_CASE("density_nd self-consistency under refinement") {
  Rng rng(11);
  SamplingSetND set;
  set.window.lo = {-4.0, -4.0};
  set.window.hi = {4.0, 4.0};
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j)
      set.points.push_back({i + rng.uniform(-0.3, 0.3), j + rng.uniform(-0.3, 0.3)});
  set.star_q = 2.0;
  set.grid_resolution = 200;
  const auto coarse = density_nd(set);
  set.grid_resolution = 400;
  const auto fine = density_nd(set);
  CHECK(std::abs(coarse.value - fine.value) <= coarse.uncertainty + fine.uncertainty);
}

TEST_CASE("weights_nd on the integer grid") {
  auto set = unit_grid_2d(3, std::numeric_limits<double>::infinity(), 490);
  const auto table = weights_nd(set, 1);
  REQUIRE(table.alphas.size() == 3);  // (0,0), (1,0), (0,1)
  // middle point index: points are lexicographic over (i, j)
  const int mid = int(set.points.size()) / 2;
  REQUIRE(set.points[mid][0] == 0.0);
  REQUIRE(set.points[mid][1] == 0.0);
  CHECK(table.mu[mid][0] == Approx(1.0).margin(1e-3));
  CHECK(table.mu[mid][1] == Approx(1.0 / 12.0).margin(1e-3));
  CHECK(table.mu[mid][2] == Approx(1.0 / 12.0).margin(1e-3));
  CHECK_FALSE(table.coarse_warning);

  auto coarse = set;
  coarse.grid_resolution = 12;
  CHECK(weights_nd(coarse, 0).coarse_warning);
}

TEST_CASE("weights_nd matches a Monte Carlo oracle") {
  Rng rng(2024);
  SamplingSetND set;
  set.window.lo = {0.0, 0.0};
  set.window.hi = {6.0, 6.0};
  set.star_q = 2.0;
  set.grid_resolution = 600;
  for (int i = 0; i < 50; ++i)
    set.points.push_back({rng.uniform(0.2, 5.8), rng.uniform(0.2, 5.8)});
  const auto table = weights_nd(set, 2);
  const std::vector<int> alpha11{1, 1};
  std::size_t a11 = 0;
  while (table.alphas[a11] != alpha11) ++a11;

  const int N = 1000000;
  std::vector<double> sum(set.points.size(), 0.0), sumsq(set.points.size(), 0.0);
  std::vector<long> count(set.points.size(), 0);
  const double area = 36.0;
  for (int i = 0; i < N; ++i) {
    const std::vector<double> x{rng.uniform(0.0, 6.0), rng.uniform(0.0, 6.0)};
    int best = 0;
    double bd = 1e300;
    for (int n = 0; n < int(set.points.size()); ++n) {
      const double dx = x[0] - set.points[n][0], dy = x[1] - set.points[n][1];
      const double d2 = dx * dx + dy * dy;
      if (d2 < bd) {
        bd = d2;
        best = n;
      }
    }
    const double dx = x[0] - set.points[best][0], dy = x[1] - set.points[best][1];
    const double g = dx * dx * dy * dy;  // (x-x_n)^{2*(1,1)} / (1! 1!)
    sum[best] += g;
    sumsq[best] += g * g;
    count[best] += 1;
  }
  int checked = 0;
  for (std::size_t n = 0; n < set.points.size(); ++n) {
    if (count[n] < 1000) continue;
    // MC estimate of the integral over the whole window restricted to cell n
    const double mean = sum[n] / N;
    const double var = (sumsq[n] / N - mean * mean) / N;
    const double est = area * mean;
    const double se = area * std::sqrt(var);
    CHECK(std::abs(table.mu[n][a11] - est) <= 3.0 * se + 1e-6);
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("weights_nd scaling covariance") {
  Rng rng(5);
  SamplingSetND set;
  set.window.lo = {-3.0, -3.0};
  set.window.hi = {3.0, 3.0};
  set.star_q = 2.0;
  set.grid_resolution = 240;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      set.points.push_back({i + rng.uniform(-0.2, 0.2), j + rng.uniform(-0.2, 0.2)});
  const double c = 1.7;
  SamplingSetND scaled = set;
  for (auto& p : scaled.points)
    for (auto& v : p) v *= c;
  for (auto& v : scaled.window.lo) v *= c;
  for (auto& v : scaled.window.hi) v *= c;

  const auto t0 = weights_nd(set, 1), t1 = weights_nd(scaled, 1);
  for (std::size_t n = 0; n < set.points.size(); ++n)
    for (std::size_t a = 0; a < t0.alphas.size(); ++a) {
      int ord = t0.alphas[a][0] + t0.alphas[a][1];
      CHECK(t1.mu[n][a] == Approx(std::pow(c, 2 + 2 * ord) * t0.mu[n][a]).epsilon(1e-9));
    }
  const auto d0 = density_nd(set), d1 = density_nd(scaled);
  CHECK(d1.value == Approx(c * d0.value).epsilon(1e-9));
}

TEST_CASE("multi-index enumeration") {
  const auto idx = multi_indices_upto(2, 2);
  REQUIRE(idx.size() == 6);
  CHECK(idx[0] == std::vector<int>{0, 0});
  CHECK(idx[1] == std::vector<int>{1, 0});
  CHECK(idx[2] == std::vector<int>{0, 1});
  CHECK(idx[3] == std::vector<int>{2, 0});
  CHECK(idx[4] == std::vector<int>{1, 1});
  CHECK(idx[5] == std::vector<int>{0, 2});
}

TEST_CASE("bunched set construction and the bunch condition") {
  const auto centers = jittered_set_1d(2.0, 0.2, {-19.0, 19.0}, 9);
  const auto bunched = make_bunched(centers, 3, 0.5);
  const auto z = breakpoints(bunched.center_set());
  for (std::size_t n = 0; n < bunched.centers.size(); ++n) {
    REQUIRE(bunched.offsets[n].size() == 3);
    for (double o : bunched.offsets[n]) {
      CHECK(std::abs(o) <= bunched.h * (1 + 1e-12));
      CHECK(o != 0.0);
      CHECK(bunched.centers[n] + o >= z[n] - 1e-12);
      CHECK(bunched.centers[n] + o <= z[n + 1] + 1e-12);
    }
  }
  // tau too wide for this jitter: the bunch escapes some Voronoi cell
  CHECK_THROWS_AS(make_bunched(centers, 2, 1.0), input_error);
  // uniform centers admit tau = 1 (bunches touch the cell boundaries)
  const auto uniform = jittered_set_1d(2.0, 0.0, {-21.0, 21.0}, 0);
  CHECK_NOTHROW(make_bunched(uniform, 2, 1.0));
}

TEST_CASE("equispaced offsets avoid zero and span the width") {
  for (int s = 1; s <= 7; ++s) {
    const auto o = equispaced_offsets(s, 0.4);
    REQUIRE(int(o.size()) == s);
    double maxabs = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) {
      CHECK(o[i] != 0.0);
      CHECK(std::abs(o[i]) <= 0.4 + 1e-15);
      maxabs = std::max(maxabs, std::abs(o[i]));
      if (i > 0) CHECK(o[i] > o[i - 1]);
    }
    CHECK(maxabs == Approx(0.4).epsilon(1e-12));
  }
}

TEST_CASE("bunched weights: closed-form cells") {
  // single center at 0, cell [-1/2, 1/2]
  BunchedSet set;
  set.window = {-0.5, 0.5};
  set.centers = {0.0};
  set.offsets = {{0.1, 0.3}};
  set.h = 0.3;
  set.tau = 0.6;
  set.delta = 0.5;
  const auto table = bunched_weights(set);
  CHECK(table.mu[0][0] == Approx(1.0).epsilon(1e-14));          // cell measure
  CHECK(table.mu[0][1] == Approx(1.0 / 12.0).epsilon(1e-14));   // independent of offsets
  // 2! * int x^2 (x-0.1)^2 dx over [-1/2,1/2]: expand x^4 - 0.2 x^3 + 0.01 x^2
  const double oracle = 2.0 * (1.0 / 80.0 + 0.01 / 12.0);
  CHECK(table.mu[0][2] == Approx(oracle).epsilon(1e-13));

  // mu_{n,1} is offset-independent; mu_{n,2} only sees the first offset
  BunchedSet other = set;
  other.offsets = {{0.1, -0.25}};
  const auto table2 = bunched_weights(other);
  CHECK(table2.mu[0][1] == Approx(table.mu[0][1]).epsilon(1e-14));
  CHECK(table2.mu[0][2] == Approx(table.mu[0][2]).epsilon(1e-13));

  BunchedSet bad = set;
  bad.offsets = {{0.1, 0.1}};
  CHECK_THROWS_AS(bunched_weights(bad), input_error);
}

TEST_CASE("serialization round trips") {
  const auto set = jittered_set_1d(1.3, 0.3, {-9.0, 9.0}, 4);
  std::stringstream ss;
  write_points(ss, set);
  const auto pts = read_points(ss);
  REQUIRE(pts.size() == set.points.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(pts[i][0] == Approx(set.points[i]).epsilon(1e-16));

  const auto centers = jittered_set_1d(2.0, 0.1, {-11.0, 11.0}, 5);
  const auto bunched = make_bunched(centers, 2, 0.4);
  std::stringstream bs;
  write_bunched(bs, bunched);
  const auto back = read_bunched(bs, bunched.window, bunched.tau);
  REQUIRE(back.centers.size() == bunched.centers.size());
  CHECK(back.h == Approx(bunched.h).epsilon(1e-12));
  for (std::size_t n = 0; n < back.centers.size(); ++n)
    for (std::size_t m = 0; m < back.offsets[n].size(); ++m)
      CHECK(back.offsets[n][m] == Approx(bunched.offsets[n][m]).epsilon(1e-15));
}
