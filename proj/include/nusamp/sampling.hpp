#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nusamp/common.hpp"
#include "nusamp/quadrature.hpp"

namespace nusamp {

// ---------------------------------------------------------------------------
// 1D sampling sets

struct Window1D {
  double lo = 0.0, hi = 0.0;
  double length() const { return hi - lo; }
};

/// Strictly increasing points inside a finite window; Voronoi cells are
/// clipped to the window.
struct SamplingSet1D {
  std::vector<double> points;
  Window1D window;
};

inline void validate(const SamplingSet1D& set) {
  if (set.points.empty()) throw input_error("sampling set is empty");
  if (!(set.window.hi > set.window.lo)) throw input_error("degenerate window");
  for (std::size_t i = 0; i + 1 < set.points.size(); ++i)
    if (!(set.points[i] < set.points[i + 1]))
      throw input_error("sampling points must be strictly increasing");
}

/// Cell boundaries z_0 = lo, z_n = (x_{n-1}+x_n)/2, z_N = hi.
inline std::vector<double> breakpoints(const SamplingSet1D& set) {
  validate(set);
  std::vector<double> z(set.points.size() + 1);
  z.front() = set.window.lo;
  z.back() = set.window.hi;
  for (std::size_t i = 1; i < set.points.size(); ++i)
    z[i] = 0.5 * (set.points[i - 1] + set.points[i]);
  return z;
}

/// Largest distance from a window point to the nearest sample:
/// max of half-gaps and the two boundary gaps.
inline double density_1d(const SamplingSet1D& set) {
  validate(set);
  double delta = std::max(set.points.front() - set.window.lo,
                          set.window.hi - set.points.back());
  for (std::size_t i = 0; i + 1 < set.points.size(); ++i)
    delta = std::max(delta, 0.5 * (set.points[i + 1] - set.points[i]));
  if (delta <= 0.0) throw input_error("density_1d: nonpositive density");
  return delta;
}

/// Jittered grid: n*spacing + U(-jitter, jitter), deterministic per seed.
/// Grid indices are chosen so every point stays inside the window.
inline SamplingSet1D jittered_set_1d(double spacing, double jitter, Window1D window,
                                     std::uint64_t seed) {
  if (!(spacing > 0.0)) throw input_error("jittered_set_1d: spacing must be positive");
  if (jitter < 0.0 || jitter >= 0.5 * spacing)
    throw input_error("jittered_set_1d: jitter must lie in [0, spacing/2)");
  SamplingSet1D set;
  set.window = window;
  Rng rng(seed);
  const long n_lo = long(std::ceil((window.lo + jitter) / spacing - 1e-12));
  const long n_hi = long(std::floor((window.hi - jitter) / spacing + 1e-12));
  if (n_hi < n_lo) throw input_error("jittered_set_1d: window holds no grid point");
  for (long n = n_lo; n <= n_hi; ++n)
    set.points.push_back(double(n) * spacing +
                         (jitter > 0.0 ? rng.uniform(-jitter, jitter) : 0.0));
  validate(set);
  return set;
}

/// Voronoi moment weights of the univariate derivative theorem:
/// mu[n][l] = ((z_{n+1}-x_n)^{2l+1} - (z_n-x_n)^{2l+1}) / (l! (2l+1)), exact.
struct WeightTable1D {
  int k = 0;
  std::vector<std::vector<double>> mu;  // [point][order]
};

inline WeightTable1D weights_1d(const SamplingSet1D& set, int k) {
  if (k < 0) throw input_error("weights_1d: k must be >= 0");
  const auto z = breakpoints(set);
  WeightTable1D table;
  table.k = k;
  table.mu.resize(set.points.size());
  for (std::size_t n = 0; n < set.points.size(); ++n) {
    const double a = z[n] - set.points[n], b = z[n + 1] - set.points[n];
    table.mu[n].resize(k + 1);
    for (int l = 0; l <= k; ++l)
      table.mu[n][l] =
          (std::pow(b, 2 * l + 1) - std::pow(a, 2 * l + 1)) / (factorial(l) * (2 * l + 1));
  }
  return table;
}

// ---------------------------------------------------------------------------
// d-dimensional sampling sets (box windows, grid-based Voronoi moments)

struct BoxWindow {
  std::vector<double> lo, hi;
  int dim() const { return int(lo.size()); }
};

/// l^q norm; q = infinity() selects the max norm.
inline double star_norm(const std::vector<double>& v, double q) {
  if (q < 1.0) throw input_error("star_norm: q must be >= 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (q == 2.0) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), q);
  return std::pow(s, 1.0 / q);
}

struct SamplingSetND {
  std::vector<std::vector<double>> points;
  BoxWindow window;
  double star_q = 2.0;       // the norm measuring distances/density
  int grid_resolution = 400; // grid cells per axis for moments/density
};

inline void validate(const SamplingSetND& set) {
  if (set.points.empty()) throw input_error("sampling set is empty");
  const int d = set.window.dim();
  if (d < 1 || int(set.window.hi.size()) != d) throw input_error("bad window");
  for (const auto& p : set.points)
    if (int(p.size()) != d) throw input_error("point dimension mismatch");
  for (std::size_t i = 0; i < set.points.size(); ++i)
    for (std::size_t j = i + 1; j < set.points.size(); ++j)
      if (set.points[i] == set.points[j])
        throw input_error("sampling points must be pairwise distinct");
}

namespace detail {

/// Nearest sampling point in the star norm; strict inequality so the lowest
/// index wins ties (deterministic assignment).
struct NearestFinder {
  const SamplingSetND& set;
  // uniform buckets over the window for d=2; linear scan otherwise
  int nb = 0;
  double bx = 0, by = 0;
  std::vector<std::vector<int>> buckets;

  explicit NearestFinder(const SamplingSetND& s) : set(s) {
    if (set.window.dim() == 2) {
      nb = std::max(1, int(std::sqrt(double(set.points.size()))));
      bx = (set.window.hi[0] - set.window.lo[0]) / nb;
      by = (set.window.hi[1] - set.window.lo[1]) / nb;
      buckets.resize(std::size_t(nb) * nb);
      for (int i = 0; i < int(set.points.size()); ++i) {
        const int cx = std::clamp(int((set.points[i][0] - set.window.lo[0]) / bx), 0, nb - 1);
        const int cy = std::clamp(int((set.points[i][1] - set.window.lo[1]) / by), 0, nb - 1);
        buckets[std::size_t(cy) * nb + cx].push_back(i);
      }
    }
  }

  std::pair<int, double> operator()(const std::vector<double>& x) const {
    const int d = set.window.dim();
    std::vector<double> diff(d);
    auto dist = [&](int i) {
      for (int j = 0; j < d; ++j) diff[j] = x[j] - set.points[i][j];
      return star_norm(diff, set.star_q);
    };
    if (d != 2) {
      int best = 0;
      double bd = dist(0);
      for (int i = 1; i < int(set.points.size()); ++i) {
        const double di = dist(i);
        if (di < bd) {
          bd = di;
          best = i;
        }
      }
      return {best, bd};
    }
    const int cx = std::clamp(int((x[0] - set.window.lo[0]) / bx), 0, nb - 1);
    const int cy = std::clamp(int((x[1] - set.window.lo[1]) / by), 0, nb - 1);
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring < nb; ++ring) {
      for (int iy = std::max(0, cy - ring); iy <= std::min(nb - 1, cy + ring); ++iy)
        for (int ix = std::max(0, cx - ring); ix <= std::min(nb - 1, cx + ring); ++ix) {
          if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
          for (int i : buckets[std::size_t(iy) * nb + ix]) {
            const double di = dist(i);
            if (di < bd || (di == bd && i < best)) {
              bd = di;
              best = i;
            }
          }
        }
      // any point in ring >= r+1 is at max-norm distance >= r*min(bx,by) from
      // x, and |.|_q >= |.|_inf for every q >= 1, so the search is certified
      if (best >= 0 && bd <= double(ring) * std::min(bx, by)) break;
    }
    if (best < 0) {  // fall back (window smaller than bucket logic expects)
      best = 0;
      bd = dist(0);
      for (int i = 1; i < int(set.points.size()); ++i) {
        const double di = dist(i);
        if (di < bd) {
          bd = di;
          best = i;
        }
      }
    }
    return {best, bd};
  }
};

inline double cell_volume(const SamplingSetND& set) {
  double v = 1.0;
  for (int j = 0; j < set.window.dim(); ++j)
    v *= (set.window.hi[j] - set.window.lo[j]) / set.grid_resolution;
  return v;
}

template <typename F>
void for_each_grid_midpoint(const SamplingSetND& set, F&& f) {
  const int d = set.window.dim(), R = set.grid_resolution;
  std::vector<int> idx(d, 0);
  std::vector<double> mid(d);
  std::vector<double> step(d);
  for (int j = 0; j < d; ++j) step[j] = (set.window.hi[j] - set.window.lo[j]) / R;
  while (true) {
    for (int j = 0; j < d; ++j) mid[j] = set.window.lo[j] + (idx[j] + 0.5) * step[j];
    f(mid);
    int j = 0;
    for (; j < d; ++j) {
      if (++idx[j] < R) break;
      idx[j] = 0;
    }
    if (j == d) break;
  }
}

}  // namespace detail

struct DensityND {
  double value = 0.0;
  double uncertainty = 0.0;  // half grid diagonal in the star norm
};

/// Density over grid midpoints, with the grid-induced uncertainty.
inline DensityND density_nd(const SamplingSetND& set) {
  validate(set);
  if (set.grid_resolution < 2) throw input_error("density_nd: grid_resolution too small");
  detail::NearestFinder nearest(set);
  DensityND out;
  detail::for_each_grid_midpoint(set, [&](const std::vector<double>& mid) {
    out.value = std::max(out.value, nearest(mid).second);
  });
  std::vector<double> half(set.window.dim());
  for (int j = 0; j < set.window.dim(); ++j)
    half[j] = 0.5 * (set.window.hi[j] - set.window.lo[j]) / set.grid_resolution;
  out.uncertainty = star_norm(half, set.star_q);
  return out;
}

namespace detail {

inline void compositions(int d, int total, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
  if (d == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = total; v >= 0; --v) {
    cur.push_back(v);
    compositions(d - 1, total - v, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Multi-indices with |alpha|_1 <= k in graded lexicographic order.
inline std::vector<std::vector<int>> multi_indices_upto(int d, int k) {
  if (d < 1 || k < 0) throw input_error("multi_indices_upto: need d >= 1, k >= 0");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  for (int total = 0; total <= k; ++total) detail::compositions(d, total, cur, out);
  return out;
}

struct WeightTableND {
  int k = 0;
  std::vector<std::vector<int>> alphas;        // multi-indices, graded order
  std::vector<std::vector<double>> mu;         // [point][alpha index]
  bool coarse_warning = false;                 // < 4 grid cells across a cell
};

/// Grid (midpoint-rule) Voronoi moments:
/// mu[n][alpha] ~= (1/alpha!) sum_{cells -> n} (mid - x_n)^{2 alpha} * cellvol.
inline WeightTableND weights_nd(const SamplingSetND& set, int k) {
  validate(set);
  if (k < 0) throw input_error("weights_nd: k must be >= 0");
  if (set.grid_resolution < 2) throw input_error("weights_nd: grid_resolution too small");
  WeightTableND table;
  table.k = k;
  table.alphas = multi_indices_upto(set.window.dim(), k);
  table.mu.assign(set.points.size(), std::vector<double>(table.alphas.size(), 0.0));
  std::vector<double> alpha_fact(table.alphas.size(), 1.0);
  for (std::size_t a = 0; a < table.alphas.size(); ++a)
    for (int aj : table.alphas[a]) alpha_fact[a] *= factorial(aj);
  const double vol = detail::cell_volume(set);
  detail::NearestFinder nearest(set);
  std::vector<std::size_t> cells_per_point(set.points.size(), 0);
  const int d = set.window.dim();
  detail::for_each_grid_midpoint(set, [&](const std::vector<double>& mid) {
    const int n = nearest(mid).first;
    ++cells_per_point[n];
    for (std::size_t a = 0; a < table.alphas.size(); ++a) {
      double term = vol / alpha_fact[a];
      for (int j = 0; j < d; ++j)
        term *= std::pow(mid[j] - set.points[n][j], 2 * table.alphas[a][j]);
      table.mu[n][a] += term;
    }
  });
  for (std::size_t n = 0; n < set.points.size(); ++n)
    if (std::pow(double(cells_per_point[n]), 1.0 / d) < 4.0) table.coarse_warning = true;
  return table;
}

// ---------------------------------------------------------------------------
// Bunched sampling sets

/// Centers with s extra samples each, all inside [x0 - h, x0 + h] which must
/// itself sit inside the center's Voronoi cell.
struct BunchedSet {
  std::vector<double> centers;
  std::vector<std::vector<double>> offsets;  // s offsets per center, nonzero
  double h = 0.0;      // bunch half-width = tau * delta
  double tau = 0.0;
  double delta = 0.0;  // density of the centers
  Window1D window;

  int s() const { return offsets.empty() ? 0 : int(offsets.front().size()); }
  SamplingSet1D center_set() const { return {centers, window}; }
  /// Bunch points in Newton order: center first, then the offsets.
  std::vector<double> bunch(std::size_t n) const {
    std::vector<double> pts{centers[n]};
    for (double o : offsets[n]) pts.push_back(centers[n] + o);
    return pts;
  }
};

/// Equispaced default offsets: the widest symmetric equispaced grid in
/// [-h, h] that avoids 0 (for odd s the leftmost node is dropped).
inline std::vector<double> equispaced_offsets(int s, double h) {
  if (s == 0) return {};
  if (s == 1) return {h};
  const int p = (s % 2 == 0) ? s : s + 1;  // even grid size, no node at 0
  std::vector<double> grid(p);
  for (int m = 0; m < p; ++m) grid[m] = -h + 2.0 * h * m / (p - 1);
  return std::vector<double>(grid.end() - s, grid.end());
}

/// Builds a bunched set on the given centers.  Rejects configurations where
/// some bunch interval [x0-h, x0+h] escapes its Voronoi cell.
inline BunchedSet make_bunched(const SamplingSet1D& centers, int s, double tau,
                               bool random_offsets = false, std::uint64_t seed = 0) {
  if (s < 0) throw input_error("make_bunched: s must be >= 0");
  if (!(tau > 0.0) || tau > 1.0) throw input_error("make_bunched: tau must lie in (0, 1]");
  BunchedSet out;
  out.centers = centers.points;
  out.window = centers.window;
  out.delta = density_1d(centers);
  out.tau = tau;
  out.h = tau * out.delta;
  const auto z = breakpoints(centers);
  const double tol = 1e-9 * std::max(1.0, out.h);
  for (std::size_t n = 0; s > 0 && n < out.centers.size(); ++n) {
    if (out.centers[n] - out.h < z[n] - tol || out.centers[n] + out.h > z[n + 1] + tol)
      throw input_error("make_bunched: bunch interval of center " + std::to_string(n) +
                        " is not contained in its Voronoi cell; reduce tau or the jitter");
  }
  Rng rng(seed);
  out.offsets.resize(out.centers.size());
  for (std::size_t n = 0; n < out.centers.size(); ++n) {
    if (!random_offsets || s == 0) {
      out.offsets[n] = equispaced_offsets(s, out.h);
    } else {
      std::vector<double> o;
      int guard = 0;
      while (int(o.size()) < s) {
        const double cand = rng.uniform(-out.h, out.h);
        bool ok = std::abs(cand) > 1e-3 * out.h;
        for (double prev : o) ok = ok && std::abs(cand - prev) > 1e-3 * out.h;
        if (ok) o.push_back(cand);
        if (++guard > 10000)
          throw numerical_error("make_bunched: could not draw distinct offsets");
      }
      std::sort(o.begin(), o.end());
      out.offsets[n] = o;
    }
  }
  return out;
}

/// Newton polynomial N_m(x) = prod_{l<m} (x - p_l) over the bunch points.
inline double newton_basis(const std::vector<double>& pts, int m, double x) {
  double v = 1.0;
  for (int l = 0; l < m; ++l) v *= (x - pts[l]);
  return v;
}

struct BunchWeightTable {
  int s = 0;
  std::vector<std::vector<double>> mu;  // [center][m]
};

/// mu[n][m] = m! * int_{V_n} N_{n,m}(x)^2 dx, by Gauss-Legendre exact for the
/// degree-2m integrand (s+1 nodes cover every m <= s).
inline BunchWeightTable bunched_weights(const BunchedSet& set) {
  const auto z = breakpoints(set.center_set());
  const int s = set.s();
  for (const auto& o : set.offsets) {
    for (std::size_t i = 0; i < o.size(); ++i)
      for (std::size_t j = i + 1; j < o.size(); ++j)
        if (o[i] == o[j]) throw input_error("bunched_weights: coincident offsets");
  }
  const auto& rule = gauss_legendre_cached(s + 1);
  BunchWeightTable table;
  table.s = s;
  table.mu.resize(set.centers.size());
  for (std::size_t n = 0; n < set.centers.size(); ++n) {
    const auto pts = set.bunch(n);
    table.mu[n].resize(s + 1);
    for (int m = 0; m <= s; ++m) {
      const double integral = rule.integrate(
          [&](double x) {
            const double nm = newton_basis(pts, m, x);
            return nm * nm;
          },
          z[n], z[n + 1]);
      table.mu[n][m] = factorial(m) * integral;
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// plain-text serialization

inline void write_points(std::ostream& os, const SamplingSetND& set) {
  os.precision(17);
  for (const auto& p : set.points) {
    for (std::size_t j = 0; j < p.size(); ++j) os << (j ? " " : "") << p[j];
    os << "\n";
  }
}

inline void write_points(std::ostream& os, const SamplingSet1D& set) {
  os.precision(17);
  for (double x : set.points) os << x << "\n";
}

inline std::vector<std::vector<double>> read_points(std::istream& is) {
  std::vector<std::vector<double>> pts;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> p;
    double v;
    while (ls >> v) p.push_back(v);
    if (!p.empty()) pts.push_back(std::move(p));
  }
  return pts;
}

/// One line per bunch: `center offset_1 ... offset_s`.
inline void write_bunched(std::ostream& os, const BunchedSet& set) {
  os.precision(17);
  for (std::size_t n = 0; n < set.centers.size(); ++n) {
    os << set.centers[n];
    for (double o : set.offsets[n]) os << " " << o;
    os << "\n";
  }
}

inline BunchedSet read_bunched(std::istream& is, Window1D window, double tau) {
  const auto rows = read_points(is);
  SamplingSet1D centers;
  centers.window = window;
  BunchedSet out;
  for (const auto& row : rows) {
    if (row.empty()) continue;
    centers.points.push_back(row[0]);
    out.offsets.emplace_back(row.begin() + 1, row.end());
  }
  out.centers = centers.points;
  out.window = window;
  out.delta = density_1d(centers);
  out.tau = tau;
  double h = 0.0;
  for (const auto& o : out.offsets)
    for (double v : o) h = std::max(h, std::abs(v));
  out.h = h;
  return out;
}

}  // namespace nusamp
