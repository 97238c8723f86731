#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "nusamp/common.hpp"

namespace nusamp {

// Optimal constants c_k of the higher-order Wirtinger inequality, computed as
// 1/tau_1 where tau_1 is the first positive root of the boundary-condition
// determinant of the polyharmonic eigenvalue problem
//   (-1)^k g^(2k) = tau^{2k} g on [0,1],
//   g(0) = ... = g^(k-1)(0) = 0,  g^(k)(1) = ... = g^(2k-1)(1) = 0.

using complexd = std::complex<double>;

namespace detail {

inline complexd ipow(complexd base, int e) {
  complexd r(1.0, 0.0);
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace detail

/// The 2k x 2k boundary-condition matrix in the basis exp(i z^s tau x),
/// z = exp(i pi / k).  Row r (r = 0..k-1) holds (i z^s tau)^r; row k+r holds
/// (i z^s tau)^{k+r} exp(i z^s tau).
inline Eigen::MatrixXcd boundary_matrix(int k, double tau) {
  if (k < 2) throw input_error("boundary_matrix: k must be >= 2 (k=1 is analytic)");
  if (!(tau > 0.0)) throw input_error("boundary_matrix: tau must be positive");
  const int n = 2 * k;
  Eigen::MatrixXcd A(n, n);
  const complexd z = std::exp(complexd(0.0, pi / double(k)));
  for (int s = 0; s < n; ++s) {
    const complexd rho = complexd(0.0, 1.0) * detail::ipow(z, s) * tau;
    const complexd e = std::exp(rho);
    for (int r = 0; r < k; ++r) {
      A(r, s) = detail::ipow(rho, r);
      A(k + r, s) = detail::ipow(rho, k + r) * e;
    }
  }
  return A;
}

namespace detail {

/// Same matrix with the tau^row prefactors divided out, so the tau->0
/// degeneracy disappears and det stays O(1) along the scan.
inline Eigen::MatrixXcd normalized_boundary_matrix(int k, double tau) {
  const int n = 2 * k;
  Eigen::MatrixXcd M(n, n);
  const complexd z = std::exp(complexd(0.0, pi / double(k)));
  for (int s = 0; s < n; ++s) {
    const complexd u = complexd(0.0, 1.0) * ipow(z, s);  // i z^s
    const complexd e = std::exp(u * tau);
    for (int r = 0; r < k; ++r) {
      M(r, s) = ipow(u, r);
      M(k + r, s) = ipow(u, k + r) * e;
    }
  }
  // positive row scaling keeps the determinant phase consistent in tau
  for (int r = 0; r < n; ++r) {
    const double nrm = M.row(r).norm();
    if (nrm > 0.0) M.row(r) /= nrm;
  }
  return M;
}

/// The characteristic function is real up to a fixed, tau-independent phase
/// (the complex exponential basis differs from a real solution basis by a
/// constant change of basis).  Fixing the phase at tau -> 0 yields a real
/// functional whose sign changes at the eigenvalues.
struct DetFunctional {
  int k;
  complexd phase;  // conj(det at tau=0) / |det at tau=0|

  explicit DetFunctional(int k_) : k(k_) {
    const Eigen::MatrixXcd M0 = normalized_boundary_matrix(k, 1e-300);
    const complexd d0 = Eigen::PartialPivLU<Eigen::MatrixXcd>(M0).determinant();
    phase = std::conj(d0) / std::abs(d0);
  }

  double operator()(double tau) const {
    const Eigen::MatrixXcd M = normalized_boundary_matrix(k, tau);
    const complexd d = Eigen::PartialPivLU<Eigen::MatrixXcd>(M).determinant();
    return (d * phase).real();
  }
};

/// Smallest singular value of the normalized matrix, via the Gram matrix
/// (cheap; only used for dip detection, never for the final residual).
inline double sigma_min_fast(const Eigen::MatrixXcd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.adjoint() * M,
                                                     Eigen::EigenvaluesOnly);
  const double lmin = std::max(es.eigenvalues()(0), 0.0);
  return std::sqrt(lmin);
}

}  // namespace detail

struct WirtingerResult {
  int k = 0;
  double tau1 = 0.0;      // first positive determinant root, = 1/c_k
  double c = 0.0;         // the Wirtinger constant c_k
  double residual = 0.0;  // sigma_min/sigma_max of the matrix at tau1
};

/// First positive root of the boundary determinant.  Scans the smallest
/// singular value on a grid of step 1e-3 over (0, 2+2k] (starting at 0.05 to
/// skip the tau=0 cluster), confirms each dip with a sign change of the
/// phase-fixed determinant, and bisects to |dtau| <= 1e-10.
inline WirtingerResult wirtinger_constant(int k) {
  if (k < 1 || k > 12) throw input_error("wirtinger_constant: supported range is 1 <= k <= 12");
  if (k == 1) return {1, pi / 2.0, 2.0 / pi, 0.0};

  const double tau_lo = 0.05, tau_hi = 2.0 + 2.0 * k, step = 1e-3;
  const detail::DetFunctional F(k);

  const int n_grid = int((tau_hi - tau_lo) / step) + 1;
  std::vector<double> taus(n_grid), sig(n_grid), fval(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    const double tau = tau_lo + i * step;
    taus[i] = tau;
    const Eigen::MatrixXcd M = detail::normalized_boundary_matrix(k, tau);
    sig[i] = detail::sigma_min_fast(M);
    const complexd d = Eigen::PartialPivLU<Eigen::MatrixXcd>(M).determinant();
    fval[i] = (d * F.phase).real();
  }

  // candidate brackets: singular-value dips below threshold, plus any direct
  // sign change of the functional (belt and braces)
  double root = -1.0;
  auto refine = [&](double a, double b) {
    double fa = F(a), fb = F(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) return -1.0;
    for (int it = 0; it < 100 && (b - a) > 1e-11; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = F(m);
      if (fm == 0.0) return m;
      if (fa * fm < 0.0) {
        b = m;
        fb = fm;
      } else {
        a = m;
        fa = fm;
      }
    }
    return 0.5 * (a + b);
  };
  for (int i = 1; i + 1 < n_grid && root < 0.0; ++i) {
    const bool dip = sig[i] <= sig[i - 1] && sig[i] <= sig[i + 1] && sig[i] < 0.05;
    const bool flip = fval[i - 1] * fval[i] < 0.0;
    if (dip) {
      const double r = refine(taus[i - 1], taus[i + 1]);
      if (r > 0.0) root = r;
    } else if (flip) {
      const double r = refine(taus[i - 1], taus[i]);
      if (r > 0.0) root = r;
    }
  }
  if (root < 0.0)
    throw numerical_error("wirtinger_constant: no determinant root found in (0.05, " +
                          std::to_string(tau_hi) + "] for k=" + std::to_string(k));

  const Eigen::MatrixXcd M = detail::normalized_boundary_matrix(k, root);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& s = svd.singularValues();
  WirtingerResult out;
  out.k = k;
  out.tau1 = root;
  out.c = 1.0 / root;
  out.residual = s(s.size() - 1) / s(0);
  return out;
}

/// Memoized accessor; the scan is the expensive part and callers ask for the
/// same few k values repeatedly.
inline const WirtingerResult& wirtinger_constant_cached(int k) {
  static std::map<int, WirtingerResult> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, wirtinger_constant(k)).first;
  return it->second;
}

// ---------------------------------------------------------------------------
// Independent collocation oracle for c_k.

namespace detail {

/// Fornberg finite-difference weights for the m-th derivative at x0 from the
/// given nodes.  Returns one weight per node.
inline std::vector<double> fd_weights(const std::vector<double>& xs, double x0, int m) {
  const int n = int(xs.size());
  std::vector<std::vector<double>> C(n, std::vector<double>(m + 1, 0.0));
  C[0][0] = 1.0;
  double c1 = 1.0, c4 = xs[0] - x0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int s = mn; s >= 1; --s)
          C[i][s] = c1 * (s * C[i - 1][s - 1] - c5 * C[i - 1][s]) / c2;
        C[i][0] = -c1 * c5 * C[i - 1][0] / c2;
      }
      for (int s = mn; s >= 1; --s) C[j][s] = (c4 * C[j][s] - s * C[j][s - 1]) / c3;
      C[j][0] = c4 * C[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = C[i][m];
  return w;
}

}  // namespace detail

/// Smallest eigenvalue of the polyharmonic problem by collocation.  The
/// equation is written as the first-order system w_j' = w_{j+1} (w_j standing
/// for g^{(j)}), discretized with 4th-order finite differences; a direct
/// discretization of the 2k-th derivative would push the smallest eigenvalue
/// of the unit-spacing operator below the double-precision floor for k >= 5.
/// Boundary conditions are rows on the derivative unknowns themselves.
/// The smallest eigenvalue comes from inverse iteration on the pencil.
inline double collocation_eigenvalue(int k, int n_points = 400) {
  if (k < 1 || k > 6) throw input_error("collocation_eigenvalue: supported range is 1 <= k <= 6");
  if (n_points < 200) throw input_error("collocation_eigenvalue: n_points must be >= 200");

  const int n = n_points;          // cells; nodes 0..n
  const int comps = 2 * k;         // g, g', ..., g^(2k-1)
  const int N = (n + 1) * comps;   // unknowns
  const double dx = 1.0 / n;
  auto idx = [comps](int node, int comp) { return node * comps + comp; };

  // 4th-order first-derivative stencils (5 nodes), shifted near the ends
  const int width = 5, half = 2;
  std::vector<std::vector<double>> stencil(n + 1);
  std::vector<int> base(n + 1);
  for (int i = 0; i <= n; ++i) {
    int b = std::clamp(i - half, 0, n - width + 1);
    std::vector<double> xs(width);
    for (int j = 0; j < width; ++j) xs[j] = (b + j) * dx;
    stencil[i] = detail::fd_weights(xs, i * dx, 1);
    base[i] = b;
  }

  std::vector<Eigen::Triplet<double>> kt, mt;
  int row = 0;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  for (int j = 0; j < comps; ++j) {
    const int drop = (j < k) ? 0 : n;  // replaced by the boundary condition
    for (int i = 0; i <= n; ++i) {
      if (i == drop) continue;
      for (int t = 0; t < width; ++t)
        kt.emplace_back(row, idx(base[i] + t, j), stencil[i][t]);
      if (j + 1 < comps)
        kt.emplace_back(row, idx(i, j + 1), -1.0);
      else
        mt.emplace_back(row, idx(i, 0), sign);  // g^(2k) = (-1)^k lambda g
      ++row;
    }
  }
  for (int r = 0; r < k; ++r) kt.emplace_back(row++, idx(0, r), 1.0);
  for (int r = k; r < comps; ++r) kt.emplace_back(row++, idx(n, r), 1.0);
  if (row != N) throw numerical_error("collocation_eigenvalue: row count mismatch");

  Eigen::SparseMatrix<double> K(N, N), M(N, N);
  K.setFromTriplets(kt.begin(), kt.end());
  M.setFromTriplets(mt.begin(), mt.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success)
    throw numerical_error("collocation_eigenvalue: singular collocation matrix");

  Rng rng(0x5eed);
  Eigen::VectorXd v(N);
  for (int i = 0; i < N; ++i) v(i) = rng.uniform(-1.0, 1.0);
  v.normalize();
  double mu = 0.0;
  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXd tv = lu.solve(M * v);
    const double mu_new = v.dot(tv);  // Rayleigh estimate for K^{-1} M
    const double nrm = tv.norm();
    if (nrm == 0.0) throw numerical_error("collocation_eigenvalue: iteration collapsed");
    v = tv / nrm;
    if (it > 3 && std::abs(mu_new - mu) <= 1e-13 * std::abs(mu_new)) {
      mu = mu_new;
      break;
    }
    mu = mu_new;
  }
  if (mu <= 0.0) throw numerical_error("collocation_eigenvalue: nonpositive eigenvalue estimate");
  return 1.0 / mu;  // smallest lambda of the pencil
}

/// Collocation estimate of c_k = lambda_1^{-1/(2k)}.
inline double collocation_constant(int k, int n_points = 400) {
  const double lambda1 = collocation_eigenvalue(k, n_points);
  return std::pow(lambda1, -1.0 / (2.0 * k));
}

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
};

/// Least-squares line through {(k, 1/c_k)} for k in [k_min, k_max].
inline LinearFit slope_regression(int k_min, int k_max) {
  if (k_max < k_min + 4) throw input_error("slope_regression: need k_max >= k_min + 4");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = k_max - k_min + 1;
  for (int k = k_min; k <= k_max; ++k) {
    const double x = k, y = wirtinger_constant_cached(k).tau1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

}  // namespace nusamp
