#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nusamp/common.hpp"
#include "nusamp/quadrature.hpp"
#include "nusamp/sampling.hpp"

namespace nusamp {

// Reproducing kernel of the bandlimited space over a compact symmetric
// frequency domain: Phi(x) = (2 pi)^{-d} int_Omega e^{i w.x} dw, together
// with its derivatives, and test functions built as finite kernel sums.

inline constexpr int max_deriv_order = 24;

struct Domain {
  enum class Kind { interval, box, ball } kind = Kind::interval;
  int dim = 1;
  double extent = 1.0;  // W for interval/box, radius for the ball

  /// sup of the Euclidean norm over the frequency domain.
  double m_omega() const {
    switch (kind) {
      case Kind::interval: return extent;
      case Kind::box: return extent * std::sqrt(double(dim));
      case Kind::ball: return extent;
    }
    return extent;
  }
  /// Radius of the smallest enclosing ball (domains here are origin-symmetric).
  double enclosing_radius() const { return m_omega(); }
  /// Per-axis frequency extents (the Bernstein vector).
  std::vector<double> bar_omega() const { return std::vector<double>(dim, extent); }
};

inline Domain interval_domain(double W) {
  if (!(W > 0.0)) throw input_error("interval_domain: W must be positive");
  return {Domain::Kind::interval, 1, W};
}
inline Domain box_domain(int d, double W) {
  if (d < 1 || !(W > 0.0)) throw input_error("box_domain: need d >= 1, W > 0");
  return {Domain::Kind::box, d, W};
}
inline Domain ball_domain(int d, double rho) {
  if (!(rho > 0.0)) throw input_error("ball_domain: rho must be positive");
  if (d != 2) throw capability_error("ball_domain: only d = 2 is supported");
  return {Domain::Kind::ball, d, rho};
}

namespace detail {

using complexd = std::complex<double>;

/// J_l(u) = int_0^1 t^l e^{iut} dt for l = 0..lmax.  Series for small u
/// (covers the |Wx| < 1e-4 Taylor guard with room to spare), upward
/// recurrence where it damps, Gauss-Legendre in between.  The series stops
/// at |u| = 4: beyond that its cancellation noise grows like e^|u| eps,
/// which downstream divided differences would amplify.
inline std::vector<complexd> jl_all(int lmax, double u) {
  std::vector<complexd> out(std::size_t(lmax) + 1);
  const double au = std::abs(u);
  if (au <= 4.0) {
    const complexd iu(0.0, u);
    for (int l = 0; l <= lmax; ++l) {
      complexd p(1.0, 0.0), sum(0.0, 0.0);
      for (int m = 0; m < 400; ++m) {
        sum += p / double(l + m + 1);
        if (m > 3 && std::abs(p) / double(l + m + 1) < 1e-18 * std::abs(sum)) break;
        p *= iu / double(m + 1);
      }
      out[std::size_t(l)] = sum;
    }
  } else if (au >= 2.0 * lmax + 4.0) {
    const complexd iu(0.0, u);
    const complexd eiu = std::exp(iu);
    out[0] = (eiu - 1.0) / iu;
    for (int l = 1; l <= lmax; ++l) out[std::size_t(l)] = (eiu - double(l) * out[l - 1]) / iu;
  } else {
    const int n = 24 + int(au / 2.0);
    const auto& rule = gauss_legendre_cached(n);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = 0.5 * (rule.nodes[q] + 1.0);
      const complexd e = 0.5 * rule.weights[q] * std::exp(complexd(0.0, u * t));
      double tp = 1.0;
      for (int l = 0; l <= lmax; ++l) {
        out[std::size_t(l)] += tp * e;
        tp *= t;
      }
    }
  }
  return out;
}

/// Re(i^l z) without forming i^l.
inline double re_il(int l, complexd z) {
  switch (l & 3) {
    case 0: return z.real();
    case 1: return -z.imag();
    case 2: return -z.real();
    default: return z.imag();
  }
}

/// All interval-kernel derivatives Phi^(0..lmax)(x) for the domain [-W, W]:
/// Phi^(l)(x) = (W^{l+1}/pi) Re(i^l J_l(Wx)).
inline std::vector<double> interval_derivs(double W, int lmax, double x) {
  const auto j = jl_all(lmax, W * x);
  std::vector<double> out(std::size_t(lmax) + 1);
  double wp = W;
  for (int l = 0; l <= lmax; ++l) {
    out[std::size_t(l)] = wp / pi * re_il(l, j[std::size_t(l)]);
    wp *= W;
  }
  return out;
}

/// Euclidean-ball kernel derivatives (d = 2) by polar quadrature of the
/// defining frequency integral; spectrally accurate in the angle.
inline double ball_deriv(double rho, int a1, int a2, double x1, double x2) {
  const int order = a1 + a2;
  const double r = std::hypot(x1, x2);
  const int ntheta = 64 + 4 * int(rho * r) + 4 * order;
  const int nrad = 24 + int(rho * r / 2.0);
  const auto& rule = gauss_legendre_cached(nrad);
  complexd acc(0.0, 0.0);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = 0.5 * rho * (rule.nodes[q] + 1.0);
    const double wt = 0.5 * rho * rule.weights[q];
    complexd ang(0.0, 0.0);
    for (int j = 0; j < ntheta; ++j) {
      const double th = 2.0 * pi * j / ntheta;
      const double c = std::cos(th), s = std::sin(th);
      double trig = 1.0;
      for (int m = 0; m < a1; ++m) trig *= c;
      for (int m = 0; m < a2; ++m) trig *= s;
      ang += trig * std::exp(complexd(0.0, t * (x1 * c + x2 * s)));
    }
    ang *= 2.0 * pi / ntheta;
    acc += wt * std::pow(t, 1 + order) * ang;
  }
  return re_il(order, acc) / (4.0 * pi * pi);
}

}  // namespace detail

/// Kernel value at x.
inline double kernel_eval(const Domain& dom, const std::vector<double>& x) {
  if (int(x.size()) != dom.dim) throw input_error("kernel_eval: dimension mismatch");
  switch (dom.kind) {
    case Domain::Kind::interval:
      return detail::interval_derivs(dom.extent, 0, x[0])[0];
    case Domain::Kind::box: {
      double v = 1.0;
      for (double xi : x) v *= detail::interval_derivs(dom.extent, 0, xi)[0];
      return v;
    }
    case Domain::Kind::ball:
      return detail::ball_deriv(dom.extent, 0, 0, x[0], x[1]);
  }
  throw capability_error("kernel_eval: unsupported domain");
}

/// D^alpha Phi(x) by analytic recurrences (product rule across axes).
inline double kernel_deriv(const Domain& dom, const std::vector<int>& alpha,
                           const std::vector<double>& x) {
  if (int(alpha.size()) != dom.dim || int(x.size()) != dom.dim)
    throw input_error("kernel_deriv: dimension mismatch");
  int order = 0;
  for (int a : alpha) {
    if (a < 0) throw input_error("kernel_deriv: negative order");
    order += a;
  }
  if (order > max_deriv_order)
    throw capability_error("kernel_deriv: derivative order exceeds " +
                           std::to_string(max_deriv_order));
  switch (dom.kind) {
    case Domain::Kind::interval:
      return detail::interval_derivs(dom.extent, alpha[0], x[0])[std::size_t(alpha[0])];
    case Domain::Kind::box: {
      double v = 1.0;
      for (int j = 0; j < dom.dim; ++j)
        v *= detail::interval_derivs(dom.extent, alpha[j], x[j])[std::size_t(alpha[j])];
      return v;
    }
    case Domain::Kind::ball:
      if (dom.dim != 2) throw capability_error("kernel_deriv: ball supported for d=2 only");
      return detail::ball_deriv(dom.extent, alpha[0], alpha[1], x[0], x[1]);
  }
  throw capability_error("kernel_deriv: unsupported domain");
}

// ---------------------------------------------------------------------------
// Test functions f = sum_j c_j Phi(. - y_j)

struct TestFunction {
  Domain domain;
  std::vector<std::vector<double>> centers;
  std::vector<double> coeffs;

  int size() const { return int(coeffs.size()); }
};

inline void validate(const TestFunction& f) {
  if (f.centers.size() != f.coeffs.size() || f.coeffs.empty())
    throw input_error("test function: centers/coefficients mismatch");
  for (const auto& y : f.centers)
    if (int(y.size()) != f.domain.dim) throw input_error("test function: center dimension");
}

namespace detail {

inline std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace detail

/// ||f||^2 = c^T G c with G_ij = Phi(y_i - y_j).  Tiny negative values from
/// roundoff are clamped; anything below -1e-10 (relative) signals a kernel
/// bug and raises.
inline double norm_squared(const TestFunction& f) {
  validate(f);
  const int J = f.size();
  double q = 0.0, scale = 0.0;
  const double phi0 = kernel_eval(f.domain, std::vector<double>(f.domain.dim, 0.0));
  for (int i = 0; i < J; ++i) {
    scale += f.coeffs[i] * f.coeffs[i] * phi0;
    for (int j = 0; j < J; ++j)
      q += f.coeffs[i] * f.coeffs[j] *
           kernel_eval(f.domain, detail::diff(f.centers[i], f.centers[j]));
  }
  if (q < 0.0) {
    if (q < -1e-10 * std::max(scale, 1e-300))
      throw numerical_error("norm_squared: Gram form is indefinite beyond tolerance");
    q = 0.0;
  }
  return q;
}

/// ||D^alpha f||^2 via the kernel: <D^a f, D^a f> = (-1)^{|a|} c^T G^{(2a)} c.
inline double deriv_norm_squared(const TestFunction& f, const std::vector<int>& alpha) {
  validate(f);
  int order = 0;
  for (int a : alpha) order += a;
  std::vector<int> alpha2(alpha);
  for (int& a : alpha2) a *= 2;
  const int J = f.size();
  double q = 0.0;
  for (int i = 0; i < J; ++i)
    for (int j = 0; j < J; ++j)
      q += f.coeffs[i] * f.coeffs[j] *
           kernel_deriv(f.domain, alpha2, detail::diff(f.centers[i], f.centers[j]));
  q *= (order % 2 == 0) ? 1.0 : -1.0;
  if (q < 0.0) {
    if (q < -1e-8) throw numerical_error("deriv_norm_squared: indefinite Gram form");
    q = 0.0;
  }
  return q;
}

inline double deriv_norm_squared(const TestFunction& f, int l) {
  return deriv_norm_squared(f, std::vector<int>{l});
}

/// f(x) (same machinery as the derivatives, order 0).
inline double eval(const TestFunction& f, const std::vector<double>& x) {
  validate(f);
  double v = 0.0;
  for (int j = 0; j < f.size(); ++j)
    v += f.coeffs[j] * kernel_eval(f.domain, detail::diff(x, f.centers[j]));
  return v;
}

/// All D^alpha f(x) for |alpha|_1 <= k, in multi_indices_upto order.
/// Per-axis derivative stacks are shared across the multi-indices.
inline std::vector<double> eval_derivatives_at(const TestFunction& f,
                                               const std::vector<double>& x, int k) {
  validate(f);
  if (k < 0) throw input_error("eval_derivatives_at: k must be >= 0");
  const auto alphas = multi_indices_upto(f.domain.dim, k);
  std::vector<double> out(alphas.size(), 0.0);
  const int d = f.domain.dim;
  if (f.domain.kind == Domain::Kind::ball) {
    for (std::size_t a = 0; a < alphas.size(); ++a)
      for (int j = 0; j < f.size(); ++j)
        out[a] += f.coeffs[j] *
                  kernel_deriv(f.domain, alphas[a], detail::diff(x, f.centers[j]));
    return out;
  }
  std::vector<std::vector<double>> axis(d);
  for (int j = 0; j < f.size(); ++j) {
    for (int ax = 0; ax < d; ++ax)
      axis[ax] = detail::interval_derivs(f.domain.extent, k, x[ax] - f.centers[j][ax]);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      double v = f.coeffs[j];
      for (int ax = 0; ax < d; ++ax) v *= axis[ax][std::size_t(alphas[a][ax])];
      out[a] += v;
    }
  }
  return out;
}

/// 1D convenience: f, f', ..., f^(k) at x.
inline std::vector<double> eval_derivatives_1d(const TestFunction& f, double x, int k) {
  if (f.domain.dim != 1) throw input_error("eval_derivatives_1d: domain is not 1D");
  validate(f);
  std::vector<double> out(std::size_t(k) + 1, 0.0);
  for (int j = 0; j < f.size(); ++j) {
    const auto derivs = detail::interval_derivs(f.domain.extent, k, x - f.centers[j][0]);
    for (int l = 0; l <= k; ++l) out[std::size_t(l)] += f.coeffs[j] * derivs[std::size_t(l)];
  }
  return out;
}

/// Deterministic random test function: centers uniform in the centered box of
/// half-width `center_halfwidth`, standard normal coefficients scaled.
inline TestFunction random_test_function(const Domain& dom, int J, double center_halfwidth,
                                         double coeff_scale, std::uint64_t seed) {
  if (J < 1) throw input_error("random_test_function: J must be >= 1");
  TestFunction f;
  f.domain = dom;
  Rng rng(seed);
  for (int j = 0; j < J; ++j) {
    std::vector<double> y(dom.dim);
    for (auto& v : y) v = rng.uniform(-center_halfwidth, center_halfwidth);
    f.centers.push_back(std::move(y));
    f.coeffs.push_back(coeff_scale * rng.normal());
  }
  return f;
}

/// Smallest eigenvalue of the Gram matrix (PSD diagnostics).
inline double gram_min_eigenvalue(const TestFunction& f) {
  validate(f);
  const int J = f.size();
  Eigen::MatrixXd G(J, J);
  for (int i = 0; i < J; ++i)
    for (int j = 0; j < J; ++j)
      G(i, j) = kernel_eval(f.domain, detail::diff(f.centers[i], f.centers[j]));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// ---------------------------------------------------------------------------
// plain-text serialization: domain descriptor line, then `c_j y_j...` lines

inline void write_test_function(std::ostream& os, const TestFunction& f) {
  os.precision(17);
  switch (f.domain.kind) {
    case Domain::Kind::interval: os << "interval " << f.domain.extent << "\n"; break;
    case Domain::Kind::box: os << "box " << f.domain.dim << " " << f.domain.extent << "\n"; break;
    case Domain::Kind::ball: os << "ball " << f.domain.dim << " " << f.domain.extent << "\n"; break;
  }
  for (int j = 0; j < f.size(); ++j) {
    os << f.coeffs[j];
    for (double v : f.centers[j]) os << " " << v;
    os << "\n";
  }
}

inline TestFunction read_test_function(std::istream& is) {
  TestFunction f;
  std::string line;
  if (!std::getline(is, line)) throw input_error("read_test_function: empty stream");
  std::istringstream head(line);
  std::string kind;
  head >> kind;
  if (kind == "interval") {
    double W;
    head >> W;
    f.domain = interval_domain(W);
  } else if (kind == "box") {
    int d;
    double W;
    head >> d >> W;
    f.domain = box_domain(d, W);
  } else if (kind == "ball") {
    int d;
    double rho;
    head >> d >> rho;
    f.domain = ball_domain(d, rho);
  } else {
    throw input_error("read_test_function: unknown domain kind '" + kind + "'");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double c;
    if (!(ls >> c)) continue;
    std::vector<double> y(f.domain.dim);
    for (auto& v : y)
      if (!(ls >> v)) throw input_error("read_test_function: short center line");
    f.coeffs.push_back(c);
    f.centers.push_back(std::move(y));
  }
  validate(f);
  return f;
}

}  // namespace nusamp
