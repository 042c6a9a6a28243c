#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <queue>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gms/common.hpp"

namespace gms {

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7-15 adaptive integration on a finite interval.
// ---------------------------------------------------------------------------

namespace detail {

// K15 abscissae (positive half) and weights; G7 weights on the embedded nodes.
inline constexpr double k15_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double k15_w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double g7_w[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
void gk15_panel(const F& f, double a, double b, double& result, double& err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * k15_x[i]);
    fv[14 - i] = f(c + h * k15_x[i]);
  }
  fv[7] = f(c);
  double k15 = 0.0;
  for (int i = 0; i < 7; ++i) k15 += k15_w[i] * (fv[i] + fv[14 - i]);
  k15 += k15_w[7] * fv[7];
  double g7 = g7_w[3] * fv[7];
  for (int i = 0; i < 3; ++i) g7 += g7_w[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  result = k15 * h;
  err = std::abs(k15 - g7) * h;
  // sharpen the raw difference the way QUADPACK does
  err = std::min(err, std::pow(200.0 * err / std::max(std::abs(result), 1e-300), 1.5) *
                          std::max(std::abs(result), 1e-300));
  if (!std::isfinite(err)) err = std::abs(result);
}

struct Panel {
  double a, b, value, err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace detail

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_panels = 4000;
};

// Adaptive GK15 on [a,b]; optional interior split points (kinks, peaks).
template <class F>
Estimate gk_adaptive(const F& f, double a, double b, const QuadOptions& opt = {},
                     const std::vector<double>& splits = {}) {
  if (!(b > a)) return {0.0, 0.0};
  std::vector<double> pts{a};
  for (double s : splits)
    if (s > a && s < b) pts.push_back(s);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());

  std::priority_queue<detail::Panel> heap;
  double total = 0.0, total_err = 0.0;
  auto push = [&](double lo, double hi) {
    detail::Panel p{lo, hi, 0.0, 0.0};
    detail::gk15_panel(f, lo, hi, p.value, p.err);
    total += p.value;
    total_err += p.err;
    heap.push(p);
  };
  for (size_t i = 0; i + 1 < pts.size(); ++i) push(pts[i], pts[i + 1]);

  int used = int(pts.size()) - 1;
  while (used < opt.max_panels) {
    if (total_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) break;
    detail::Panel worst = heap.top();
    if (worst.err <= 0.0) break;
    heap.pop();
    total -= worst.value;
    total_err -= worst.err;
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval at double resolution
      total += worst.value;
      break;
    }
    push(worst.a, mid);
    push(mid, worst.b);
    ++used;
  }
  return {total, total_err};
}

// One-sided tail integral over [a, +inf) (or (-inf, -a] if left) for
// integrands that eventually decay faster than 1/|x|. Substitutes x = a e^u
// and extends the u-range by doubling until the increment is negligible.
template <class F>
Estimate integrate_tail(const F& f, double a, bool left = false, const QuadOptions& opt = {}) {
  if (!(a > 0)) throw NumericError("integrate_tail: start point must be positive");
  auto g = [&](double u) {
    double x = a * std::exp(u);
    double v = left ? f(-x) : f(x);
    return v * x;  // jacobian
  };
  double u_lo = 0.0, u_hi = 4.0;
  Estimate total{0.0, 0.0};
  for (int round = 0; round < 16; ++round) {
    Estimate piece = gk_adaptive(g, u_lo, u_hi, opt);
    total.value += piece.value;
    total.error += piece.error;
    if (round > 0 && std::abs(piece.value) <=
                         std::max(opt.abs_tol, 0.5 * opt.rel_tol * std::abs(total.value))) {
      total.error += std::abs(piece.value);  // bound on the remaining tail
      return total;
    }
    u_lo = u_hi;
    u_hi *= 2.0;
  }
  total.error += std::abs(total.value) * 1e-6;
  return total;
}

// Whole real line: adaptive core plus log-warped tails.
template <class F>
Estimate integrate_line(const F& f, double core_radius, const QuadOptions& opt = {},
                        const std::vector<double>& splits = {}) {
  Estimate core = gk_adaptive(f, -core_radius, core_radius, opt, splits);
  Estimate right = integrate_tail(f, core_radius, false, opt);
  Estimate left = integrate_tail(f, core_radius, true, opt);
  return {core.value + right.value + left.value, core.error + right.error + left.error};
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rules via Golub-Welsch, with panel-doubling composites.
// ---------------------------------------------------------------------------

struct GaussRule {
  std::vector<double> x, w;
};

// Nodes/weights on [-1,1].
inline const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x[i] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    r.w[i] = 2.0 * v * v;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

// Gauss-Hermite: integrates g against exp(-x^2); expectation helpers rescale.
inline const GaussRule& gauss_hermite(int n) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = std::sqrt(0.5 * k);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double sqrt_pi = std::sqrt(pi);
  for (int i = 0; i < n; ++i) {
    r.x[i] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    r.w[i] = sqrt_pi * v * v;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

// E[g(Z)] for Z ~ N(mean, sd^2).
template <class F>
double gauss_expectation(const F& g, double mean, double sd, int n = 64) {
  const GaussRule& r = gauss_hermite(n);
  const double c = std::sqrt(2.0) * sd;
  double acc = 0.0;
  for (size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * g(mean + c * r.x[i]);
  return acc / std::sqrt(pi);
}

namespace detail {
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
inline double magnitude(const Vec& v) { return v.norm(); }
inline double magnitude(const Mat& v) { return v.norm(); }
}  // namespace detail

// Composite fixed-order Gauss-Legendre over [a,b] with `panels` subintervals.
// Works for double, complex, vector and matrix valued integrands.
template <class F>
auto gl_panels(const F& f, double a, double b, int panels, int order = 16) -> decltype(f(a)) {
  const GaussRule& r = gauss_legendre(order);
  using V = decltype(f(a));
  const double h = (b - a) / panels;
  bool first = true;
  V acc{};
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    for (int i = 0; i < order; ++i) {
      double x = lo + 0.5 * h * (r.x[i] + 1.0);
      V term = f(x);
      term *= 0.5 * h * r.w[i];
      if (first) {
        acc = term;
        first = false;
      } else {
        acc += term;
      }
    }
  }
  return acc;
}

// Panel doubling until successive composite estimates agree to rel_tol.
// Node budget capped at 2^20 evaluations.
template <class F>
auto gl_doubling(const F& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 1e-14) -> decltype(f(a)) {
  using V = decltype(f(a));
  const int order = 16;
  V prev = gl_panels(f, a, b, 1, order);
  int panels = 2;
  while (true) {
    V cur = gl_panels(f, a, b, panels, order);
    V diff = cur;
    diff -= prev;
    if (detail::magnitude(diff) <=
        std::max(abs_tol, rel_tol * std::max(1e-300, detail::magnitude(cur))))
      return cur;
    if (panels * order * 2 > (1 << 20))
      throw NumericError("gl_doubling: node budget exhausted before convergence");
    prev = cur;
    panels *= 2;
  }
}

}  // namespace gms
