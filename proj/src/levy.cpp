#include "gms/levy.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "gms/quadrature.hpp"

namespace gms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlphaCap = 1.999;  // stable index must stay below this

bool is_inf(double t) { return std::isinf(t); }

using cd = std::complex<double>;

// Integral of a complex integrand over [0, inf) by window doubling; the
// integrand must decay exponentially.
cd integrate_halfline(const std::function<cd(double)>& f, double first_window) {
  cd total = 0.0;
  double a = 0.0, w = first_window;
  for (int round = 0; round < 60; ++round) {
    cd inc = gl_doubling([&](double r) { return f(r); }, a, a + w, 1e-11, 1e-14);
    total += inc;
    if (round > 2 && std::abs(inc) <= 1e-13 * (1.0 + std::abs(total))) return total;
    a += w;
    w *= 2.0;
  }
  throw NumericError("halfline quadrature did not converge");
}

}  // namespace

LevyMeasureSpec LevyMeasureSpec::zero() { return {}; }

LevyMeasureSpec LevyMeasureSpec::symmetric_stable(double alpha, double scale) {
  LevyMeasureSpec s;
  s.kind = Kind::SymmetricStable;
  s.alpha = alpha;
  s.scale = scale;
  return s;
}

LevyMeasureSpec LevyMeasureSpec::finite_atoms(std::vector<Atom> atoms) {
  LevyMeasureSpec s;
  s.kind = Kind::FiniteAtoms;
  s.atoms = std::move(atoms);
  return s;
}

LevyMeasureSpec LevyMeasureSpec::compound_poisson_laplace(double rate, double jump_scale) {
  LevyMeasureSpec s;
  s.kind = Kind::CompoundPoisson;
  s.rate = rate;
  s.jump_law = JumpLaw::Laplace;
  s.jump_scale = jump_scale;
  return s;
}

LevyMeasureSpec LevyMeasureSpec::compound_poisson_gaussian(double rate, double jump_sd) {
  LevyMeasureSpec s;
  s.kind = Kind::CompoundPoisson;
  s.rate = rate;
  s.jump_law = JumpLaw::Gaussian;
  s.jump_scale = jump_sd;
  return s;
}

LevyMeasureSpec LevyMeasureSpec::compound_poisson_dirac(double rate, Vec point) {
  LevyMeasureSpec s;
  s.kind = Kind::CompoundPoisson;
  s.rate = rate;
  s.jump_law = JumpLaw::Dirac;
  s.jump_point = std::move(point);
  return s;
}

bool LevyMeasureSpec::is_symmetric() const {
  switch (kind) {
    case Kind::Zero:
    case Kind::SymmetricStable:
      return true;
    case Kind::CompoundPoisson:
      return jump_law != JumpLaw::Dirac;
    case Kind::FiniteAtoms: {
      // symmetric iff atoms come in (y, m), (-y, m) pairs
      for (const auto& a : atoms) {
        bool matched = false;
        for (const auto& b : atoms)
          if ((a.point + b.point).norm() <= 1e-12 * (1.0 + a.point.norm()) &&
              std::abs(a.mass - b.mass) <= 1e-12 * a.mass) {
            matched = true;
            break;
          }
        if (!matched) return false;
      }
      return true;
    }
  }
  return false;
}

void LevyMeasureSpec::validate(int dim) const {
  switch (kind) {
    case Kind::Zero:
      return;
    case Kind::SymmetricStable:
      if (dim != 1) throw ConfigError("symmetric stable jump part requires dimension 1");
      if (!(alpha > 0.0) || alpha >= kAlphaCap)
        throw ConfigError("stable index must lie in (0, " + std::to_string(kAlphaCap) + ")");
      if (!(scale > 0.0)) throw ConfigError("stable scale must be positive");
      return;
    case Kind::FiniteAtoms:
      if (atoms.empty()) throw ConfigError("atom list is empty");
      for (const auto& a : atoms) {
        if (int(a.point.size()) != dim) throw ConfigError("atom dimension mismatch");
        if (!(a.mass > 0.0)) throw ConfigError("atom mass must be positive");
        if (a.point.norm() == 0.0) throw ConfigError("atom at the origin is not allowed");
      }
      return;
    case Kind::CompoundPoisson:
      if (!(rate > 0.0)) throw ConfigError("compound Poisson rate must be positive");
      if (jump_law == JumpLaw::Dirac) {
        if (int(jump_point.size()) != dim) throw ConfigError("jump point dimension mismatch");
        if (jump_point.norm() == 0.0) throw ConfigError("jump at the origin is not allowed");
      } else {
        if (!(jump_scale > 0.0)) throw ConfigError("jump scale must be positive");
        if (jump_law == JumpLaw::Laplace && dim != 1)
          throw ConfigError("Laplace jumps require dimension 1");
      }
      return;
  }
}

void LevyTriple::validate() const {
  const int d = dim();
  if (d < 1) throw ConfigError("triple dimension must be at least 1");
  if (Q.rows() != d || Q.cols() != d) throw ConfigError("covariance dimension mismatch");
  if ((Q - Q.transpose()).norm() > 1e-12 * (1.0 + Q.norm()))
    throw ConfigError("covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(Q);
  if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw ConfigError("covariance must be positive semidefinite");
  nu.validate(d);
}

SemigroupSpec SemigroupSpec::diagonal(Vec rates) {
  if (rates.size() == 0) throw ConfigError("empty rate vector");
  if (rates.minCoeff() < 0.0) throw ConfigError("decay rates must be nonnegative");
  SemigroupSpec s;
  s.kind = Kind::DiagonalExp;
  s.rates = std::move(rates);
  return s;
}

SemigroupSpec SemigroupSpec::matrix(Mat A) {
  if (A.rows() != A.cols() || A.rows() == 0) throw ConfigError("generator must be square");
  Eigen::EigenSolver<Mat> es(A);
  if (es.eigenvalues().real().maxCoeff() >= 0.0)
    throw ConfigError("generator spectral abscissa must be negative");
  SemigroupSpec s;
  s.kind = Kind::MatrixGenerator;
  s.A = std::move(A);
  return s;
}

int SemigroupSpec::dim() const {
  return kind == Kind::DiagonalExp ? int(rates.size()) : int(A.rows());
}

Mat SemigroupSpec::S(double t) const {
  if (kind == Kind::DiagonalExp) return (-t * rates.array()).exp().matrix().asDiagonal();
  return (t * A).exp();
}

bool SemigroupSpec::scalar_rate() const {
  return kind == Kind::DiagonalExp &&
         rates.maxCoeff() - rates.minCoeff() <= 1e-14 * (1.0 + rates.maxCoeff());
}

double SemigroupSpec::min_rate() const {
  if (kind == Kind::DiagonalExp) return rates.minCoeff();
  return -Eigen::EigenSolver<Mat>(A).eigenvalues().real().maxCoeff();
}

double stable_levy_constant(double alpha) {
  if (!(alpha > 0.0) || alpha >= kAlphaCap) throw ConfigError("stable index out of range");
  static std::map<double, double> cache;
  static std::mutex mu;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(alpha);
    if (it != cache.end()) return it->second;
  }
  // I(alpha) = int_R (1 - cos y) |y|^(-1-alpha) dy, then c = 1/I.
  const double delta = 0.1, A = 40.0 * pi;
  double series = 0.0;
  double fact = 1.0;  // (2k)!
  for (int k = 1; k <= 12; ++k) {
    fact *= (2.0 * k - 1.0) * (2.0 * k);
    const double term = std::pow(delta, 2.0 * k - alpha) / (fact * (2.0 * k - alpha));
    series += (k % 2 == 1) ? term : -term;
  }
  Estimate body = gk_adaptive([&](double y) { return (1.0 - std::cos(y)) * std::pow(y, -1.0 - alpha); },
                              delta, A, {1e-13, 1e-15, 20000});
  const double s = 1.0 + alpha;
  const double cosc = std::cos(A), sinc = std::sin(A);
  double tail_cos = -sinc * std::pow(A, -s) + s * cosc * std::pow(A, -s - 1.0) +
                    s * (s + 1.0) * sinc * std::pow(A, -s - 2.0) -
                    s * (s + 1.0) * (s + 2.0) * cosc * std::pow(A, -s - 3.0);
  const double tail = std::pow(A, -alpha) / alpha - tail_cos;
  const double c = 1.0 / (2.0 * (series + body.value + tail));
  std::lock_guard<std::mutex> lock(mu);
  cache[alpha] = c;
  return c;
}

namespace {

// Jump part of the Levy-Khinchine exponent (compensated inside the unit ball).
cd jump_exponent(const LevyMeasureSpec& nu, const Vec& xi) {
  switch (nu.kind) {
    case LevyMeasureSpec::Kind::Zero:
      return 0.0;
    case LevyMeasureSpec::Kind::SymmetricStable:
      return std::pow(nu.scale * std::abs(xi[0]), nu.alpha);
    case LevyMeasureSpec::Kind::FiniteAtoms: {
      cd sum = 0.0;
      for (const auto& a : nu.atoms) {
        const double phase = xi.dot(a.point);
        cd term = 1.0 - std::exp(cd(0.0, phase));
        if (a.point.norm() <= 1.0) term += cd(0.0, phase);
        sum += a.mass * term;
      }
      return sum;
    }
    case LevyMeasureSpec::Kind::CompoundPoisson: {
      switch (nu.jump_law) {
        case LevyMeasureSpec::JumpLaw::Gaussian:
          return nu.rate * (1.0 - std::exp(-0.5 * nu.jump_scale * nu.jump_scale * xi.squaredNorm()));
        case LevyMeasureSpec::JumpLaw::Laplace: {
          const double u = nu.jump_scale * xi[0];
          return nu.rate * (u * u / (1.0 + u * u));
        }
        case LevyMeasureSpec::JumpLaw::Dirac: {
          const double phase = xi.dot(nu.jump_point);
          cd term = 1.0 - std::exp(cd(0.0, phase));
          if (nu.jump_point.norm() <= 1.0) term += cd(0.0, phase);
          return nu.rate * term;
        }
      }
      return 0.0;
    }
  }
  return 0.0;
}

}  // namespace

std::complex<double> char_exponent(const LevyTriple& triple, const Vec& xi) {
  const cd drift(0.0, -triple.b.dot(xi));
  const double gauss = 0.5 * xi.dot(triple.Q * xi);
  return drift + gauss + jump_exponent(triple.nu, xi);
}

namespace {

// Closed forms for int_0^t exp(-a r) dr, handling a = 0 and t = inf.
double decay_weight(double a, double t) {
  if (is_inf(t)) {
    if (a <= 0.0) throw NumericError("time integral diverges: semigroup is not strictly stable");
    return 1.0 / a;
  }
  if (a == 0.0) return t;
  return -std::expm1(-a * t) / a;
}

cd drift_exponent_t(const LevyTriple& triple, const SemigroupSpec& sg, double t, const Vec& xi) {
  if (sg.kind == SemigroupSpec::Kind::DiagonalExp) {
    double dot = 0.0;
    for (int i = 0; i < triple.dim(); ++i) {
      if (triple.b[i] == 0.0) continue;
      dot += triple.b[i] * xi[i] * decay_weight(sg.rates[i], t);
    }
    return cd(0.0, -dot);
  }
  const Mat& A = sg.A;
  Mat integral;  // int_0^t S(r) dr = A^{-1} (S(t) - I)
  if (is_inf(t))
    integral = -A.inverse();
  else
    integral = A.inverse() * (sg.S(t) - Mat::Identity(A.rows(), A.cols()));
  return cd(0.0, -xi.dot(integral * triple.b));
}

double gauss_exponent_t(const LevyTriple& triple, const SemigroupSpec& sg, double t,
                        const Vec& xi) {
  if (triple.Q.norm() == 0.0) return 0.0;
  if (sg.kind == SemigroupSpec::Kind::DiagonalExp) {
    double quad = 0.0;
    for (int i = 0; i < triple.dim(); ++i)
      for (int j = 0; j < triple.dim(); ++j) {
        if (triple.Q(i, j) == 0.0) continue;
        quad += xi[i] * triple.Q(i, j) * xi[j] * decay_weight(sg.rates[i] + sg.rates[j], t);
      }
    return 0.5 * quad;
  }
  // X(t) = Qinf - S(t) Qinf S(t)^T with A Qinf + Qinf A^T = -Q.
  const int d = triple.dim();
  Mat M = Eigen::kroneckerProduct(Mat::Identity(d, d), sg.A).eval() +
          Eigen::kroneckerProduct(sg.A, Mat::Identity(d, d)).eval();
  Vec q = Eigen::Map<const Vec>(triple.Q.data(), d * d);
  Vec v = M.fullPivLu().solve(-q);
  Mat Qinf = Eigen::Map<Mat>(v.data(), d, d);
  Mat X = is_inf(t) ? Qinf : Mat((Qinf - sg.S(t) * Qinf * sg.S(t).transpose()).eval());
  return 0.5 * xi.dot(X * xi);
}

cd jump_exponent_t(const LevyTriple& triple, const SemigroupSpec& sg, double t, const Vec& xi) {
  const auto& nu = triple.nu;
  if (nu.is_zero()) return 0.0;
  // closed forms for scalar-rate diagonal semigroups
  if (sg.scalar_rate()) {
    const double beta = sg.rates[0];
    if (nu.kind == LevyMeasureSpec::Kind::SymmetricStable) {
      const double a = nu.alpha;
      return std::pow(nu.scale * std::abs(xi[0]), a) * decay_weight(a * beta, t);
    }
    if (nu.kind == LevyMeasureSpec::Kind::CompoundPoisson &&
        nu.jump_law == LevyMeasureSpec::JumpLaw::Laplace && beta > 0.0) {
      const double u2 = nu.jump_scale * nu.jump_scale * xi[0] * xi[0];
      const double lo = is_inf(t) ? 0.0 : std::exp(-2.0 * beta * t);
      return nu.rate / (2.0 * beta) * std::log((1.0 + u2) / (1.0 + lo * u2));
    }
  }
  auto integrand = [&](double r) { return jump_exponent(nu, Vec(sg.S(r).transpose() * xi)); };
  if (is_inf(t)) {
    const double m = sg.min_rate();
    if (m <= 0.0) throw NumericError("time integral diverges: semigroup is not strictly stable");
    return integrate_halfline(integrand, 4.0 / m);
  }
  return gl_doubling(integrand, 0.0, t, 1e-11, 1e-14);
}

}  // namespace

std::complex<double> integrated_exponent(const LevyTriple& triple, const SemigroupSpec& sg,
                                         double t, const Vec& xi) {
  if (sg.dim() != triple.dim()) throw ConfigError("semigroup dimension mismatch");
  if (!(t > 0.0)) throw ConfigError("time must be positive");
  return drift_exponent_t(triple, sg, t, xi) + gauss_exponent_t(triple, sg, t, xi) +
         jump_exponent_t(triple, sg, t, xi);
}

std::complex<double> char_fn_mu_t(const LevyTriple& triple, const SemigroupSpec& sg, double t,
                                  const Vec& xi) {
  return std::exp(-integrated_exponent(triple, sg, t, xi));
}

namespace {

// Atoms of the jump part that sit outside the unit ball (mass-weighted); the
// compensation indicator changes along their flow, producing a drift
// correction. Only atomic jump parts are asymmetric in this catalogue.
std::vector<LevyMeasureSpec::Atom> outer_atoms(const LevyMeasureSpec& nu) {
  std::vector<LevyMeasureSpec::Atom> out;
  if (nu.kind == LevyMeasureSpec::Kind::FiniteAtoms) {
    for (const auto& a : nu.atoms)
      if (a.point.norm() > 1.0) out.push_back(a);
  } else if (nu.kind == LevyMeasureSpec::Kind::CompoundPoisson &&
             nu.jump_law == LevyMeasureSpec::JumpLaw::Dirac && nu.jump_point.norm() > 1.0) {
    out.push_back({nu.jump_point, nu.rate});
  }
  return out;
}

// int_0^t S(r) y 1{|S(r) y| <= 1} dr for |y| > 1, via the crossing time.
Vec indicator_drift(const SemigroupSpec& sg, double t, const Vec& y) {
  const int d = int(y.size());
  auto norm_at = [&](double r) { return (sg.S(r) * y).norm(); };
  // |S(r) y| decays to 0; find the first crossing of 1 by bisection
  double hi = 1.0 / std::max(sg.min_rate(), 1e-6);
  while (norm_at(hi) > 1.0 && hi < 1e8) hi *= 2.0;
  if (norm_at(hi) > 1.0) return Vec::Zero(d);
  double lo = 0.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-14 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (norm_at(mid) > 1.0 ? lo : hi) = mid;
  }
  const double cross = 0.5 * (lo + hi);
  if (!is_inf(t) && t <= cross) return Vec::Zero(d);
  if (sg.kind == SemigroupSpec::Kind::DiagonalExp) {
    Vec out(d);
    for (int i = 0; i < d; ++i)
      out[i] = y[i] * std::exp(-sg.rates[i] * cross) * decay_weight(sg.rates[i], is_inf(t) ? t : t - cross);
    return out;
  }
  Mat integral;
  if (is_inf(t))
    integral = Mat(-sg.A.inverse() * sg.S(cross));
  else
    integral = Mat(sg.A.inverse() * (sg.S(t) - sg.S(cross)));
  return integral * y;
}

}  // namespace

TimeCharacteristics characteristics_t(const LevyTriple& triple, const SemigroupSpec& sg,
                                      double t) {
  if (sg.dim() != triple.dim()) throw ConfigError("semigroup dimension mismatch");
  const int d = triple.dim();
  TimeCharacteristics out;
  // covariance
  out.Q_t = Mat::Zero(d, d);
  if (triple.Q.norm() > 0.0) {
    if (sg.kind == SemigroupSpec::Kind::DiagonalExp) {
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          if (triple.Q(i, j) != 0.0)
            out.Q_t(i, j) = triple.Q(i, j) * decay_weight(sg.rates[i] + sg.rates[j], t);
    } else {
      Mat M = Eigen::kroneckerProduct(Mat::Identity(d, d), sg.A).eval() +
              Eigen::kroneckerProduct(sg.A, Mat::Identity(d, d)).eval();
      Vec q = Eigen::Map<const Vec>(triple.Q.data(), d * d);
      Vec v = M.fullPivLu().solve(-q);
      Mat Qinf = Eigen::Map<Mat>(v.data(), d, d);
      out.Q_t = is_inf(t) ? Qinf : Mat((Qinf - sg.S(t) * Qinf * sg.S(t).transpose()).eval());
    }
  }
  // drift
  out.b_t = Vec::Zero(d);
  if (sg.kind == SemigroupSpec::Kind::DiagonalExp) {
    for (int i = 0; i < d; ++i)
      if (triple.b[i] != 0.0) out.b_t[i] = triple.b[i] * decay_weight(sg.rates[i], t);
  } else {
    if (is_inf(t))
      out.b_t = -sg.A.inverse() * triple.b;
    else
      out.b_t = sg.A.inverse() * (sg.S(t) - Mat::Identity(d, d)) * triple.b;
  }
  for (const auto& a : outer_atoms(triple.nu)) out.b_t += a.mass * indicator_drift(sg, t, a.point);
  return out;
}

namespace {

// One-dimensional integral of g against the symmetric stable measure
// c |y|^(-1-alpha) dy, assuming |g(y)| <= C min(1, y^2).
Estimate stable_measure_integral(double alpha, const std::function<double(double)>& g) {
  const double c = stable_levy_constant(alpha);
  // near the origin, substitute y = w^k to tame the |y|^(1-alpha) behaviour
  const int k = std::max(2, int(std::ceil(2.0 / (2.0 - alpha))));
  auto inner = [&](double sign) {
    return gk_adaptive(
        [&, sign](double w) {
          const double y = sign * std::pow(w, double(k));
          return g(y) * c * std::pow(std::abs(y), -1.0 - alpha) * double(k) *
                 std::pow(w, double(k) - 1.0);
        },
        0.0, 1.0, {1e-10, 1e-13, 6000});
  };
  auto outer = [&](double sign) {
    return integrate_tail([&, sign](double y) { return g(sign * y) * c * std::pow(y, -1.0 - alpha); },
                          1.0, false, {1e-10, 1e-13, 6000});
  };
  Estimate in_p = inner(1.0), in_m = inner(-1.0), out_p = outer(1.0), out_m = outer(-1.0);
  return {in_p.value + in_m.value + out_p.value + out_m.value,
          in_p.error + in_m.error + out_p.error + out_m.error};
}

// Expectation of g under the jump law of a compound Poisson part (d = 1 for
// the continuous laws).
Estimate jump_law_expectation(const LevyMeasureSpec& nu, const std::function<double(const Vec&)>& g,
                              const Mat& Sr) {
  switch (nu.jump_law) {
    case LevyMeasureSpec::JumpLaw::Dirac:
      return {g(Sr * nu.jump_point), 0.0};
    case LevyMeasureSpec::JumpLaw::Gaussian:
    case LevyMeasureSpec::JumpLaw::Laplace: {
      if (Sr.rows() != 1) throw NumericError("scalar jump expectation requires dimension 1");
      const double s = nu.jump_scale;
      const bool gauss = nu.jump_law == LevyMeasureSpec::JumpLaw::Gaussian;
      const double W = (gauss ? 9.5 : 42.0) * s;
      auto density = [&](double y) {
        return gauss ? std::exp(-0.5 * y * y / (s * s)) / (s * std::sqrt(2.0 * pi))
                     : std::exp(-std::abs(y) / s) / (2.0 * s);
      };
      // every g used here is smooth except possibly where |S(r) y| crosses
      // the unit ball (indicator truncations); seed that point as a split or
      // the panel error estimate is blind to the kink
      std::vector<double> splits{0.0};
      const double a = std::abs(Sr(0, 0));
      if (a > 0.0 && 1.0 / a < W) {
        splits.push_back(1.0 / a);
        splits.push_back(-1.0 / a);
      }
      return gk_adaptive(
          [&](double y) { return g(Vec::Constant(1, Sr(0, 0) * y)) * density(y); }, -W, W,
          {1e-11, 1e-14, 4000}, splits);
    }
  }
  throw NumericError("unknown jump law");
}

}  // namespace

Estimate jump_time_integral(const LevyTriple& triple, const SemigroupSpec& sg, double t,
                            const std::function<double(const Vec&)>& g) {
  const auto& nu = triple.nu;
  if (nu.is_zero()) return {0.0, 0.0};
  if (nu.kind == LevyMeasureSpec::Kind::SymmetricStable) {
    if (triple.dim() != 1) throw NumericError("stable jump integrals require dimension 1");
    // one-dimensional, so the semigroup acts as e^{-beta r} in either representation
    const double beta = sg.kind == SemigroupSpec::Kind::DiagonalExp ? sg.rates[0] : -sg.A(0, 0);
    const double factor = decay_weight(nu.alpha * beta, t) * std::pow(nu.scale, nu.alpha);
    Estimate base =
        stable_measure_integral(nu.alpha, [&](double y) { return g(Vec::Constant(1, y)); });
    return {factor * base.value, factor * base.error};
  }
  auto slice = [&](double r) -> double {
    const Mat Sr = sg.S(r);
    if (nu.kind == LevyMeasureSpec::Kind::FiniteAtoms) {
      double sum = 0.0;
      for (const auto& a : nu.atoms) sum += a.mass * g(Vec(Sr * a.point));
      return sum;
    }
    Estimate e = jump_law_expectation(nu, g, Sr);
    return nu.rate * e.value;
  };
  // the outer doubling tolerance stays above the inner expectation noise
  const double orel = 1e-9, oabs = 1e-12;
  if (is_inf(t)) {
    const double m = sg.min_rate();
    if (m <= 0.0) throw NumericError("time integral diverges: semigroup is not strictly stable");
    // windows [a, 2a]; the slice decays like the squared semigroup norm
    double total = 0.0, a = 0.0, w = 4.0 / m;
    for (int round = 0; round < 60; ++round) {
      double inc = gl_doubling(slice, a, a + w, orel, oabs);
      total += inc;
      if (round > 2 && std::abs(inc) <= 1e-11 * (1.0 + std::abs(total)))
        return {total, orel * (1.0 + std::abs(total))};
      a += w;
      w *= 2.0;
    }
    throw NumericError("jump time integral did not converge");
  }
  double v = gl_doubling(slice, 0.0, t, orel, oabs);
  return {v, orel * (1.0 + std::abs(v))};
}

HypothesesReport check_hypotheses_FR(const LevyTriple& triple, const SemigroupSpec& sg) {
  HypothesesReport rep;
  const double m = sg.min_rate();
  rep.semigroup_vanishes = m > 0.0 && sg.S(30.0 / m).norm() < 1e-9;

  auto converges = [&](auto&& value_at) {
    const double T = 80.0 / std::max(m, 0.25);
    const double v1 = value_at(T), v2 = value_at(2.0 * T);
    return std::abs(v2 - v1) <= 1e-8 * (1.0 + std::abs(v2));
  };

  if (rep.semigroup_vanishes) {
    rep.drift_converges = true;
    rep.trace_bounded = true;
    rep.trace_q_inf = characteristics_t(triple, sg, kInf).Q_t.trace();
    try {
      Estimate e = jump_time_integral(triple, sg, kInf, [](const Vec& y) {
        return std::min(1.0, y.squaredNorm());
      });
      rep.nu_inf_integrable = std::isfinite(e.value);
      rep.nu_inf_integral = e.value;
    } catch (const NumericError&) {
      rep.nu_inf_integrable = false;
    }
  } else {
    rep.drift_converges =
        converges([&](double T) { return characteristics_t(triple, sg, T).b_t.norm(); });
    rep.trace_bounded =
        converges([&](double T) { return characteristics_t(triple, sg, T).Q_t.trace(); });
    if (rep.trace_bounded)
      rep.trace_q_inf = characteristics_t(triple, sg, 160.0 / std::max(m, 0.25)).Q_t.trace();
    if (triple.nu.is_zero()) {
      rep.nu_inf_integrable = true;
    } else {
      auto mass_at = [&](double T) {
        return jump_time_integral(triple, sg, T,
                                  [](const Vec& y) { return std::min(1.0, y.squaredNorm()); })
            .value;
      };
      rep.nu_inf_integrable = converges(mass_at);
      if (rep.nu_inf_integrable) rep.nu_inf_integral = mass_at(160.0 / std::max(m, 0.25));
    }
  }

  // logarithmic moment of nu outside the unit ball
  switch (triple.nu.kind) {
    case LevyMeasureSpec::Kind::Zero:
      rep.log_moment = 0.0;
      break;
    case LevyMeasureSpec::Kind::SymmetricStable: {
      const double a = triple.nu.alpha, c = stable_levy_constant(a);
      rep.log_moment = 2.0 * c * std::pow(triple.nu.scale, a) *
                       integrate_tail([&](double y) { return std::log(y) * std::pow(y, -1.0 - a); },
                                      1.0, false, {})
                           .value;
      break;
    }
    case LevyMeasureSpec::Kind::FiniteAtoms:
      for (const auto& a : triple.nu.atoms)
        if (a.point.norm() > 1.0) rep.log_moment += a.mass * std::log(a.point.norm());
      break;
    case LevyMeasureSpec::Kind::CompoundPoisson: {
      auto g = [](const Vec& y) {
        const double n = y.norm();
        return n > 1.0 ? std::log(n) : 0.0;
      };
      rep.log_moment = triple.nu.rate * jump_law_expectation(triple.nu, g, Mat::Identity(triple.dim(), triple.dim())).value;
      break;
    }
  }
  rep.log_moment_finite = std::isfinite(rep.log_moment);
  return rep;
}

InvariantFactorization invariant_factorization(const LevyTriple& triple,
                                               const SemigroupSpec& sg) {
  HypothesesReport rep = check_hypotheses_FR(triple, sg);
  if (!rep.all()) throw NumericError("no invariant measure: stability hypotheses fail");
  InvariantFactorization fac;
  TimeCharacteristics ch = characteristics_t(triple, sg, kInf);
  fac.b_inf = ch.b_t;
  fac.Q_inf = ch.Q_t;
  fac.pi_is_point = triple.nu.is_zero();
  const LevyTriple trip = triple;
  const SemigroupSpec sgc = sg;
  const Vec b_inf = fac.b_inf;
  const Mat Q_inf = fac.Q_inf;
  fac.mu_charfn = [trip, sgc](const Vec& xi) {
    return std::exp(-integrated_exponent(trip, sgc, kInf, xi));
  };
  fac.pi_charfn = [trip, sgc, Q_inf](const Vec& xi) {
    const cd lam = integrated_exponent(trip, sgc, kInf, xi);
    return std::exp(cd(0.5 * xi.dot(Q_inf * xi), 0.0) - lam);
  };
  return fac;
}

double cameron_martin_norm(const Mat& T, const Mat& Q) {
  if (T.rows() != Q.rows() || T.cols() != Q.cols() || Q.rows() != Q.cols())
    throw ConfigError("operator/covariance dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> es(Q);
  const Vec lam = es.eigenvalues();
  const Mat U = es.eigenvectors();
  const double lmax = lam.maxCoeff();
  if (!(lmax > 0.0)) throw ConfigError("covariance is zero");
  const double cut = 1e-12 * lmax;
  std::vector<int> keep;
  for (int i = 0; i < lam.size(); ++i)
    if (lam[i] > cut) keep.push_back(i);
  const int r = int(keep.size());
  Mat Ur(Q.rows(), r);
  Vec lr(r);
  for (int j = 0; j < r; ++j) {
    Ur.col(j) = U.col(keep[j]);
    lr[j] = lam[keep[j]];
  }
  const Mat TUs = T * Ur * lr.cwiseSqrt().asDiagonal();  // images of an ON basis of the space
  if (r < Q.rows()) {
    Mat Uperp(Q.rows(), Q.rows() - r);
    int k = 0;
    for (int i = 0; i < lam.size(); ++i)
      if (lam[i] <= cut) Uperp.col(k++) = U.col(i);
    const double leak = (Uperp.transpose() * TUs).norm();
    if (leak > 1e-9 * (1.0 + TUs.norm()))
      throw NumericError("operator does not preserve the Cameron-Martin space");
  }
  const Mat B = lr.cwiseSqrt().cwiseInverse().asDiagonal() * (Ur.transpose() * TUs);
  return B.jacobiSvd().singularValues()[0];
}

double admissible_q(double p, double normTH) {
  if (!(p > 1.0)) throw ConfigError("source exponent must exceed 1");
  if (!(normTH > 0.0) || normTH > 1.0 + 1e-15)
    throw ConfigError("operator norm must lie in (0, 1]");
  return 1.0 + (p - 1.0) / (normTH * normTH);
}

double q0_rate(const SemigroupSpec& sg, const Mat& Q_inf, bool numeric) {
  if (!numeric && sg.kind == SemigroupSpec::Kind::DiagonalExp) return 2.0 * sg.rates.minCoeff();
  auto rate_at = [&](double h) {
    const double n = cameron_martin_norm(sg.S(h), Q_inf);
    return (1.0 / (n * n) - 1.0) / h;
  };
  double h = 0.1;
  double prev = rate_at(h);
  double extrap = prev;
  for (int k = 1; k <= 18; ++k) {
    h *= 0.5;
    const double cur = rate_at(h);
    extrap = 2.0 * cur - prev;  // first-order Richardson in h
    if (std::abs(cur - prev) <= 1e-7 * (1.0 + std::abs(cur)) && k > 6) break;
    prev = cur;
  }
  return extrap;
}

}  // namespace gms
