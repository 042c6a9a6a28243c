#pragma once

// Levy triples, exponentially stable semigroups, characteristic exponents,
// time-integrated characteristics and the invariant-measure factorization.

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "gms/common.hpp"

namespace gms {

struct LevyMeasureSpec {
  enum class Kind { Zero, SymmetricStable, FiniteAtoms, CompoundPoisson };
  enum class JumpLaw { Gaussian, Laplace, Dirac };

  Kind kind = Kind::Zero;

  // SymmetricStable (dimension 1): density c_alpha * scale^alpha * |y|^(-1-alpha)
  double alpha = 1.0;
  double scale = 1.0;

  // FiniteAtoms
  struct Atom {
    Vec point;
    double mass;
  };
  std::vector<Atom> atoms;

  // CompoundPoisson: intensity `rate` times a jump distribution
  double rate = 0.0;
  JumpLaw jump_law = JumpLaw::Laplace;
  double jump_scale = 1.0;  // Gaussian sd / Laplace scale
  Vec jump_point;           // Dirac

  static LevyMeasureSpec zero();
  static LevyMeasureSpec symmetric_stable(double alpha, double scale);
  static LevyMeasureSpec finite_atoms(std::vector<Atom> atoms);
  static LevyMeasureSpec compound_poisson_laplace(double rate, double jump_scale);
  static LevyMeasureSpec compound_poisson_gaussian(double rate, double jump_sd);
  static LevyMeasureSpec compound_poisson_dirac(double rate, Vec point);

  bool is_zero() const { return kind == Kind::Zero; }
  bool is_symmetric() const;
  void validate(int dim) const;
};

struct LevyTriple {
  Vec b;              // drift
  Mat Q;              // Gaussian covariance (symmetric PSD)
  LevyMeasureSpec nu;

  int dim() const { return int(b.size()); }
  void validate() const;
};

struct SemigroupSpec {
  enum class Kind { DiagonalExp, MatrixGenerator };
  Kind kind = Kind::DiagonalExp;
  Vec rates;  // DiagonalExp: S(t) = diag(exp(-rates_i t)), rates_i >= 0
  Mat A;      // MatrixGenerator: S(t) = exp(tA), spectral abscissa < 0 enforced

  static SemigroupSpec diagonal(Vec rates);
  static SemigroupSpec matrix(Mat A);

  int dim() const;
  Mat S(double t) const;
  bool scalar_rate() const;  // DiagonalExp with all rates equal
  double min_rate() const;   // slowest decay (diag) or -spectral abscissa (matrix)
  bool strictly_stable() const { return min_rate() > 0.0; }
};

// Levy-Khinchine exponent of the triple at frequency xi (small-jump
// compensated inside the unit ball).
std::complex<double> char_exponent(const LevyTriple& triple, const Vec& xi);

// Normalizer for the symmetric alpha-stable Levy density: the unique c with
// int (1 - cos y) c |y|^(-1-alpha) dy = 1. Computed by adaptive quadrature
// (series near 0, asymptotic oscillatory tail) and cached per alpha.
double stable_levy_constant(double alpha);

// Exponent of the time-t marginal: Lambda_t(xi) = int_0^t lambda(S(r)^T xi) dr.
// Pass t = infinity for the invariant exponent (requires strict stability).
// Closed forms are used for diagonal semigroups where available; otherwise a
// panel-doubling Gauss-Legendre quadrature in r.
std::complex<double> integrated_exponent(const LevyTriple& triple, const SemigroupSpec& sg,
                                         double t, const Vec& xi);

std::complex<double> char_fn_mu_t(const LevyTriple& triple, const SemigroupSpec& sg, double t,
                                  const Vec& xi);

struct TimeCharacteristics {
  Vec b_t;
  Mat Q_t;
};

// Drift and covariance of mu_t in the compensated convention (the drift
// includes the indicator-difference correction for asymmetric jump parts).
// t = infinity allowed for strictly stable semigroups.
TimeCharacteristics characteristics_t(const LevyTriple& triple, const SemigroupSpec& sg,
                                      double t);

// int_0^t int g(S(r) y) nu(dy) dr for g dominated by min(1, |y|^2) near zero.
// Dimension 1 for quadrature-backed kinds; atoms work in any dimension.
Estimate jump_time_integral(const LevyTriple& triple, const SemigroupSpec& sg, double t,
                            const std::function<double(const Vec&)>& g);

struct HypothesesReport {
  bool drift_converges = false;
  bool trace_bounded = false;
  bool nu_inf_integrable = false;
  bool semigroup_vanishes = false;
  bool log_moment_finite = false;
  double trace_q_inf = 0.0;
  double nu_inf_integral = 0.0;
  double log_moment = 0.0;
  bool all() const {
    return drift_converges && trace_bounded && nu_inf_integrable && semigroup_vanishes;
  }
};

HypothesesReport check_hypotheses_FR(const LevyTriple& triple, const SemigroupSpec& sg);

struct InvariantFactorization {
  Vec b_inf;
  Mat Q_inf;  // covariance of the Gaussian factor
  // characteristic function of the jump factor (includes the b_inf shift)
  std::function<std::complex<double>(const Vec&)> pi_charfn;
  // characteristic function of the full invariant measure
  std::function<std::complex<double>(const Vec&)> mu_charfn;
  bool pi_is_point = false;  // nu == 0: pi degenerates to the point b_inf
};

InvariantFactorization invariant_factorization(const LevyTriple& triple,
                                               const SemigroupSpec& sg);

// Operator norm of x -> T x restricted to the Cameron-Martin space of
// N(0, Q); norm of Q^(-1/2) T Q^(1/2) on the range of Q. Throws if T does not
// leave the Cameron-Martin space invariant.
double cameron_martin_norm(const Mat& T, const Mat& Q);

// Largest Nelson-admissible target exponent 1 + (p-1)/normTH^2.
double admissible_q(double p, double normTH);

// Hypercontractivity rate q0 = liminf_{h->0+} (|S(h)|_H^{-2} - 1)/h.
// Analytic for DiagonalExp (2 min rates); Dini-type dyadic estimator on
// h = h0 2^(-k) otherwise.
double q0_rate(const SemigroupSpec& sg, const Mat& Q_inf, bool numeric = false);

}  // namespace gms
