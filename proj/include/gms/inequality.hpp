#pragma once

// Entropy / divergence functionals and the inequality checkers built on the
// semigroup: hypercontractivity in both orientations, the classical-failure
// demonstration, weak hypercontractivity, the two modified log-Sobolev
// inequalities, and the Wang-condition comparison.

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "gms/mehler.hpp"
#include "gms/mixed_norm.hpp"
#include "gms/report.hpp"
#include "gms/test_fn.hpp"

namespace gms {

// Ent_m(psi) = int psi ln psi dm - (int psi dm) ln(int psi dm), 0 ln 0 = 0.
// Requires psi >= 0 with finite positive total mass.
Estimate entropy(const std::function<double(double)>& psi, const GridMeasure& m);
// exact finite version for pmf weights
double entropy_pmf(const std::vector<double>& psi, const std::vector<double>& weights);

struct DivergenceKind {
  enum class Tag { PowerBregman, KullbackLeibler };
  Tag tag = Tag::PowerBregman;
  double r = 2.0;  // PowerBregman exponent, > 1

  static DivergenceKind power(double r);
  static DivergenceKind kl();
};

// Bregman gap of |.|^r, or KL(x,y) = y - x + x(ln x - ln y); both vanish on
// the diagonal and are nonnegative.
double divergence(const DivergenceKind& kind, double x, double y);

// model-level shorthand for cameron_martin_norm(S(t), Q_inf)
double cameron_martin_norm(const MehlerModel& m, double t);

// q0 = liminf (cm(h)^{-2} - 1)/h with the source recorded: analytic from the
// diagonal rates, or the dyadic Richardson estimator when forced / required.
struct QZeroResult {
  double value = 0.0;
  bool analytic = false;
};
QZeroResult q0_rate(const MehlerModel& m, bool force_numeric = false);

// Shared measure data for a model: built once, reused across a sweep.
struct InequalityContext {
  const MehlerModel* model = nullptr;
  Factorization fac;
  std::shared_ptr<const GridMeasure> inv;
};
InequalityContext make_context(const MehlerModel& m);

// ||P(t)f||_{L^q(gamma*pi)} <= ||f||_{p,q} for q in [p, ceiling]
InequalityReport check_hyper_forward(const InequalityContext& c, const SmoothTestFn& f, double t,
                                     double p, double q);
// ||P(t)f||_{p,r} <= ||f||_{L^r(gamma*pi)} for p in [r, ceiling]
InequalityReport check_hyper_reverse(const InequalityContext& c, const SmoothTestFn& f, double t,
                                     double r, double p);
// ||e^{P(t)f}||_{q,1} <= ||e^f||_{L^1(gamma*pi)} for q in [1, cm^{-2}]
InequalityReport check_weak_hyper(const InequalityContext& c, const SmoothTestFn& f, double t,
                                  double q);

struct LogSobMode {
  enum class Kind { Power, Kl };
  Kind kind = Kind::Power;
  double r = 2.0;  // Power only; proven for r >= 2, below 2 needs inf f > 0
};

// Power: int Ent_gamma |f(.+y)|^r dpi <= r^2/(2 q0) int |f|^{r-2} <QDf,Df>
//   + r/((r-1) q0) double nu-integral of the |.|^r Bregman gap.
// Kl: the same shape for e^f with the KL divergence.
InequalityReport check_logsob(const InequalityContext& c, const SmoothTestFn& f,
                              const LogSobMode& mode);

// Capped-power growth demonstration: f = min(|x|^eps, cap) with cap swept
// over decades; the L^q norm of P(t)f must keep growing while ||f||_{L^p}
// settles. rows: lq_norm = the growing column, xpq_norm = the stable L^p.
struct FailureDemo {
  std::vector<GrowthRow> rows;
  double eps = 0.0;
  bool slow_divergence = false;  // eps at the lower window edge: log growth
  InequalityReport summary;      // rhs = weakest per-decade ratio, lhs = bar
};
FailureDemo demonstrate_classical_failure(const InequalityContext& c, double t, double p,
                                          double q, int levels,
                                          double eps_override = std::numeric_limits<double>::quiet_NaN());

// Density-ratio hypercontractivity constant: Phi_{t,p'} tabulated from the
// mu_t density, C(t,p',eps) by the double integral against gamma*pi, plus
// the threshold time of the norm-comparison bound.
struct WangResult {
  bool diverged = false;
  double C = std::numeric_limits<double>::infinity();
  double C_error = 0.0;
  double threshold_t = 0.0;
  InequalityReport hyp;  // ||P(t)f||_{L^{p(1+eps)}} vs C^{1/(p(1+eps))} ||f||_{L^p}
};
WangResult wang_condition(const InequalityContext& c, double t, double p, double eps,
                          const SmoothTestFn* probe = nullptr);

}  // namespace gms
