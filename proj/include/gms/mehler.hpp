#pragma once

// Ornstein-Uhlenbeck type semigroup driven by a Levy triple: P(t)f(x) =
// int f(S(t)x + y) dmu_t(y). The model owns the time-t marginals (grids and
// samplers, dimension 1 for grids), the invariant factorization, the
// generator on smooth test functions, and the structural checks.

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gms/grid_measure.hpp"
#include "gms/interp.hpp"
#include "gms/levy.hpp"
#include "gms/report.hpp"
#include "gms/sampler.hpp"
#include "gms/test_fn.hpp"
#include "gms/toml.hpp"

namespace gms {

struct ModelSpec {
  std::string name;
  LevyTriple triple;
  SemigroupSpec sgroup;
  double grid_L = 0.0;     // 0: pick from the tail class
  std::size_t grid_n = 0;  // 0: pick from the tail class

  static ModelSpec from_doc(const toml::Document& doc, const std::string& origin);
  static ModelSpec from_file(const std::string& path);
};

class MehlerModel {
 public:
  explicit MehlerModel(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  const LevyTriple& triple() const { return spec_.triple; }
  const SemigroupSpec& sgroup() const { return spec_.sgroup; }
  int dim() const { return spec_.triple.dim(); }
  const HypothesesReport& hypotheses() const { return hyp_; }
  // throws Error when the convergence hypotheses fail (no stationary law)
  const InvariantFactorization& factorization() const;

  Mat S(double t) const { return spec_.sgroup.S(t); }
  double S1(double t) const;  // dimension-1 shorthand
  std::complex<double> mu_t_charfn(double t, const Vec& xi) const;
  std::complex<double> mu_t_charfn1(double t, double xi) const;

  bool heavy_tailed() const { return heavy_; }
  double grid_L() const { return L_; }
  std::size_t grid_n() const { return n_; }

  // Grid materializations (dimension 1, shared geometry, cached).
  std::shared_ptr<const GridMeasure> mu_t_grid(double t) const;
  std::shared_ptr<const GridMeasure> gamma_grid() const;      // N(0, Q_inf)
  std::shared_ptr<const GridMeasure> pi_grid() const;         // jump factor
  std::shared_ptr<const GridMeasure> invariant_grid() const;  // gamma * pi

  SamplerPtr mu_t_sampler(double t) const;
  SamplerPtr invariant_sampler() const;

  bool pi_is_point() const;
  double pi_point() const;  // the shift carried by a degenerate jump factor

 private:
  ModelSpec spec_;
  HypothesesReport hyp_;
  std::optional<InvariantFactorization> inv_;
  bool heavy_ = false;
  double L_ = 0.0;
  std::size_t n_ = 0;

  mutable std::mutex mu_;
  mutable std::map<double, std::shared_ptr<const GridMeasure>> grid_cache_;
  mutable std::map<double, SamplerPtr> sampler_cache_;
  mutable std::shared_ptr<const GridMeasure> gamma_g_, pi_g_, inv_g_;
  mutable SamplerPtr inv_sampler_;
};

// P(t)f(x) by quadrature against the tabulated mu_t density.
Estimate apply_semigroup(const MehlerModel& m, const std::function<double(double)>& f, double t,
                         double x);

struct McOptions {
  std::size_t count = 100000;
  std::uint64_t seed = 1;
};

// P(t)f(x) by Monte Carlo over mu_t draws; error is the standard error.
Estimate apply_semigroup_mc(const MehlerModel& m, const std::function<double(double)>& f,
                            double t, double x, const McOptions& opt);

// h(z) = int f(z + y) dmu_t(y) tabulated on the model grid by one linear
// convolution; P(t)f(x) = h(S(t)x). Used by every norm computation.
TableFn semigroup_convolution_table(const MehlerModel& m,
                                    const std::function<double(double)>& f, double t);

// Convenience: P(t)f as a callable built on the convolution table.
std::function<double(double)> semigroup_fn(const MehlerModel& m,
                                           const std::function<double(double)>& f, double t);

// Generator on a smooth test function at a point (dimension 1):
// 1/2 Q f'' + (A x + b) f' + compensated jump integral. The small-jump part
// below the cut is bounded by Taylor and folded into the error estimate; the
// cut starts at 1e-3 * scale and halves toward a rounding-noise floor until
// that bound is below 1e-8.
Estimate apply_generator(const MehlerModel& m, const SmoothTestFn& f, double x);

// max over the xi grid of |mu_hat_{t+s}(xi) - mu_hat_t(S(s)^T xi) mu_hat_s(xi)|
InequalityReport check_skew_convolution(const MehlerModel& m, double t, double s,
                                        const std::vector<double>& xi_grid);

// Per battery member: |int L f dmu| (generator form) and
// |int P(t)f dmu - int f dmu| (semigroup form), with quadrature budgets.
std::vector<InequalityReport> check_invariance(const MehlerModel& m,
                                               const std::vector<SmoothTestFn>& battery,
                                               double t = 0.5);

}  // namespace gms
