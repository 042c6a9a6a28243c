#pragma once

// Mixed norm ||f||_{p,q} of a factorized pair (gamma, pi): the L^p(gamma)
// norm of the translate x -> f(x+y), raised to q/p and averaged in y against
// pi. Carries the inclusion chain L^q >= ||.||_{p,q} >= L^p, the lifting
// identity, and the strict-inclusion witnesses (regularized singular /
// truncated polynomial growth tables).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gms/grid_measure.hpp"
#include "gms/mehler.hpp"
#include "gms/report.hpp"
#include "gms/sampler.hpp"

namespace gms {

struct MixedNormParams {
  double p = 2.0;  // inner exponent
  double q = 2.0;  // outer exponent
};

// Inner/outer measure pair plus their lattice forms on a shared spacing.
// conv_w is the full uncropped discrete convolution of the two pmfs, so the
// Fubini identity between nested sums and convolved sums holds to roundoff.
struct Factorization {
  std::shared_ptr<const GridMeasure> gamma;  // inner measure
  std::shared_ptr<const GridMeasure> pi;     // outer measure (null if a point)
  std::optional<double> pi_point;            // degenerate outer measure

  double dx = 0.0;
  std::vector<double> gamma_w;  // plain pmf at gamma_x0 + j dx
  double gamma_x0 = 0.0;
  std::vector<double> pi_w;  // plain pmf at -pi_L + k dx
  double pi_L = 0.0;
  std::vector<double> conv_w;  // gamma_w (*) pi_w at conv_x0 + m dx
  double conv_x0 = 0.0;
  double defect = 0.0;  // slicing / normalization mass slop

  SamplerPtr gamma_sampler, pi_sampler;  // for the MC path

  // cached spectrum of gamma_w at the cross-correlation padding
  mutable std::shared_ptr<const std::vector<std::complex<double>>> gamma_spec;
};

// The model's invariant factorization (Gaussian part, jump part) as lattice
// measures on the shared model grid. Degenerate jump parts become pi_point.
Factorization factorization_of(const MehlerModel& m);

// A factorization from two grid measures; gamma is resampled onto pi's
// lattice when the spacings differ.
Factorization make_factorization(std::shared_ptr<const GridMeasure> gamma,
                                 std::shared_ptr<const GridMeasure> pi);

// Outer density c_alpha / (1 + |y|^alpha) on a grid, alpha in (1, 3). Tail
// indices in this range need not come from any stable law, so the density
// family is exposed directly.
GridMeasure heavy_tail_pi(double alpha, double L, std::size_t n);

enum class NormMethod { Grid, Mc };

struct NormResult {
  double value = 0.0;
  double error = 0.0;
  bool in_space = true;   // false: some inner integral diverged
  double witness_y = 0.0;  // outer location of the divergence
};

// (int (int |f(x+y)|^p dgamma(x))^{q/p} dpi(y))^{1/q}. Grid method: one FFT
// cross-correlation for the inner norms on the outer lattice, Richardson
// error estimates on both lattices. MC method: nested sampling with
// delta-method error propagation.
NormResult mixed_norm(const std::function<double(double)>& f, const Factorization& fac,
                      const MixedNormParams& pr, NormMethod method = NormMethod::Grid,
                      const McOptions& mc = {});

// ||f||_{L^r(gamma*pi)} on the same lattice data (the uncropped convolution).
NormResult lr_norm(const std::function<double(double)>& f, const Factorization& fac, double r);

// ||f||_{L^q} >= ||f||_{p,q} and ||f||_{p,q} >= ||f||_{L^p}, one report each.
std::vector<InequalityReport> check_inclusion_chain(const std::function<double(double)>& f,
                                                    const Factorization& fac, double p, double q,
                                                    const std::string& label = "");

// ||g||_{L^r(gamma*pi)}^r vs the nested double integral of |g(x+y)|^r: the
// same lattice sum through two pipelines (convolve-then-integrate vs
// nest-then-integrate). lhs/rhs are the two values; the note records the
// relative gap.
InequalityReport lift_norm_identity(const std::function<double(double)>& g,
                                    const Factorization& fac, double r,
                                    const std::string& label = "");

struct WitnessSpec {
  enum class Kind { Singular, Polynomial };
  Kind kind = Kind::Singular;
  double beta = 0.45;   // singular: f_eps(x) = min(|x|^-beta, eps^-beta)
  double omega = 0.2;   // polynomial: g_R(x) = |x|^omega on |x| <= R
  double alpha = 1.5;   // polynomial: outer tail index
  double p = 2.0;
  double q = 4.0;
  int levels = 4;       // eps decades from 1e-14 down / R decades from 1e9 up
};

// Per-level norms of the witness against gamma = N(0,1) and pi = Cauchy(1)
// (singular) or the heavy-tail family (polynomial), by direct log-warped
// quadrature against the closed densities; no lattice can resolve the
// regularization scales involved. In the returned rows lq_norm carries the
// Lebesgue norm of the level (L^q for singular, L^p for polynomial) and
// xpq_norm the mixed norm; ratio is the level-over-level growth of whichever
// column diverges for the kind (0 on the first row).
std::vector<GrowthRow> strictness_witness(const WitnessSpec& w);

}  // namespace gms
