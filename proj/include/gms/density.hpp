#pragma once

// Pointwise density evaluators: closed-form laws and tabulated symmetric
// densities with power-law tails usable over many decades of the argument.

#include <functional>
#include <vector>

#include "gms/common.hpp"

namespace gms {

double gaussian_pdf(double x, double mean = 0.0, double sd = 1.0);
double cauchy_pdf(double x, double scale = 1.0);
double laplace_pdf(double x, double scale = 1.0);

// Symmetric even density interpolated from a fine linear table near the
// origin and a log-log table out to x_max, extended beyond x_max by the
// power law fitted at the last two log nodes. Also integrates its own upper
// tail so that P(|X| > x) is available at the same accuracy.
class SymmetricDensity {
 public:
  SymmetricDensity(const std::function<double(double)>& pdf, double x_lin, double x_max,
                   int n_lin = 2048, int n_log = 512);

  double operator()(double x) const;
  double upper_tail_mass(double x) const;  // integral over (x, inf) for x >= 0
  double tail_exponent() const { return tail_slope_; }

 private:
  double x_lin_, x_max_, dx_;
  std::vector<double> lin_;       // values on [0, x_lin]
  std::vector<double> log_t_;     // log-abscissae on [log x_lin, log x_max]
  std::vector<double> log_v_;     // log-densities at those abscissae
  double tail_slope_, tail_coef_; // density ~ tail_coef * x^tail_slope beyond x_max
  std::vector<double> tail_lin_;  // upper tail mass at linear nodes
  std::vector<double> tail_log_;  // upper tail mass at log nodes
};

// Convolution N(0, sigma^2) * Cauchy(scale), evaluated by adaptive quadrature
// and tabulated. Valid over |x| up to x_max.
SymmetricDensity voigt_density(double sigma, double cauchy_scale, double x_max = 1e9);

}  // namespace gms
