#pragma once

// C^2 test functions with explicit derivative evaluators. The catalogue is
// the closed set of admissible battery members; battery files are TOML
// arrays of catalogue entries. Derivative evaluators are validated against
// finite differences on construction.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gms/common.hpp"
#include "gms/toml.hpp"

namespace gms {

struct SmoothTestFn {
  std::string name;
  bool bounded = true;
  bool positive = false;      // strictly positive everywhere
  double support_radius = 8;  // beyond this the function is flat or negligible
  double sup_bound = 1.0;     // bound on |f| (bounded functions only)
  double hess_bound = 1.0;    // bound on |f''| over the real line
  // bound on |int_a^b f| over arbitrary intervals; finite only for mean-zero
  // oscillatory members (cosines), where it sharpens heavy-tail remainder
  // bounds by one power of the horizon. 0 means unavailable.
  double osc_tail_bound = 0.0;
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::function<double(double)> deriv2;

  double operator()(double x) const { return value(x); }

  // Central finite differences at 5 seeded points; throws NumericError on a
  // relative mismatch above 1e-4.
  void check_derivatives(std::uint64_t seed = 11) const;
};

// catalogue ------------------------------------------------------------------
SmoothTestFn fn_constant(double c);
SmoothTestFn fn_gaussian_bump(double center, double width);
SmoothTestFn fn_cosine(double freq);
// exp(rate x), saturating smoothly at e^(+-30) to keep integrability
// certifiable; the cap is outside every quadrature window used here.
SmoothTestFn fn_exp_linear(double rate);
// (x^2 + reg^2)^(exponent/2); bounded iff exponent <= 0 (reg > 0 required)
SmoothTestFn fn_power(double exponent, double regularization);

std::vector<SmoothTestFn> battery_from_toml(const toml::Document& doc);
std::vector<SmoothTestFn> load_battery(const std::string& path);

}  // namespace gms
