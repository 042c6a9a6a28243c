#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace gms {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Error taxonomy. ConfigError maps to CLI exit code 3; NumericError signals a
// computation that cannot produce a trustworthy value (as opposed to an
// inconclusive verdict, which is a regular result).
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

// Value with an attached absolute error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
  Estimate() = default;
  Estimate(double v, double e) : value(v), error(e) {}
};

inline bool nearly_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

}  // namespace gms
