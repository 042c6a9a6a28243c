#include "gms/density.hpp"

#include <cmath>

#include "gms/quadrature.hpp"

namespace gms {

double gaussian_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * pi));
}

double cauchy_pdf(double x, double scale) {
  return scale / (pi * (x * x + scale * scale));
}

double laplace_pdf(double x, double scale) {
  return std::exp(-std::abs(x) / scale) / (2.0 * scale);
}

SymmetricDensity::SymmetricDensity(const std::function<double(double)>& pdf, double x_lin,
                                   double x_max, int n_lin, int n_log)
    : x_lin_(x_lin), x_max_(x_max) {
  if (!(x_lin > 0.0) || !(x_max > 2.0 * x_lin)) throw ConfigError("bad tabulation window");
  dx_ = x_lin / n_lin;
  lin_.resize(n_lin + 1);
  for (int i = 0; i <= n_lin; ++i) lin_[i] = pdf(i * dx_);

  const double t0 = std::log(x_lin), t1 = std::log(x_max);
  const double dt = (t1 - t0) / n_log;
  log_t_.resize(n_log + 1);
  log_v_.resize(n_log + 1);
  for (int i = 0; i <= n_log; ++i) {
    log_t_[i] = t0 + i * dt;
    const double v = pdf(std::exp(log_t_[i]));
    if (!(v > 0.0)) throw NumericError("density not positive on the tabulation range");
    log_v_[i] = std::log(v);
  }

  tail_slope_ = (log_v_[n_log] - log_v_[n_log - 1]) / dt;
  if (tail_slope_ >= -1.0) throw NumericError("tabulated tail is not integrable");
  tail_coef_ = std::exp(log_v_[n_log]) * std::pow(x_max, -tail_slope_);

  // accumulate the upper tail mass right to left
  tail_log_.assign(n_log + 1, 0.0);
  tail_log_[n_log] = tail_coef_ * std::pow(x_max, tail_slope_ + 1.0) / (-tail_slope_ - 1.0);
  for (int i = n_log; i-- > 0;) {
    const double xa = std::exp(log_t_[i]), xb = std::exp(log_t_[i + 1]);
    const double fa = std::exp(log_v_[i]), fb = std::exp(log_v_[i + 1]);
    // exact integral of the local power interpolant
    const double m = (log_v_[i + 1] - log_v_[i]) / dt;
    double piece;
    if (std::abs(m + 1.0) > 1e-9)
      piece = (fb * xb - fa * xa) / (m + 1.0);
    else
      piece = fa * xa * dt;
    tail_log_[i] = tail_log_[i + 1] + piece;
  }
  tail_lin_.assign(n_lin + 1, 0.0);
  tail_lin_[n_lin] = tail_log_[0];
  for (int i = n_lin; i-- > 0;)
    tail_lin_[i] = tail_lin_[i + 1] + 0.5 * dx_ * (lin_[i] + lin_[i + 1]);
}

double SymmetricDensity::operator()(double x) const {
  x = std::abs(x);
  if (x <= x_lin_) {
    const double u = x / dx_;
    const int i = std::min(int(u), int(lin_.size()) - 2);
    const double w = u - i;
    return (1.0 - w) * lin_[i] + w * lin_[i + 1];
  }
  if (x <= x_max_) {
    const double t = std::log(x);
    const double dt = log_t_[1] - log_t_[0];
    const double u = (t - log_t_[0]) / dt;
    const int i = std::min(int(u), int(log_v_.size()) - 2);
    const double w = u - i;
    return std::exp((1.0 - w) * log_v_[i] + w * log_v_[i + 1]);
  }
  return tail_coef_ * std::pow(x, tail_slope_);
}

double SymmetricDensity::upper_tail_mass(double x) const {
  x = std::abs(x);
  if (x <= x_lin_) {
    const double u = x / dx_;
    const int i = std::min(int(u), int(tail_lin_.size()) - 2);
    const double w = u - i;
    return (1.0 - w) * tail_lin_[i] + w * tail_lin_[i + 1];
  }
  if (x <= x_max_) {
    const double t = std::log(x);
    const double dt = log_t_[1] - log_t_[0];
    const double u = (t - log_t_[0]) / dt;
    const int i = std::min(int(u), int(tail_log_.size()) - 2);
    const double w = u - i;
    // interpolate the log of the mass: it is itself close to a power law
    return std::exp((1.0 - w) * std::log(tail_log_[i]) + w * std::log(tail_log_[i + 1]));
  }
  return tail_coef_ * std::pow(x, tail_slope_ + 1.0) / (-tail_slope_ - 1.0);
}

SymmetricDensity voigt_density(double sigma, double cauchy_scale, double x_max) {
  if (!(sigma > 0.0) || !(cauchy_scale > 0.0)) throw ConfigError("scales must be positive");
  const double s = sigma, g = cauchy_scale;
  auto pdf = [s, g](double x) {
    // int phi_s(u) cauchy_g(x - u) du; the Gaussian factor localizes u.
    // Pure relative tolerance: far-field values are many orders below 1.
    Estimate e = gk_adaptive(
        [&](double u) { return gaussian_pdf(u, 0.0, s) * cauchy_pdf(x - u, g); }, -10.0 * s,
        10.0 * s, {1e-11, 1e-300, 4000}, {std::clamp(x, -10.0 * s, 10.0 * s)});
    return e.value;
  };
  return SymmetricDensity(pdf, 8.0 * (s + g), x_max);
}

}  // namespace gms
