#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "gms/common.hpp"

namespace gms {

// Probability measure with a density tabulated on a uniform grid over the
// symmetric window [-L, L). After construction the density is nonnegative
// and trapezoid-normalized to unit mass; `mass_defect` records how much mass
// was clipped, cropped or missing before renormalization.
class GridMeasure {
 public:
  GridMeasure() = default;
  // Takes raw density samples at x_i = -L + i*dx, dx = 2L/n. Clips small
  // negative ripple (anything below -1e-6 of the peak is an error), then
  // renormalizes.
  GridMeasure(double L, std::vector<double> density);

  double L() const { return L_; }
  double dx() const { return dx_; }
  std::size_t size() const { return density_.size(); }
  double x(std::size_t i) const { return -L_ + double(i) * dx_; }
  const std::vector<double>& density() const { return density_; }
  double mass_defect() const { return mass_defect_; }

  // Trapezoid mass of the stored density (1 up to roundoff).
  double mass() const;

  // Cubic interpolation; zero outside the window.
  double density_at(double x) const;

  // Trapezoid integral of f against the measure, with an error estimate from
  // grid-halving plus the recorded mass defect.
  Estimate integrate(const std::function<double(double)>& f) const;

  // Characteristic function by direct summation at an arbitrary frequency.
  std::complex<double> char_fn(double xi) const;

  // Mean / variance under the grid density.
  double mean() const;
  double variance() const;

  // Inverse CDF with linear interpolation inside cells (for sampling).
  double quantile(double u) const;

  void save_csv(const std::string& path) const;
  static GridMeasure load_csv(const std::string& path);

 private:
  friend GridMeasure convolve(const GridMeasure&, const GridMeasure&);
  void ensure_cdf() const;

  double L_ = 0.0, dx_ = 0.0;
  std::vector<double> density_;
  double mass_defect_ = 0.0;
  mutable std::vector<double> cdf_;  // lazy, for quantile()
};

// Fourier inversion of a characteristic function onto [-L, L) with n grid
// points (n a power of two). Fails if phi has not decayed at the dual
// boundary (Dirac-like part), if the result is materially non-Hermitian, or
// if mass piles up at the window edge (aliasing; enlarge L).
GridMeasure invert_charfn(const std::function<std::complex<double>(double)>& phi, double L,
                          std::size_t n);

// Linear FFT convolution of two measures on identical grids; the result is
// cropped back to the common window and renormalized (cropped mass is added
// to mass_defect).
GridMeasure convolve(const GridMeasure& a, const GridMeasure& b);

}  // namespace gms
