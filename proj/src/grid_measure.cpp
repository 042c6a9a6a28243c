#include "gms/grid_measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gms/fft.hpp"

namespace gms {

GridMeasure::GridMeasure(double L, std::vector<double> density) : L_(L), density_(std::move(density)) {
  const std::size_t n = density_.size();
  if (n < 8) throw NumericError("GridMeasure: grid too small");
  if (!(L > 0)) throw NumericError("GridMeasure: window must be positive");
  dx_ = 2.0 * L / double(n);

  double peak = 0.0;
  for (double v : density_) peak = std::max(peak, v);
  if (!(peak > 0)) throw NumericError("GridMeasure: density is identically zero");
  double clipped = 0.0;
  for (double& v : density_) {
    if (v < 0.0) {
      if (v < -1e-6 * peak)
        throw NumericError("GridMeasure: density has a material negative part");
      clipped -= v * dx_;
      v = 0.0;
    }
  }

  double raw = mass();
  if (!(raw > 0)) throw NumericError("GridMeasure: zero mass");
  mass_defect_ = std::abs(1.0 - raw) + clipped;
  for (double& v : density_) v /= raw;
}

double GridMeasure::mass() const {
  double s = 0.0;
  for (double v : density_) s += v;
  s -= 0.5 * (density_.front() + density_.back());
  return s * dx_;
}

double GridMeasure::density_at(double x) const {
  double t = (x + L_) / dx_;
  if (t < 0.0 || t >= double(density_.size() - 1)) return 0.0;
  std::size_t i = std::size_t(t);
  double u = t - double(i);
  // Catmull-Rom: the sag bias of linear cells is O(dx^2 rho'') and shows up
  // as a systematic error in integrals against the density
  const std::size_t n = density_.size();
  const double p0 = density_[i > 0 ? i - 1 : 0];
  const double p1 = density_[i];
  const double p2 = density_[i + 1];
  const double p3 = density_[i + 2 < n ? i + 2 : n - 1];
  return p1 + 0.5 * u *
                  (p2 - p0 +
                   u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + u * (3.0 * (p1 - p2) + p3 - p0)));
}

Estimate GridMeasure::integrate(const std::function<double(double)>& f) const {
  const std::size_t n = density_.size();
  double full = 0.0, maxabs = 0.0;
  std::vector<double> fv(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = f(x(i));
    if (!std::isfinite(v)) throw NumericError("GridMeasure::integrate: non-finite integrand");
    fv[i] = v;
    maxabs = std::max(maxabs, std::abs(v));
    double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    full += w * v * density_[i];
  }
  full *= dx_;
  // coarse (stride-2) comparison for a discretization error estimate
  double half = 0.0;
  for (std::size_t i = 0; i < n; i += 2) {
    double w = (i == 0 || i + 2 >= n) ? 0.5 : 1.0;
    half += w * fv[i] * density_[i];
  }
  half *= 2.0 * dx_;
  double err = std::abs(full - half) / 3.0 + mass_defect_ * maxabs + 1e-15 * maxabs;
  return {full, err};
}

std::complex<double> GridMeasure::char_fn(double xi) const {
  std::complex<double> acc(0.0, 0.0);
  const std::size_t n = density_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    double ang = xi * x(i);
    acc += w * density_[i] * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return acc * dx_;
}

double GridMeasure::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < density_.size(); ++i) {
    double w = (i == 0 || i + 1 == density_.size()) ? 0.5 : 1.0;
    s += w * x(i) * density_[i];
  }
  return s * dx_;
}

double GridMeasure::variance() const {
  double mu = mean(), s = 0.0;
  for (std::size_t i = 0; i < density_.size(); ++i) {
    double w = (i == 0 || i + 1 == density_.size()) ? 0.5 : 1.0;
    double d = x(i) - mu;
    s += w * d * d * density_[i];
  }
  return s * dx_;
}

void GridMeasure::ensure_cdf() const {
  if (!cdf_.empty()) return;
  cdf_.resize(density_.size());
  double acc = 0.0;
  cdf_[0] = 0.0;
  for (std::size_t i = 1; i < density_.size(); ++i) {
    acc += 0.5 * (density_[i - 1] + density_[i]) * dx_;
    cdf_[i] = acc;
  }
  for (double& c : cdf_) c /= acc;  // exact unit range for quantile lookup
}

double GridMeasure::quantile(double u) const {
  ensure_cdf();
  u = std::min(std::max(u, 0.0), 1.0);
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.begin()) return x(0);
  std::size_t i = std::size_t(it - cdf_.begin());
  if (i >= cdf_.size()) return x(cdf_.size() - 1);
  double c0 = cdf_[i - 1], c1 = cdf_[i];
  double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
  return x(i - 1) + frac * dx_;
}

void GridMeasure::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "x,density\n";
  out.precision(17);
  for (std::size_t i = 0; i < density_.size(); ++i) out << x(i) << "," << density_[i] << "\n";
}

GridMeasure GridMeasure::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  std::vector<double> xs, ds;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.find("x,") == 0 || line.find("x ,") == 0) continue;  // header
    }
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b))
      throw ConfigError(path + ": malformed CSV line: " + line);
    xs.push_back(std::stod(a));
    ds.push_back(std::stod(b));
  }
  if (xs.size() < 8) throw ConfigError(path + ": too few grid points");
  double dx = xs[1] - xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - xs[i - 1] - dx) > 1e-9 * std::max(1.0, std::abs(dx)))
      throw ConfigError(path + ": grid is not uniform");
  // window must be symmetric since convolution assumes it
  double L = -xs[0];
  if (std::abs(xs.back() + xs[0] - (-dx)) > 1e-6 * L + 1e-12)
    throw ConfigError(path + ": grid must cover a symmetric window [-L, L)");
  return GridMeasure(L, std::move(ds));
}

GridMeasure invert_charfn(const std::function<std::complex<double>(double)>& phi, double L,
                          std::size_t n) {
  if (!fft::is_pow2(n)) throw NumericError("invert_charfn: n must be a power of two");
  if (!(L > 0)) throw NumericError("invert_charfn: L must be positive");
  const double dxi = pi / L;
  const double xi_max = double(n / 2) * dxi;

  double edge = std::max(std::abs(phi(-xi_max)), std::abs(phi(xi_max * (1.0 - 2.0 / double(n)))));
  if (edge > 1e-3)
    throw NumericError(
        "invert_charfn: characteristic function has not decayed at the dual boundary "
        "(Dirac-like component or insufficient resolution); increase n or reduce L");

  std::vector<fft::cd> a(n);
  const std::ptrdiff_t half = std::ptrdiff_t(n / 2);
  for (std::size_t j = 0; j < n; ++j) {
    std::ptrdiff_t m = std::ptrdiff_t(j) - half;
    double sign = (m & 1) ? -1.0 : 1.0;
    a[j] = sign * phi(double(m) * dxi);
  }
  fft::transform(a, false);

  std::vector<double> dens(n);
  double peak = 0.0, imax = 0.0;
  const double scale = dxi / (2.0 * pi);
  for (std::size_t i = 0; i < n; ++i) {
    double sign = (i & 1) ? -1.0 : 1.0;
    fft::cd v = scale * sign * a[i];
    dens[i] = v.real();
    peak = std::max(peak, std::abs(v.real()));
    imax = std::max(imax, std::abs(v.imag()));
  }
  if (imax > 1e-8 * peak)
    throw NumericError("invert_charfn: inversion is not real (char fn not Hermitian)");

  double boundary = 0.0;
  for (std::size_t i : {std::size_t(0), std::size_t(1), n - 2, n - 1})
    boundary += std::abs(dens[i]);
  boundary *= 2.0 * L / double(n);
  if (boundary > 1e-4)
    throw NumericError("invert_charfn: mass at the window edge (aliasing); enlarge L");

  return GridMeasure(L, std::move(dens));
}

GridMeasure convolve(const GridMeasure& a, const GridMeasure& b) {
  const std::size_t n = a.size();
  if (b.size() != n || std::abs(a.dx() - b.dx()) > 1e-12 * a.dx() ||
      std::abs(a.L() - b.L()) > 1e-9 * a.L())
    throw NumericError("convolve: grids must share geometry");
  std::vector<double> full = fft::convolve(a.density(), b.density(), a.dx());
  // full index k corresponds to z = -2L + k*dx; crop to [-L, L)
  std::vector<double> out(n);
  double cropped = 0.0;
  for (std::size_t k = 0; k < full.size(); ++k) {
    if (k >= n / 2 && k < n / 2 + n)
      out[k - n / 2] = full[k];
    else
      cropped += std::abs(full[k]) * a.dx();
  }
  GridMeasure result(a.L(), std::move(out));
  // carry provenance of lost mass from inputs and cropping
  result.mass_defect_ += cropped + a.mass_defect() + b.mass_defect();
  return result;
}

}  // namespace gms
