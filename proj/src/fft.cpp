#include "gms/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace gms::fft {

namespace {

// Twiddle table: roots[k] = exp(-2*pi*i*k/n), k < n/2. Shared, immutable once built.
std::shared_ptr<const std::vector<cd>> roots_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const std::vector<cd>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto tab = std::make_shared<std::vector<cd>>(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double ang = -2.0 * pi * double(k) / double(n);
    (*tab)[k] = cd(std::cos(ang), std::sin(ang));
  }
  cache.emplace(n, tab);
  return tab;
}

}  // namespace

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void transform(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_pow2(n)) throw NumericError("fft: length must be a power of two");
  if (n == 1) return;
  auto roots = roots_for(n);
  const std::vector<cd>& w = *roots;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1, stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cd tw = w[k * stride];
        if (inverse) tw = std::conj(tw);
        cd u = a[i + k], v = a[i + k + half] * tw;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double s = 1.0 / double(n);
    for (auto& x : a) x *= s;
  }
}

std::vector<cd> rfft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (!is_pow2(n) || n < 2) throw NumericError("rfft: length must be a power of two >= 2");
  const std::size_t h = n / 2;
  std::vector<cd> z(h);
  for (std::size_t k = 0; k < h; ++k) z[k] = cd(x[2 * k], x[2 * k + 1]);
  transform(z, false);
  auto roots = roots_for(n);
  const std::vector<cd>& w = *roots;
  std::vector<cd> spec(h + 1);
  spec[0] = cd(z[0].real() + z[0].imag(), 0.0);
  spec[h] = cd(z[0].real() - z[0].imag(), 0.0);
  const cd mi(0.0, -1.0);
  for (std::size_t k = 1; k < h; ++k) {
    cd zk = z[k], zc = std::conj(z[h - k]);
    cd even = 0.5 * (zk + zc);
    cd odd = 0.5 * mi * (zk - zc);
    spec[k] = even + w[k] * odd;
  }
  return spec;
}

std::vector<double> irfft(const std::vector<cd>& spec, std::size_t n) {
  if (!is_pow2(n) || spec.size() != n / 2 + 1)
    throw NumericError("irfft: bad spectrum length");
  const std::size_t h = n / 2;
  auto roots = roots_for(n);
  const std::vector<cd>& w = *roots;
  std::vector<cd> z(h);
  const cd i1(0.0, 1.0);
  z[0] = cd(0.5 * (spec[0].real() + spec[h].real()), 0.5 * (spec[0].real() - spec[h].real()));
  for (std::size_t k = 1; k < h; ++k) {
    cd sk = spec[k], sc = std::conj(spec[h - k]);
    cd even = 0.5 * (sk + sc);
    cd odd = 0.5 * (sk - sc) * std::conj(w[k]);
    z[k] = even + i1 * odd;
  }
  transform(z, true);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < h; ++k) {
    x[2 * k] = z[k].real();
    x[2 * k + 1] = z[k].imag();
  }
  return x;
}

std::vector<cd> rfft_padded(const std::vector<double>& x, std::size_t m) {
  if (!is_pow2(m) || m < x.size()) throw NumericError("rfft_padded: bad padded length");
  std::vector<double> padded(m, 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  return rfft(padded);
}

std::vector<double> product_irfft(const std::vector<cd>& a, const std::vector<cd>& b,
                                  std::size_t m, double scale) {
  if (a.size() != m / 2 + 1 || b.size() != a.size())
    throw NumericError("product_irfft: spectrum size mismatch");
  std::vector<cd> prod(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) prod[k] = a[k] * b[k];
  std::vector<double> out = irfft(prod, m);
  if (scale != 1.0)
    for (double& v : out) v *= scale;
  return out;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b,
                             double dx) {
  if (a.size() != b.size()) throw NumericError("convolve: length mismatch");
  std::size_t m = 1;
  while (m < 2 * a.size()) m <<= 1;
  auto sa = rfft_padded(a, m);
  auto sb = rfft_padded(b, m);
  std::vector<double> full = product_irfft(sa, sb, m, dx);
  full.resize(2 * a.size() - 1);
  return full;
}

}  // namespace gms::fft
