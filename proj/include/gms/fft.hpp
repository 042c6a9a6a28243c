#pragma once

// Power-of-two FFT with cached twiddle tables, a real-input transform that
// runs through a half-size complex FFT, and padded linear convolution of
// uniformly sampled real arrays.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "gms/common.hpp"

namespace gms::fft {

using cd = std::complex<double>;

bool is_pow2(std::size_t n);

// In-place complex FFT, n a power of two. inverse=true applies 1/n scaling.
void transform(std::vector<cd>& a, bool inverse);

// Real forward transform: returns spectrum of length n/2+1 (bins 0..n/2).
std::vector<cd> rfft(const std::vector<double>& x);

// Inverse of rfft: spectrum of length n/2+1 back to n real samples.
std::vector<double> irfft(const std::vector<cd>& spec, std::size_t n);

// rfft of `x` zero-padded to length m (m power of two, m >= x.size()).
std::vector<cd> rfft_padded(const std::vector<double>& x, std::size_t m);

// Pointwise-product inverse: irfft(a .* b) * scale, length m real output.
std::vector<double> product_irfft(const std::vector<cd>& a, const std::vector<cd>& b,
                                  std::size_t m, double scale);

// Linear convolution of two length-n arrays via zero padding to 2n, scaled by
// `dx` (Riemann sum weight). Output has length 2n-1: entry k is
// dx * sum_{i+j=k} a_i b_j.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b,
                             double dx);

}  // namespace gms::fft
