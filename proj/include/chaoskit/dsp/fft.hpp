#pragma once

#include "../error.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace chaoskit::dsp {

using Complex = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 FFT. `inverse` applies the 1/N scaling.
inline void fft_inplace(std::vector<Complex>& a, bool inverse = false) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n)) throw data_error("fft: length must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    // Twiddles from direct evaluation rather than recurrence keep the
    // round-off independent of the transform size.
    std::vector<Complex> tw(half);
    for (std::size_t k = 0; k < half; ++k)
      tw[k] = {std::cos(angle * static_cast<double>(k)), std::sin(angle * static_cast<double>(k))};
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex u = a[i + k];
        const Complex v = a[i + k + half] * tw[k];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= scale;
  }
}

/// Non-negative frequency half of the spectrum of a real signal: n/2 + 1 bins.
inline std::vector<Complex> rfft(std::span<const double> x) {
  std::vector<Complex> a(x.begin(), x.end());
  fft_inplace(a);
  a.resize(x.size() / 2 + 1);
  return a;
}

/// Inverse of rfft for an even length n.
inline std::vector<double> irfft(std::span<const Complex> half, std::size_t n) {
  std::vector<Complex> a(n);
  for (std::size_t k = 0; k < half.size() && k < n; ++k) a[k] = half[k];
  for (std::size_t k = 1; k < n / 2; ++k) a[n - k] = std::conj(half[k]);
  fft_inplace(a, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real();
  return out;
}

/// Periodic Hann window (the DFT-even form).
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

}  // namespace chaoskit::dsp
