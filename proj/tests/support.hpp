#pragma once

// Signal generators and brute-force oracles shared by the test binaries.
// Nothing here calls into the code paths it is used to check.

#include <chaoskit/audio/clip.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

inline std::vector<double> sine(double freq_hz, double seconds, int rate, double amplitude = 1.0,
                                double phase = 0.0) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate + phase);
  return x;
}

inline std::vector<double> white_noise(std::size_t n, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

inline chaoskit::audio::AudioClip clip_of(std::vector<double> x, int rate = 8000, std::string id = "test") {
  chaoskit::audio::AudioClip c;
  c.samples = std::move(x);
  c.sample_rate_hz = rate;
  c.source_id = std::move(id);
  return c;
}

/// Direct O(N^2) DFT magnitude at one bin.
inline double dft_magnitude(const std::vector<double>& x, std::size_t bin) {
  std::complex<double> acc = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = -2.0 * std::numbers::pi * static_cast<double>(bin) * static_cast<double>(i) / n;
    acc += x[i] * std::complex<double>(std::cos(a), std::sin(a));
  }
  return std::abs(acc);
}

/// Bin with the largest direct-DFT magnitude among bins [0, max_bin].
inline std::size_t dft_peak_bin(const std::vector<double>& x, std::size_t max_bin) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t k = 0; k <= max_bin; ++k) {
    const double m = dft_magnitude(x, k);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  return best;
}

inline double rms(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

/// Little-endian PCM WAV bytes built field by field.
inline std::vector<unsigned char> make_wav(int rate, int channels, int bits, int format,
                                           const std::vector<std::uint32_t>& raw_samples) {
  std::vector<unsigned char> b;
  auto put = [&](std::uint32_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) b.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
  };
  const int width = bits / 8;
  const auto data_len = static_cast<std::uint32_t>(raw_samples.size() * static_cast<std::size_t>(width));
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  put(36 + data_len, 4);
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put(16, 4);
  put(static_cast<std::uint32_t>(format), 2);
  put(static_cast<std::uint32_t>(channels), 2);
  put(static_cast<std::uint32_t>(rate), 4);
  put(static_cast<std::uint32_t>(rate * channels * width), 4);
  put(static_cast<std::uint32_t>(channels * width), 2);
  put(static_cast<std::uint32_t>(bits), 2);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  put(data_len, 4);
  for (auto s : raw_samples) put(s, width);
  return b;
}

}  // namespace testsupport
