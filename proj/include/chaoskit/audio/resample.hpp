#pragma once

#include "clip.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

namespace chaoskit::audio {

namespace detail {

/// Zeroth-order modified Bessel function of the first kind (power series).
inline double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

/// Kaiser-windowed sinc low-pass; t in input samples, cutoff as a fraction
/// of the input Nyquist.
class SincKernel {
 public:
  SincKernel(double cutoff, int half_width, double beta)
      : cutoff_(cutoff), half_(half_width), beta_(beta), norm_(1.0 / bessel_i0(beta)) {}

  double operator()(double t) const {
    const double r = t / static_cast<double>(half_);
    if (std::abs(r) >= 1.0) return 0.0;
    const double x = cutoff_ * t;
    const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double window = bessel_i0(beta_ * std::sqrt(1.0 - r * r)) * norm_;
    return cutoff_ * sinc * window;
  }

  int half_width() const { return half_; }

 private:
  double cutoff_;
  int half_;
  double beta_;
  double norm_;
};

}  // namespace detail

struct ResampleOptions {
  double kaiser_beta = 8.0;
  // Taps per polyphase branch at the lower of the two rates.
  int taps_per_phase = 64;
};

/// Band-limited rational-ratio resampler. Output length is
/// round(len * target / source).
inline AudioClip resample(const AudioClip& clip, int target_hz, const ResampleOptions& opt = {}) {
  if (target_hz < 1000) throw config_error("resample: target rate must be at least 1000 Hz");
  if (clip.sample_rate_hz <= 0) throw data_error("resample: invalid source rate");
  if (target_hz == clip.sample_rate_hz) return clip;

  const std::int64_t src = clip.sample_rate_hz;
  const std::int64_t dst = target_hz;
  const std::int64_t g = std::gcd(src, dst);
  const std::int64_t up = dst / g;
  const std::int64_t down = src / g;

  const double cutoff = std::min(1.0, static_cast<double>(dst) / static_cast<double>(src));
  const int half = static_cast<int>(std::ceil(0.5 * opt.taps_per_phase / cutoff));
  const detail::SincKernel kernel(cutoff, half, opt.kaiser_beta);

  const auto n_in = static_cast<std::int64_t>(clip.samples.size());
  const std::int64_t n_out = (n_in * dst * 2 + src) / (2 * src);

  // One normalized coefficient set per output phase; phases repeat every
  // `up` outputs. Very large phase counts fall back to on-the-fly evaluation.
  const bool tabulate = up <= 4096;
  const std::size_t taps = static_cast<std::size_t>(2 * half);
  std::vector<double> table;
  auto fill_phase = [&](std::int64_t phase, double* out) {
    const double frac = static_cast<double>(phase) / static_cast<double>(up);
    double sum = 0.0;
    for (std::size_t j = 0; j < taps; ++j) {
      const double t = static_cast<double>(static_cast<int>(j) - half + 1) - frac;
      out[j] = kernel(t);
      sum += out[j];
    }
    if (sum != 0.0)
      for (std::size_t j = 0; j < taps; ++j) out[j] /= sum;
  };
  if (tabulate) {
    table.resize(static_cast<std::size_t>(up) * taps);
    for (std::int64_t p = 0; p < up; ++p) fill_phase(p, table.data() + p * taps);
  }

  AudioClip out;
  out.sample_rate_hz = target_hz;
  out.source_id = clip.source_id;
  out.start_offset_s = clip.start_offset_s;
  out.samples.resize(static_cast<std::size_t>(n_out));
  std::vector<double> scratch(tabulate ? 0 : taps);

  for (std::int64_t n = 0; n < n_out; ++n) {
    const std::int64_t pos = n * down;
    const std::int64_t base = pos / up;
    const std::int64_t phase = pos % up;
    const double* coef = nullptr;
    if (tabulate) {
      coef = table.data() + phase * taps;
    } else {
      fill_phase(phase, scratch.data());
      coef = scratch.data();
    }
    double acc = 0.0;
    const std::int64_t first = base - half + 1;
    for (std::size_t j = 0; j < taps; ++j) {
      const std::int64_t k = first + static_cast<std::int64_t>(j);
      if (k < 0 || k >= n_in) continue;
      acc += coef[j] * clip.samples[static_cast<std::size_t>(k)];
    }
    out.samples[static_cast<std::size_t>(n)] = acc;
  }
  clamp_unit(out.samples);
  return out;
}

}  // namespace chaoskit::audio
