#pragma once

#include "../dsp/fft.hpp"
#include "clip.hpp"

#include <cmath>
#include <vector>

namespace chaoskit::audio {

struct NoiseGateConfig {
  std::size_t n_fft = 512;
  std::size_t hop = 128;
  // Bins at or below mean + threshold_sigmas * std of the profile magnitude
  // are treated as noise.
  double threshold_sigmas = 1.5;
};

/// Per-bin noise magnitude statistics of a noise-only recording.
struct NoiseProfile {
  std::vector<double> threshold;

  static NoiseProfile estimate(const AudioClip& noise, const NoiseGateConfig& cfg) {
    if (noise.samples.size() < cfg.n_fft)
      throw data_error("noise_gate: noise profile shorter than one STFT window (" +
                       std::to_string(noise.samples.size()) + " < " + std::to_string(cfg.n_fft) + ")");
    const auto window = dsp::hann_window(cfg.n_fft);
    const std::size_t bins = cfg.n_fft / 2 + 1;
    const std::size_t frames = (noise.samples.size() - cfg.n_fft) / cfg.hop + 1;
    std::vector<double> sum(bins, 0.0), sum_sq(bins, 0.0);
    std::vector<double> buf(cfg.n_fft);
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t i = 0; i < cfg.n_fft; ++i) buf[i] = noise.samples[f * cfg.hop + i] * window[i];
      const auto spec = dsp::rfft(buf);
      for (std::size_t k = 0; k < bins; ++k) {
        const double m = std::abs(spec[k]);
        sum[k] += m;
        sum_sq[k] += m * m;
      }
    }
    NoiseProfile p;
    p.threshold.resize(bins);
    const auto n = static_cast<double>(frames);
    for (std::size_t k = 0; k < bins; ++k) {
      const double mean = sum[k] / n;
      const double var = std::max(0.0, sum_sq[k] / n - mean * mean);
      p.threshold[k] = mean + cfg.threshold_sigmas * std::sqrt(var);
    }
    return p;
  }
};

/// Spectral gate: STFT bins whose magnitude does not exceed the noise
/// threshold are attenuated by reduction_db; phase is kept and the signal is
/// rebuilt by weighted overlap-add.
inline AudioClip noise_gate(const AudioClip& clip, const AudioClip& noise_profile, double reduction_db,
                            const NoiseGateConfig& cfg = {}) {
  if (!dsp::is_power_of_two(cfg.n_fft) || cfg.hop == 0 || cfg.hop > cfg.n_fft)
    throw config_error("noise_gate: invalid STFT configuration");
  if (reduction_db < 0.0) throw config_error("noise_gate: reduction_db must be non-negative");
  const NoiseProfile profile = NoiseProfile::estimate(noise_profile, cfg);
  const double gain = std::pow(10.0, -reduction_db / 20.0);

  const std::size_t n = clip.samples.size();
  const std::size_t pad = cfg.n_fft;
  const std::size_t frames = (n + pad) / cfg.hop + 1;
  const std::size_t padded_len = (frames - 1) * cfg.hop + cfg.n_fft;
  std::vector<double> padded(padded_len, 0.0);
  std::copy(clip.samples.begin(), clip.samples.end(), padded.begin() + static_cast<std::ptrdiff_t>(pad));

  const auto window = dsp::hann_window(cfg.n_fft);
  std::vector<double> acc(padded_len, 0.0), norm(padded_len, 0.0), buf(cfg.n_fft);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t off = f * cfg.hop;
    for (std::size_t i = 0; i < cfg.n_fft; ++i) buf[i] = padded[off + i] * window[i];
    auto spec = dsp::rfft(buf);
    for (std::size_t k = 0; k < spec.size(); ++k)
      if (std::abs(spec[k]) <= profile.threshold[k]) spec[k] *= gain;
    const auto frame = dsp::irfft(spec, cfg.n_fft);
    for (std::size_t i = 0; i < cfg.n_fft; ++i) {
      acc[off + i] += frame[i] * window[i];
      norm[off + i] += window[i] * window[i];
    }
  }

  AudioClip out = clip;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = norm[pad + i];
    out.samples[i] = w > 1e-12 ? acc[pad + i] / w : 0.0;
  }
  clamp_unit(out.samples);
  return out;
}

}  // namespace chaoskit::audio
