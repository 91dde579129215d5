#pragma once

#include "stft.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace chaoskit::dsp {

struct SpectralDescriptors {
  double centroid = 0.0;   // Hz
  double bandwidth = 0.0;  // Hz
  double rolloff = 0.0;    // Hz
  double flatness = 0.0;   // [0, 1]
};

inline constexpr double kRolloffFraction = 0.85;
inline constexpr double kPowerFloor = 1e-10;

/// Descriptors of one magnitude spectrum. An all-zero spectrum yields all zeros.
inline SpectralDescriptors describe_spectrum(std::span<const double> mag, std::span<const double> freqs,
                                             double rolloff_fraction = kRolloffFraction) {
  if (mag.size() != freqs.size()) throw data_error("spectral descriptors: bin/frequency size mismatch");
  double sum_m = 0.0;
  double sum_fm = 0.0;
  double total_energy = 0.0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    if (mag[k] < 0.0) throw data_error("spectral descriptors: negative magnitude");
    sum_m += mag[k];
    sum_fm += freqs[k] * mag[k];
    total_energy += mag[k] * mag[k];
  }
  SpectralDescriptors d;
  if (sum_m == 0.0) return d;

  d.centroid = sum_fm / sum_m;
  double spread = 0.0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    const double df = freqs[k] - d.centroid;
    spread += mag[k] * df * df;
  }
  d.bandwidth = std::sqrt(spread / sum_m);

  const double threshold = rolloff_fraction * total_energy;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    cumulative += mag[k] * mag[k];
    if (cumulative >= threshold) {
      d.rolloff = freqs[k];
      break;
    }
  }

  double log_sum = 0.0;
  double lin_sum = 0.0;
  for (double m : mag) {
    const double p = std::max(m * m, kPowerFloor);
    log_sum += std::log(p);
    lin_sum += p;
  }
  const auto n = static_cast<double>(mag.size());
  d.flatness = std::exp(log_sum / n) / (lin_sum / n);
  return d;
}

inline std::vector<SpectralDescriptors> spectral_descriptors(const Magnitudes& mags,
                                                             std::span<const double> freqs) {
  if (mags.n_frames == 0) throw data_error("spectral descriptors: no sub-frames");
  std::vector<SpectralDescriptors> out;
  out.reserve(mags.n_frames);
  for (std::size_t f = 0; f < mags.n_frames; ++f) out.push_back(describe_spectrum(mags.frame(f), freqs));
  return out;
}

/// Per sub-frame fraction of adjacent sample pairs that change sign; zero
/// counts as positive.
inline std::vector<double> zcr(std::span<const double> x, const StftConfig& cfg = {}) {
  cfg.validate();
  require_length(x.size(), cfg, "zcr");
  const std::size_t frames = cfg.n_frames(x.size());
  std::vector<double> out(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const double* p = x.data() + f * cfg.hop;
    std::size_t crossings = 0;
    for (std::size_t i = 1; i < cfg.n_fft; ++i) crossings += (p[i] >= 0.0) != (p[i - 1] >= 0.0);
    out[f] = static_cast<double>(crossings) / static_cast<double>(cfg.n_fft - 1);
  }
  return out;
}

/// Per sub-frame root-mean-square of the raw (unwindowed) samples.
inline std::vector<double> rmse(std::span<const double> x, const StftConfig& cfg = {}) {
  cfg.validate();
  require_length(x.size(), cfg, "rmse");
  const std::size_t frames = cfg.n_frames(x.size());
  std::vector<double> out(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const double* p = x.data() + f * cfg.hop;
    double ss = 0.0;
    for (std::size_t i = 0; i < cfg.n_fft; ++i) ss += p[i] * p[i];
    out[f] = std::sqrt(ss / static_cast<double>(cfg.n_fft));
  }
  return out;
}

}  // namespace chaoskit::dsp
