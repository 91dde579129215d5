#pragma once

#include "stft.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace chaoskit::dsp {

struct MelConfig {
  std::size_t n_mels = 64;
  double f_min = 0.0;
  double f_max = 0.0;  // 0 means Nyquist
  std::size_t mfcc_count = 13;

  void validate() const {
    if (n_mels == 0 || mfcc_count == 0) throw config_error("mel: n_mels and mfcc_count must be positive");
    if (mfcc_count > n_mels) throw config_error("mel: mfcc_count must not exceed n_mels");
    if (f_min < 0.0) throw config_error("mel: f_min must be non-negative");
  }
  double upper(int sample_rate_hz) const { return f_max > 0.0 ? f_max : 0.5 * sample_rate_hz; }
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filters with unit peak, centres equally spaced on the mel
/// scale. Row-major n_mels x n_bins.
class MelFilterbank {
 public:
  MelFilterbank(const MelConfig& mel, std::size_t n_fft, int sample_rate_hz)
      : n_mels_(mel.n_mels), n_bins_(n_fft / 2 + 1), weights_(n_mels_ * n_bins_, 0.0) {
    mel.validate();
    const double hi = mel.upper(sample_rate_hz);
    if (!(hi > mel.f_min)) throw config_error("mel: f_max must exceed f_min");
    const double m_lo = hz_to_mel(mel.f_min);
    const double m_hi = hz_to_mel(hi);
    std::vector<double> edges(n_mels_ + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
      edges[i] = mel_to_hz(m_lo + (m_hi - m_lo) * static_cast<double>(i) / static_cast<double>(n_mels_ + 1));
    const auto freqs = bin_frequencies(n_fft, sample_rate_hz);
    for (std::size_t m = 0; m < n_mels_; ++m) {
      const double lo = edges[m], mid = edges[m + 1], up = edges[m + 2];
      for (std::size_t k = 0; k < n_bins_; ++k) {
        const double rise = (freqs[k] - lo) / (mid - lo);
        const double fall = (up - freqs[k]) / (up - mid);
        weights_[m * n_bins_ + k] = std::max(0.0, std::min(rise, fall));
      }
    }
  }

  std::size_t n_mels() const { return n_mels_; }
  std::size_t n_bins() const { return n_bins_; }
  double weight(std::size_t mel, std::size_t bin) const { return weights_[mel * n_bins_ + bin]; }

  /// Mel energies of one power spectrum.
  void apply(std::span<const double> power, std::span<double> out) const {
    for (std::size_t m = 0; m < n_mels_; ++m) {
      const double* w = weights_.data() + m * n_bins_;
      double acc = 0.0;
      for (std::size_t k = 0; k < n_bins_; ++k) acc += w[k] * power[k];
      out[m] = acc;
    }
  }

 private:
  std::size_t n_mels_;
  std::size_t n_bins_;
  std::vector<double> weights_;
};

/// Orthonormal DCT-II basis, row-major n x n: row k is the k-th cosine.
inline std::vector<double> dct2_basis(std::size_t n) {
  std::vector<double> b(n * n);
  const auto dn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
    for (std::size_t i = 0; i < n; ++i)
      b[k * n + i] = scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                                      (2.0 * static_cast<double>(i) + 1.0) / (2.0 * dn));
  }
  return b;
}

/// mfcc_count x sub-frames, stored coefficient-major per sub-frame:
/// at(coef, frame).
struct MfccMatrix {
  std::size_t n_coeffs = 0;
  std::size_t n_frames = 0;
  std::vector<double> data;

  double at(std::size_t c, std::size_t f) const { return data[f * n_coeffs + c]; }
};

/// Cepstral analysis with cached filterbank and DCT basis.
class MfccExtractor {
 public:
  MfccExtractor(const StftConfig& stft_cfg = {}, const MelConfig& mel_cfg = {},
                int sample_rate_hz = audio::kCanonicalRate)
      : stft_(stft_cfg), mel_(mel_cfg), bank_(mel_cfg, stft_cfg.n_fft, sample_rate_hz),
        dct_(dct2_basis(mel_cfg.n_mels)) {
    stft_.validate();
  }

  MfccMatrix operator()(std::span<const double> x) const { return from_power(power(stft(x, stft_))); }

  MfccMatrix from_power(const Magnitudes& pow) const {
    const std::size_t n_mels = mel_.n_mels;
    MfccMatrix out{mel_.mfcc_count, pow.n_frames, std::vector<double>(mel_.mfcc_count * pow.n_frames)};
    std::vector<double> mel_energy(n_mels);
    for (std::size_t f = 0; f < pow.n_frames; ++f) {
      bank_.apply(pow.frame(f), mel_energy);
      for (double& e : mel_energy) e = std::log(std::max(e, kLogFloor));
      for (std::size_t c = 0; c < mel_.mfcc_count; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n_mels; ++i) acc += dct_[c * n_mels + i] * mel_energy[i];
        out.data[f * mel_.mfcc_count + c] = acc;
      }
    }
    return out;
  }

  const MelFilterbank& filterbank() const { return bank_; }
  static constexpr double kLogFloor = 1e-10;

 private:
  StftConfig stft_;
  MelConfig mel_;
  MelFilterbank bank_;
  std::vector<double> dct_;
};

inline MfccMatrix mfcc(std::span<const double> x, const StftConfig& stft_cfg = {},
                       const MelConfig& mel_cfg = {}, int sample_rate_hz = audio::kCanonicalRate) {
  return MfccExtractor(stft_cfg, mel_cfg, sample_rate_hz)(x);
}

}  // namespace chaoskit::dsp
