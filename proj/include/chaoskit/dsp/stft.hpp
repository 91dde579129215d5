#pragma once

#include "../audio/clip.hpp"
#include "fft.hpp"

#include <span>
#include <vector>

namespace chaoskit::dsp {

struct StftConfig {
  std::size_t n_fft = 512;
  std::size_t hop = 256;

  void validate() const {
    if (!is_power_of_two(n_fft)) throw config_error("stft: n_fft must be a power of two");
    if (hop == 0 || hop > n_fft) throw config_error("stft: hop must be in [1, n_fft]");
  }
  std::size_t n_bins() const { return n_fft / 2 + 1; }
  std::size_t n_frames(std::size_t len) const { return len < n_fft ? 0 : (len - n_fft) / hop + 1; }
};

/// Complex spectrogram stored sub-frame major: at(bin, frame).
struct Spectrogram {
  std::size_t n_bins = 0;
  std::size_t n_frames = 0;
  std::vector<Complex> data;

  Complex& at(std::size_t bin, std::size_t frame) { return data[frame * n_bins + bin]; }
  const Complex& at(std::size_t bin, std::size_t frame) const { return data[frame * n_bins + bin]; }
  std::span<const Complex> frame(std::size_t f) const {
    return {data.data() + f * n_bins, n_bins};
  }
};

/// Real-valued bins x frames matrix in the same layout as Spectrogram.
struct Magnitudes {
  std::size_t n_bins = 0;
  std::size_t n_frames = 0;
  std::vector<double> data;

  double& at(std::size_t bin, std::size_t frame) { return data[frame * n_bins + bin]; }
  double at(std::size_t bin, std::size_t frame) const { return data[frame * n_bins + bin]; }
  std::span<const double> frame(std::size_t f) const { return {data.data() + f * n_bins, n_bins}; }
};

inline void require_length(std::size_t len, const StftConfig& cfg, const char* where) {
  if (len < cfg.n_fft)
    throw data_error(std::string(where) + ": frame of " + std::to_string(len) +
                     " samples is shorter than n_fft " + std::to_string(cfg.n_fft));
}

/// Hann-windowed, hop-strided DFT without centering.
inline Spectrogram stft(std::span<const double> x, const StftConfig& cfg = {}) {
  cfg.validate();
  require_length(x.size(), cfg, "stft");
  const auto window = hann_window(cfg.n_fft);
  Spectrogram s;
  s.n_bins = cfg.n_bins();
  s.n_frames = cfg.n_frames(x.size());
  s.data.resize(s.n_bins * s.n_frames);
  std::vector<Complex> buf(cfg.n_fft);
  for (std::size_t f = 0; f < s.n_frames; ++f) {
    const std::size_t off = f * cfg.hop;
    for (std::size_t i = 0; i < cfg.n_fft; ++i) buf[i] = x[off + i] * window[i];
    fft_inplace(buf);
    std::copy_n(buf.begin(), s.n_bins, s.data.begin() + static_cast<std::ptrdiff_t>(f * s.n_bins));
  }
  return s;
}

inline Spectrogram stft(const audio::AudioClip& frame, const StftConfig& cfg = {}) {
  return stft(std::span<const double>(frame.samples), cfg);
}

inline Magnitudes magnitude(const Spectrogram& s) {
  Magnitudes m{s.n_bins, s.n_frames, std::vector<double>(s.data.size())};
  for (std::size_t i = 0; i < s.data.size(); ++i) m.data[i] = std::abs(s.data[i]);
  return m;
}

inline Magnitudes power(const Spectrogram& s) {
  Magnitudes m{s.n_bins, s.n_frames, std::vector<double>(s.data.size())};
  for (std::size_t i = 0; i < s.data.size(); ++i) m.data[i] = std::norm(s.data[i]);
  return m;
}

/// Centre frequency in Hz of each of the n_fft/2 + 1 bins.
inline std::vector<double> bin_frequencies(std::size_t n_fft, int sample_rate_hz) {
  std::vector<double> f(n_fft / 2 + 1);
  for (std::size_t k = 0; k < f.size(); ++k)
    f[k] = static_cast<double>(k) * sample_rate_hz / static_cast<double>(n_fft);
  return f;
}

}  // namespace chaoskit::dsp
