#pragma once

#include "../audio/clip.hpp"
#include "../dsp/mel.hpp"
#include "../dsp/stft.hpp"
#include "../io/json_io.hpp"
#include "../types.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace chaoskit::deep {

/// Per-second log-mel image fed to the autoencoder. Sub-frames are centred
/// at (i + 0.5) * hop inside the second and zero-padded at its edges, so with
/// hop 250 one 8000-sample second gives exactly 32 frames.
struct MelInputConfig {
  std::size_t n_mels = 64;
  std::size_t n_fft = 512;
  std::size_t hop = 250;
  std::size_t window_samples = audio::kCanonicalRate;

  std::size_t frames() const { return window_samples / hop; }
  std::size_t in_dim() const { return n_mels * frames(); }

  void validate() const {
    if (n_mels == 0) throw config_error("mel input: n_mels must be positive");
    if (!dsp::is_power_of_two(n_fft)) throw config_error("mel input: n_fft must be a power of two");
    if (hop == 0 || window_samples % hop != 0) throw config_error("mel input: hop must divide the window length");
  }

  io::Json to_json() const {
    return {{"n_mels", n_mels}, {"n_fft", n_fft}, {"hop", hop}, {"window_samples", window_samples}};
  }
  static MelInputConfig from_json(const io::Json& j) {
    MelInputConfig c;
    c.n_mels = j.value("n_mels", c.n_mels);
    c.n_fft = j.value("n_fft", c.n_fft);
    c.hop = j.value("hop", c.hop);
    c.window_samples = j.value("window_samples", c.window_samples);
    c.validate();
    return c;
  }
};

/// Computes the unscaled log(1 + mel power) rows, one per whole second.
class MelInput {
 public:
  explicit MelInput(const MelInputConfig& cfg = {})
      : cfg_((cfg.validate(), cfg)),
        bank_(dsp::MelConfig{cfg.n_mels, 0.0, 0.0, 1}, cfg.n_fft, audio::kCanonicalRate),
        window_(dsp::hann_window(cfg.n_fft)) {}

  const MelInputConfig& config() const { return cfg_; }

  /// Flattened mel-major: entry (m, t) sits at m * frames + t. The second is
  /// mean-removed first.
  void second_row(const double* x, double* out) const {
    const std::size_t w = cfg_.window_samples, frames = cfg_.frames(), n = cfg_.n_fft;
    double mean = 0.0;
    for (std::size_t i = 0; i < w; ++i) mean += x[i];
    mean /= static_cast<double>(w);
    std::vector<dsp::Complex> buf(n);
    std::vector<double> power(n / 2 + 1), mel(cfg_.n_mels);
    for (std::size_t t = 0; t < frames; ++t) {
      const auto start = static_cast<long long>(t * cfg_.hop + cfg_.hop / 2) - static_cast<long long>(n / 2);
      for (std::size_t i = 0; i < n; ++i) {
        const long long s = start + static_cast<long long>(i);
        const double v = (s >= 0 && s < static_cast<long long>(w)) ? x[s] - mean : 0.0;
        buf[i] = v * window_[i];
      }
      dsp::fft_inplace(buf);
      for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(buf[k]);
      bank_.apply(power, mel);
      for (std::size_t m = 0; m < cfg_.n_mels; ++m) out[m * frames + t] = std::log1p(mel[m]);
    }
  }

  Matrix log_mel(const audio::AudioClip& clip) const {
    audio::require_canonical(clip, "mel input");
    const std::size_t seconds = clip.samples.size() / cfg_.window_samples;
    if (seconds == 0)
      throw data_error("mel input: clip '" + clip.source_id + "' is shorter than one second");
    Matrix rows(static_cast<Eigen::Index>(seconds), static_cast<Eigen::Index>(cfg_.in_dim()));
    for (std::size_t s = 0; s < seconds; ++s)
      second_row(clip.samples.data() + s * cfg_.window_samples, rows.row(static_cast<Eigen::Index>(s)).data());
    return rows;
  }

 private:
  MelInputConfig cfg_;
  dsp::MelFilterbank bank_;
  std::vector<double> window_;
};

/// Root-mean-square of each whole second after mean removal.
inline std::vector<double> second_rms(const audio::AudioClip& clip, std::size_t window_samples = audio::kCanonicalRate) {
  std::vector<double> out;
  for (std::size_t s = 0; (s + 1) * window_samples <= clip.samples.size(); ++s) {
    const double* x = clip.samples.data() + s * window_samples;
    double mean = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < window_samples; ++i) mean += x[i];
    mean /= static_cast<double>(window_samples);
    for (std::size_t i = 0; i < window_samples; ++i) ss += (x[i] - mean) * (x[i] - mean);
    out.push_back(std::sqrt(ss / static_cast<double>(window_samples)));
  }
  return out;
}

/// Global min-max scaling of log-mel values into [0, 1], clamped.
struct MelScaler {
  double min = 0.0;
  double max = 1.0;

  static MelScaler fit(const Matrix& log_mel) {
    if (log_mel.size() == 0) throw data_error("mel scaler: no data");
    if (!log_mel.allFinite()) throw data_error("mel scaler: non-finite input");
    MelScaler s{log_mel.minCoeff(), log_mel.maxCoeff()};
    if (!(s.max > s.min)) throw data_error("mel scaler: corpus has a single log-mel value");
    return s;
  }

  Matrix transform(const Matrix& log_mel) const {
    return ((log_mel.array() - min) / (max - min)).cwiseMax(0.0).cwiseMin(1.0).matrix();
  }

  io::Json to_json() const { return {{"log1p", true}, {"min", min}, {"max", max}}; }
  static MelScaler from_json(const io::Json& j) {
    MelScaler s{j.at("min").get<double>(), j.at("max").get<double>()};
    if (!(s.max > s.min)) throw data_error("mel scaler: max must exceed min");
    return s;
  }
};

/// Every whole second of a set of clips with where it came from.
struct SecondBatch {
  Matrix log_mel;
  std::vector<double> rms;
  std::vector<std::string> source_id;
  std::vector<std::size_t> second_offset;

  std::size_t size() const { return rms.size(); }
};

inline SecondBatch collect_seconds(const std::vector<audio::AudioClip>& clips, const MelInput& mel) {
  std::vector<Matrix> parts;
  SecondBatch b;
  Eigen::Index total = 0;
  for (const auto& c : clips) {
    parts.push_back(mel.log_mel(c));
    const auto r = second_rms(c, mel.config().window_samples);
    for (std::size_t s = 0; s < r.size(); ++s) {
      b.rms.push_back(r[s]);
      b.source_id.push_back(c.source_id);
      b.second_offset.push_back(s);
    }
    total += parts.back().rows();
  }
  if (total == 0) throw data_error("collect_seconds: no clips");
  b.log_mel.resize(total, static_cast<Eigen::Index>(mel.config().in_dim()));
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    b.log_mel.middleRows(at, p.rows()) = p;
    at += p.rows();
  }
  return b;
}

}  // namespace chaoskit::deep
