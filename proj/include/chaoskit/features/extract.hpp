#pragma once

#include "../audio/noise_gate.hpp"
#include "../audio/resample.hpp"
#include "../audio/segment.hpp"
#include "feature_table.hpp"
#include "frame_features.hpp"

#include <optional>
#include <vector>

namespace chaoskit::features {

struct NoiseGateSettings {
  bool enabled = false;
  double reduction_db = 12.0;
  double profile_s = 1.0;  // length of the quietest stretch used as the noise profile
};

struct ExtractConfig {
  audio::FrameSpec frames;
  dsp::StftConfig stft;
  dsp::MelConfig mel;
  NoiseGateSettings gate;
};

/// Lowest-energy stretch of `seconds` length, searched on a hop of half its
/// length.
inline audio::AudioClip quietest_segment(const audio::AudioClip& clip, double seconds) {
  const auto len = static_cast<std::size_t>(seconds * clip.sample_rate_hz);
  if (len == 0 || clip.samples.size() <= len) return clip;
  const std::size_t hop = std::max<std::size_t>(1, len / 2);
  std::size_t best = 0;
  double best_energy = -1.0;
  for (std::size_t off = 0; off + len <= clip.samples.size(); off += hop) {
    double e = 0.0;
    for (std::size_t i = 0; i < len; ++i) e += clip.samples[off + i] * clip.samples[off + i];
    if (best_energy < 0.0 || e < best_energy) {
      best_energy = e;
      best = off;
    }
  }
  audio::AudioClip out = clip;
  out.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(best),
                     clip.samples.begin() + static_cast<std::ptrdiff_t>(best + len));
  return out;
}

/// Resample to the canonical rate and apply the optional gate.
inline audio::AudioClip prepare_clip(const audio::AudioClip& clip, const NoiseGateSettings& gate = {}) {
  audio::AudioClip out =
      clip.sample_rate_hz == audio::kCanonicalRate ? clip : audio::resample(clip, audio::kCanonicalRate);
  if (gate.enabled) out = audio::noise_gate(out, quietest_segment(out, gate.profile_s), gate.reduction_db);
  return out;
}

inline std::vector<FrameFeatureVector> extract_frames(const audio::AudioClip& clip, const ExtractConfig& cfg = {}) {
  audio::require_canonical(clip, "extract_frames");
  const FrameFeatureExtractor fx(cfg.stft, cfg.mel, cfg.frames.frame_len_s);
  const auto frames = audio::segment(clip, cfg.frames);
  std::vector<FrameFeatureVector> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(fx(f));
  return out;
}

inline std::vector<WindowFeatureVector> extract_windows(const audio::AudioClip& clip, const ExtractConfig& cfg = {}) {
  return aggregate_windows(extract_frames(clip, cfg));
}

}  // namespace chaoskit::features
