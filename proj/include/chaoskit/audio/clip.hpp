#pragma once

#include "../error.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace chaoskit::audio {

inline constexpr int kCanonicalRate = 8000;

/// Mono waveform in [-1, 1] with where it came from.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = kCanonicalRate;
  std::string source_id;
  double start_offset_s = 0.0;

  double duration_s() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate_hz);
  }
};

/// Analysis framing; hop defaults to half the frame length.
struct FrameSpec {
  double frame_len_s = 1.0;
  double hop_s = 0.5;

  void validate() const {
    if (!(frame_len_s > 0.0) || !(hop_s > 0.0))
      throw config_error("frame length and hop must be positive");
    if (hop_s > frame_len_s) throw config_error("hop must not exceed frame length");
  }
};

inline void clamp_unit(std::vector<double>& x) {
  for (double& v : x) v = std::clamp(v, -1.0, 1.0);
}

inline void require_canonical(const AudioClip& clip, const char* where) {
  if (clip.sample_rate_hz != kCanonicalRate)
    throw data_error(std::string(where) + ": expected " + std::to_string(kCanonicalRate) +
                     " Hz audio, got " + std::to_string(clip.sample_rate_hz) + " Hz (" +
                     clip.source_id + ")");
}

}  // namespace chaoskit::audio
