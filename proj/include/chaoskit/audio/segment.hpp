#pragma once

#include "clip.hpp"

#include <cmath>
#include <vector>

namespace chaoskit::audio {

/// Splits a clip into frames starting at k * hop; a trailing partial frame
/// is dropped.
inline std::vector<AudioClip> segment(const AudioClip& clip, const FrameSpec& spec = {}) {
  spec.validate();
  const auto rate = static_cast<double>(clip.sample_rate_hz);
  const auto frame = static_cast<std::size_t>(std::llround(spec.frame_len_s * rate));
  const auto hop = static_cast<std::size_t>(std::llround(spec.hop_s * rate));
  if (frame == 0 || hop == 0) throw config_error("segment: frame or hop shorter than one sample");
  if (clip.samples.size() < frame)
    throw data_error("segment: " + clip.source_id + " is shorter than one frame (" +
                     std::to_string(clip.duration_s()) + " s < " +
                     std::to_string(spec.frame_len_s) + " s)");

  const std::size_t count = (clip.samples.size() - frame) / hop + 1;
  std::vector<AudioClip> frames;
  frames.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    AudioClip f;
    f.sample_rate_hz = clip.sample_rate_hz;
    f.source_id = clip.source_id;
    f.start_offset_s = clip.start_offset_s + static_cast<double>(k * hop) / rate;
    const auto begin = clip.samples.begin() + static_cast<std::ptrdiff_t>(k * hop);
    f.samples.assign(begin, begin + static_cast<std::ptrdiff_t>(frame));
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace chaoskit::audio
