#pragma once

#include "../audio/clip.hpp"
#include "../dsp/descriptors.hpp"
#include "../dsp/mel.hpp"
#include "../types.hpp"
#include "schema.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace chaoskit::features {

struct FrameFeatureVector {
  FeatureValues values{};
  double start_offset_s = 0.0;
  std::string source_id;

  double operator[](Feature f) const { return values[f]; }
};

/// Computes the per-frame statistics of one analysis frame. Holds the mel
/// filterbank and DCT basis, so reuse one instance across frames.
class FrameFeatureExtractor {
 public:
  explicit FrameFeatureExtractor(const dsp::StftConfig& stft_cfg = {}, const dsp::MelConfig& mel_cfg = {},
                                 double frame_len_s = 1.0)
      : stft_(stft_cfg),
        mfcc_(stft_cfg, mel_cfg, audio::kCanonicalRate),
        freqs_(dsp::bin_frequencies(stft_cfg.n_fft, audio::kCanonicalRate)),
        frame_samples_(static_cast<std::size_t>(std::llround(frame_len_s * audio::kCanonicalRate))) {}

  FrameFeatureVector operator()(const audio::AudioClip& frame) const {
    audio::require_canonical(frame, "frame_features");
    if (frame.samples.size() != frame_samples_)
      throw data_error("frame_features: expected " + std::to_string(frame_samples_) + " samples, got " +
                       std::to_string(frame.samples.size()));
    FrameFeatureVector out;
    out.source_id = frame.source_id;
    out.start_offset_s = frame.start_offset_s;
    out.values = compute(frame.samples);
    return out;
  }

  FeatureValues compute(std::span<const double> x) const {
    FeatureValues v{};
    put(v, raw_mean, mean_std(x));

    const auto spec = dsp::stft(x, stft_);
    const auto mags = dsp::magnitude(spec);
    const auto pow = dsp::power(spec);

    // Cepstral statistics pool every coefficient of every sub-frame.
    put(v, mfcc_mean, mean_std(mfcc_.from_power(pow).data));
    put(v, rmse_mean, mean_std(dsp::rmse(x, stft_)));
    put(v, zcr_mean, mean_std(dsp::zcr(x, stft_)));

    const auto desc = dsp::spectral_descriptors(mags, freqs_);
    std::vector<double> centroid, bandwidth, rolloff, flatness;
    for (const auto& d : desc) {
      centroid.push_back(d.centroid);
      bandwidth.push_back(d.bandwidth);
      rolloff.push_back(d.rolloff);
      flatness.push_back(d.flatness);
    }
    put(v, centroid_mean, mean_std(centroid));
    put(v, bandwidth_mean, mean_std(bandwidth));
    put(v, rolloff_mean, mean_std(rolloff));
    put(v, flatness_mean, mean_std(flatness));
    return v;
  }

 private:
  static void put(FeatureValues& v, Feature mean_slot, MeanStd s) {
    v[mean_slot] = s.mean;
    v[mean_slot + 1] = s.std;
  }

  dsp::StftConfig stft_;
  dsp::MfccExtractor mfcc_;
  std::vector<double> freqs_;
  std::size_t frame_samples_;
};

inline FrameFeatureVector frame_features(const audio::AudioClip& frame, const dsp::StftConfig& stft_cfg = {},
                                         const dsp::MelConfig& mel_cfg = {}) {
  return FrameFeatureExtractor(stft_cfg, mel_cfg, frame.duration_s())(frame);
}

}  // namespace chaoskit::features
