#pragma once

#include "../error.hpp"

#include <array>
#include <string>
#include <string_view>

namespace chaoskit::features {

inline constexpr std::size_t kFeatureCount = 16;

/// Column order of every feature vector and of the FeatureTable CSV.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "raw_mean",       "raw_std",        "mfcc_mean",     "mfcc_std",
    "rmse_mean",      "rmse_std",       "zcr_mean",      "zcr_std",
    "centroid_mean",  "centroid_std",   "bandwidth_mean", "bandwidth_std",
    "rolloff_mean",   "rolloff_std",    "flatness_mean", "flatness_std"};

enum Feature : std::size_t {
  raw_mean, raw_std, mfcc_mean, mfcc_std, rmse_mean, rmse_std, zcr_mean, zcr_std,
  centroid_mean, centroid_std, bandwidth_mean, bandwidth_std, rolloff_mean, rolloff_std,
  flatness_mean, flatness_std
};

using FeatureValues = std::array<double, kFeatureCount>;

inline std::size_t feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (kFeatureNames[i] == name) return i;
  throw config_error("unknown feature column '" + std::string(name) + "'");
}

}  // namespace chaoskit::features
