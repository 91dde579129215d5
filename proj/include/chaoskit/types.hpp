#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace chaoskit {

// Row-major so that one observation is one contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

using Rng = std::mt19937_64;

inline constexpr const char* kToolVersion = "0.1.0";

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Population mean and standard deviation (divide by N).
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

template <typename Range>
MeanStd mean_std(const Range& values) {
  double n = 0.0;
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    n += 1.0;
  }
  if (n == 0.0) return {};
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

/// 64-bit FNV-1a, used for config hashes and artifact checksums.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

/// Fisher-Yates with our own index draw so the permutation only depends on
/// the engine sequence.
inline void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
}

}  // namespace chaoskit
