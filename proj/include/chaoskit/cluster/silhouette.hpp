#pragma once

#include "../types.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

namespace chaoskit::cluster {

inline constexpr std::size_t kSilhouetteRowCap = 20000;

/// Mean silhouette coefficient. Rows beyond `row_cap` are subsampled
/// uniformly without replacement using `seed`. Singleton clusters score 0.
inline double silhouette_score(const Matrix& data, const std::vector<int>& labels,
                               std::size_t row_cap = kSilhouetteRowCap, std::uint64_t seed = 0) {
  if (static_cast<std::size_t>(data.rows()) != labels.size())
    throw data_error("silhouette: label count does not match rows");

  std::vector<std::size_t> rows(labels.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  if (row_cap > 0 && rows.size() > row_cap) {
    Rng rng(seed);
    shuffle_indices(rows, rng);
    rows.resize(row_cap);
    std::sort(rows.begin(), rows.end());
  }

  std::map<int, std::size_t> cluster_of;
  for (std::size_t r : rows) cluster_of.emplace(labels[r], 0);
  if (cluster_of.size() < 2) throw data_error("silhouette: need at least 2 clusters");
  std::size_t next = 0;
  for (auto& [label, idx] : cluster_of) idx = next++;
  const std::size_t k = cluster_of.size();

  std::vector<std::size_t> cl(rows.size());
  std::vector<double> sizes(k, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    cl[i] = cluster_of[labels[rows[i]]];
    sizes[cl[i]] += 1.0;
  }

  double total = 0.0;
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    const auto xi = data.row(static_cast<Eigen::Index>(rows[i]));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (j == i) continue;
      sums[cl[j]] += (data.row(static_cast<Eigen::Index>(rows[j])) - xi).norm();
    }
    const std::size_t own = cl[i];
    if (sizes[own] < 2.0) continue;
    const double a = sums[own] / (sizes[own] - 1.0);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      if (c != own && sizes[c] > 0.0) b = std::min(b, sums[c] / sizes[c]);
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(rows.size());
}

}  // namespace chaoskit::cluster
