#pragma once

#include "../types.hpp"
#include "feature_table.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace chaoskit::features {

inline constexpr double kCorrelationThreshold = 0.85;

struct CorrelatedPair {
  std::size_t a = 0;
  std::size_t b = 0;
  double r = 0.0;
};

struct CorrelationReport {
  std::vector<std::string> columns;
  Matrix r;                                 // symmetric, unit diagonal
  std::vector<CorrelatedPair> pairs;        // |r| > threshold, a < b
  std::vector<std::size_t> constant_columns;
};

/// Pearson correlation of every column pair. Constant columns get r = 0
/// against everything else.
inline CorrelationReport correlation_matrix(const Matrix& data, std::vector<std::string> columns,
                                            double threshold = kCorrelationThreshold) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (n < 2) throw data_error("correlation_matrix: need at least 2 rows");
  if (static_cast<Eigen::Index>(columns.size()) != d)
    throw data_error("correlation_matrix: column name count mismatch");

  const RowVector mean = data.colwise().mean();
  const Matrix centered = data.rowwise() - mean;
  Vector norm(d);
  for (Eigen::Index j = 0; j < d; ++j) norm(j) = centered.col(j).norm();

  CorrelationReport rep;
  rep.columns = std::move(columns);
  rep.r = Matrix::Identity(d, d);
  const double scale = std::max(1.0, mean.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < d; ++j)
    if (norm(j) <= 1e-12 * scale * std::sqrt(static_cast<double>(n)))
      rep.constant_columns.push_back(static_cast<std::size_t>(j));
  auto is_constant = [&](Eigen::Index j) {
    for (auto c : rep.constant_columns)
      if (static_cast<Eigen::Index>(c) == j) return true;
    return false;
  };

  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      double r = 0.0;
      if (!is_constant(a) && !is_constant(b))
        r = std::clamp(centered.col(a).dot(centered.col(b)) / (norm(a) * norm(b)), -1.0, 1.0);
      rep.r(a, b) = rep.r(b, a) = r;
      if (std::abs(r) > threshold)
        rep.pairs.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b), r});
    }
  }
  return rep;
}

inline CorrelationReport correlation_matrix(const FeatureTable& table, double threshold = kCorrelationThreshold) {
  return correlation_matrix(table.matrix(), FeatureTable::all_columns(), threshold);
}

/// Greedy column filter in schema order: a column is kept when its |r| with
/// every already-kept column is at most the threshold. Constant columns are
/// dropped. Stops after max_columns (0 = unlimited).
inline std::vector<std::string> uncorrelated_columns(const CorrelationReport& rep, std::size_t max_columns = 0,
                                                     double threshold = kCorrelationThreshold) {
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < rep.columns.size(); ++j) {
    if (std::find(rep.constant_columns.begin(), rep.constant_columns.end(), j) != rep.constant_columns.end())
      continue;
    bool ok = true;
    for (std::size_t k : kept)
      if (std::abs(rep.r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))) > threshold) ok = false;
    if (ok) kept.push_back(j);
    if (max_columns && kept.size() == max_columns) break;
  }
  std::vector<std::string> out;
  for (auto j : kept) out.push_back(rep.columns[j]);
  return out;
}

}  // namespace chaoskit::features
