#pragma once

#include "../io/json_io.hpp"
#include "../types.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace chaoskit::cluster {

struct CvReport {
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  std::string classifier = "weighted-knn";
  io::Json config;

  io::Json to_json() const {
    return {{"classifier", classifier}, {"fold_accuracies", fold_accuracies}, {"mean_accuracy", mean_accuracy},
            {"config", config}};
  }
};

/// Inverse-square-distance vote over the k nearest training rows; ties in
/// distance resolve to the lower row index, ties in vote to the lower label.
inline int knn_predict_one(const Matrix& train, const std::vector<int>& train_labels,
                           const Eigen::Ref<const RowVector>& x, std::size_t k) {
  const auto n = static_cast<std::size_t>(train.rows());
  std::vector<std::pair<double, std::size_t>> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = {(train.row(static_cast<Eigen::Index>(i)) - x).squaredNorm(), i};
  const std::size_t kk = std::min(k, n);
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
  std::map<int, double> votes;
  for (std::size_t i = 0; i < kk; ++i) votes[train_labels[d[i].second]] += 1.0 / (d[i].first + 1e-12);
  int best = votes.begin()->first;
  double best_w = -1.0;
  for (const auto& [label, w] : votes)
    if (w > best_w) {
      best_w = w;
      best = label;
    }
  return best;
}

/// Stratified k-fold cross-validation of the weighted KNN classifier. Each
/// class's rows are shuffled with `seed` and dealt round-robin into folds.
inline CvReport knn_weighted_cv(const Matrix& data, const std::vector<int>& labels, std::size_t k_neighbors = 10,
                                std::uint64_t seed = 0, std::size_t folds = 5) {
  if (static_cast<std::size_t>(data.rows()) != labels.size()) throw data_error("knn: label count does not match rows");
  if (k_neighbors == 0 || folds < 2) throw config_error("knn: k_neighbors must be positive and folds >= 2");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [label, rows] : by_class)
    if (rows.size() < folds)
      throw data_error("knn: class " + std::to_string(label) + " has " + std::to_string(rows.size()) +
                       " samples, need at least " + std::to_string(folds));

  Rng rng(seed);
  std::vector<std::size_t> fold_of(labels.size());
  for (auto& [label, rows] : by_class) {
    shuffle_indices(rows, rng);
    for (std::size_t i = 0; i < rows.size(); ++i) fold_of[rows[i]] = i % folds;
  }

  CvReport rep;
  rep.config = {{"k_neighbors", k_neighbors}, {"folds", folds}, {"rng_seed", seed}, {"weights", "1/(d^2+1e-12)"}};
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train_idx, test_idx;
    for (std::size_t i = 0; i < labels.size(); ++i) (fold_of[i] == f ? test_idx : train_idx).push_back(static_cast<Eigen::Index>(i));
    Matrix train(static_cast<Eigen::Index>(train_idx.size()), data.cols());
    std::vector<int> train_labels;
    for (std::size_t i = 0; i < train_idx.size(); ++i) {
      train.row(static_cast<Eigen::Index>(i)) = data.row(train_idx[i]);
      train_labels.push_back(labels[static_cast<std::size_t>(train_idx[i])]);
    }
    std::size_t correct = 0;
    for (auto t : test_idx)
      correct += knn_predict_one(train, train_labels, data.row(t), k_neighbors) == labels[static_cast<std::size_t>(t)];
    rep.fold_accuracies.push_back(static_cast<double>(correct) / static_cast<double>(test_idx.size()));
  }
  rep.mean_accuracy = std::accumulate(rep.fold_accuracies.begin(), rep.fold_accuracies.end(), 0.0) /
                      static_cast<double>(folds);
  return rep;
}

inline CvReport knn_weighted_cv5(const Matrix& data, const std::vector<int>& labels, std::size_t k_neighbors = 10,
                                 std::uint64_t seed = 0) {
  return knn_weighted_cv(data, labels, k_neighbors, seed, 5);
}

}  // namespace chaoskit::cluster
