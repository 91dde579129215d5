#pragma once

#include "../cluster/kmeans.hpp"
#include "../cluster/silhouette.hpp"
#include "../cluster/standardize.hpp"
#include "../features/feature_table.hpp"
#include "chaos_tree.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace chaoskit::tree {

struct ProportionRow {
  std::string source_id;
  std::string label;
  std::size_t windows = 0;
  double proportion = 0.0;
};

/// Share of each source's windows per leaf label after dropping the excluded
/// labels. Sources left with no windows are omitted.
inline std::vector<ProportionRow> time_proportions(const std::vector<TreePrediction>& preds,
                                                   const std::set<std::string>& exclude = {kInfantCrying}) {
  if (preds.empty()) throw data_error("time_proportions: no predictions");
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  std::size_t kept = 0;
  for (const auto& p : preds) {
    if (exclude.count(p.label)) continue;
    ++counts[p.source_id][p.label];
    ++kept;
  }
  if (kept == 0) throw data_error("time_proportions: every window carries an excluded label");
  std::vector<ProportionRow> out;
  for (const auto& [source, by_label] : counts) {
    std::size_t total = 0;
    for (const auto& [label, n] : by_label) total += n;
    for (const auto& [label, n] : by_label)
      out.push_back({source, label, n, static_cast<double>(n) / static_cast<double>(total)});
  }
  return out;
}

inline void write_proportions(std::ostream& out, const std::vector<ProportionRow>& rows) {
  out << "source_id,leaf_label,windows,proportion\n";
  for (const auto& r : rows)
    io::write_row(out, {r.source_id, r.label, std::to_string(r.windows), io::format_real(r.proportion)});
}

struct SweepRow {
  std::size_t n_features = 0;
  std::string added_feature;
  std::size_t k = 0;
  double silhouette = 0.0;
};

/// Flat K-Means silhouette for every growing prefix of `candidates` and
/// every k, on z-scored prefix columns.
inline std::vector<SweepRow> feature_sweep(const features::FeatureTable& table,
                                           const std::vector<std::string>& candidates,
                                           const std::vector<std::size_t>& k_values = {2, 3}, std::uint64_t seed = 0,
                                           const cluster::KMeansOptions& opt = {}) {
  if (candidates.empty()) throw config_error("feature_sweep: no candidate features");
  if (k_values.empty()) throw config_error("feature_sweep: no k values");
  std::vector<SweepRow> out;
  for (std::size_t p = 1; p <= candidates.size(); ++p) {
    const std::vector<std::string> cols(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(p));
    const Matrix z = cluster::Standardizer::fit(table.matrix(cols)).transform(table.matrix(cols));
    for (std::size_t k : k_values) {
      if (k < 2) throw config_error("feature_sweep: k must be at least 2");
      const auto model = cluster::kmeans_fit(z, k, seed, opt, cols);
      const auto labels = cluster::kmeans_predict(model, z);
      out.push_back({p, candidates[p - 1], k, cluster::silhouette_score(z, labels, cluster::kSilhouetteRowCap, seed)});
    }
  }
  return out;
}

inline void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "n_features,added_feature,k,silhouette\n";
  for (const auto& r : rows)
    io::write_row(out, {std::to_string(r.n_features), r.added_feature, std::to_string(r.k), io::format_real(r.silhouette)});
}

}  // namespace chaoskit::tree
