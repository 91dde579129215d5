#pragma once

#include "../cluster/kmeans.hpp"
#include "../cluster/silhouette.hpp"
#include "../cluster/standardize.hpp"
#include "../features/feature_table.hpp"
#include "spec.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace chaoskit::tree {

inline const std::vector<std::string>& chaos_levels() {
  static const std::vector<std::string> levels = {"none", "low", "high"};
  return levels;
}

using LevelMap = std::map<std::string, std::string>;

inline LevelMap default_level_map() {
  return {{kSilence, "none"},
          {kLowHumanSounds, "low"},
          {kInfantCrying, "low"},
          {kLoudWhiteNoise, "high"},
          {kLoudHumanNoise, "high"}};
}

struct TreeNode {
  std::string path;
  std::vector<std::string> features;
  cluster::Standardizer scaler;
  cluster::KMeansModel kmeans;  // centroid 0 is the "low" side
  double silhouette = 0.0;
  std::size_t n_rows = 0;
  // >= 0: node index; < 0: leaf index -(c + 1).
  int child[2] = {0, 0};
};

struct TreeLeaf {
  std::string label;
  std::string chaos_level;
  std::string path;
};

inline int leaf_ref(std::size_t leaf) { return -static_cast<int>(leaf) - 1; }
inline std::size_t leaf_of(int ref) { return static_cast<std::size_t>(-(ref + 1)); }

struct ChaosTreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::vector<TreeLeaf> leaves;
  std::uint64_t rng_seed = 0;

  /// Leaf index reached by one feature vector.
  std::size_t route(const features::FeatureValues& v) const {
    int at = 0;
    for (;;) {
      const auto& n = nodes[static_cast<std::size_t>(at)];
      Matrix x(1, static_cast<Eigen::Index>(n.features.size()));
      for (std::size_t j = 0; j < n.features.size(); ++j)
        x(0, static_cast<Eigen::Index>(j)) = v[features::feature_index(n.features[j])];
      const int side = cluster::nearest_centroid(n.scaler.transform(x).row(0), n.kmeans.centroids);
      at = n.child[side];
      if (at < 0) return leaf_of(at);
    }
  }

  io::Json to_json() const {
    auto j = io::model_header("chaos_tree");
    j["rng_seed"] = rng_seed;
    io::Json ns = io::Json::array();
    for (const auto& n : nodes)
      ns.push_back({{"path", n.path},
                    {"features", n.features},
                    {"scaler", n.scaler.to_json()},
                    {"kmeans", n.kmeans.to_json()},
                    {"silhouette", n.silhouette},
                    {"n_rows", n.n_rows},
                    {"children", {n.child[0], n.child[1]}}});
    j["nodes"] = ns;
    io::Json ls = io::Json::array();
    for (const auto& l : leaves) ls.push_back({{"label", l.label}, {"chaos_level", l.chaos_level}, {"path", l.path}});
    j["leaves"] = ls;
    return j;
  }

  static ChaosTreeModel from_json(const io::Json& j) {
    io::check_header(j, "chaos_tree");
    ChaosTreeModel m;
    m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    for (const auto& l : j.at("leaves"))
      m.leaves.push_back({l.at("label").get<std::string>(), l.at("chaos_level").get<std::string>(),
                          l.at("path").get<std::string>()});
    for (const auto& jn : j.at("nodes")) {
      TreeNode n;
      n.path = jn.at("path").get<std::string>();
      n.features = jn.at("features").get<std::vector<std::string>>();
      n.scaler = cluster::Standardizer::from_json(jn.at("scaler"));
      n.kmeans = cluster::KMeansModel::from_json(jn.at("kmeans"));
      n.silhouette = jn.at("silhouette").get<double>();
      n.n_rows = jn.at("n_rows").get<std::size_t>();
      const auto c = jn.at("children").get<std::vector<int>>();
      if (c.size() != 2) throw data_error("chaos_tree: node needs two children");
      n.child[0] = c[0];
      n.child[1] = c[1];
      m.nodes.push_back(std::move(n));
    }
    m.validate();
    return m;
  }

  void validate() const {
    if (nodes.empty()) throw data_error("chaos_tree: no nodes");
    std::vector<int> seen_leaf(leaves.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      if (n.kmeans.centroids.rows() != 2 || n.kmeans.centroids.cols() != static_cast<Eigen::Index>(n.features.size()) ||
          n.scaler.dim() != static_cast<Eigen::Index>(n.features.size()))
        throw data_error("chaos_tree: node " + n.path + " has inconsistent shapes");
      for (int c : n.child) {
        if (c >= 0 && (static_cast<std::size_t>(c) <= i || static_cast<std::size_t>(c) >= nodes.size()))
          throw data_error("chaos_tree: node " + n.path + " has a bad child reference");
        if (c < 0) {
          if (leaf_of(c) >= leaves.size()) throw data_error("chaos_tree: node " + n.path + " points past the leaves");
          ++seen_leaf[leaf_of(c)];
        }
      }
    }
    for (int s : seen_leaf)
      if (s != 1) throw data_error("chaos_tree: every leaf must be reached by exactly one node");
  }
};

struct SplitReport {
  std::string path;
  std::vector<std::string> features;
  std::size_t n_rows = 0;
  double silhouette = 0.0;
  double inertia = 0.0;
  std::size_t low_rows = 0;
  std::size_t high_rows = 0;
};

struct TreeFit {
  ChaosTreeModel model;
  std::vector<SplitReport> splits;     // in node order
  std::vector<std::size_t> row_leaf;   // fit-time leaf of every table row
};

namespace detail {

struct TreeBuilder {
  const features::FeatureTable& table;
  const cluster::KMeansOptions& opt;
  Rng seeds;
  TreeFit fit;

  int build(const SplitSpec& spec, const std::vector<std::size_t>& rows, const std::string& path) {
    if (rows.size() < 2)
      throw data_error("tree_fit: node " + path + " received " + std::to_string(rows.size()) + " rows, need at least 2");
    const std::size_t index = fit.model.nodes.size();
    fit.model.nodes.emplace_back();

    Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(spec.features.size()));
    std::vector<std::size_t> cols;
    for (const auto& f : spec.features) cols.push_back(features::feature_index(f));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table[rows[i]].values[cols[j]];

    TreeNode node;
    node.path = path;
    node.features = spec.features;
    node.n_rows = rows.size();
    node.scaler = cluster::Standardizer::fit(x);
    const Matrix z = node.scaler.transform(x);
    const std::uint64_t node_seed = seeds();
    node.kmeans = cluster::kmeans_fit(z, 2, node_seed, opt, spec.features);
    // Scaling is monotone per column, so ordering on z matches original units.
    if (node.kmeans.centroids(1, 0) < node.kmeans.centroids(0, 0)) node.kmeans.centroids.row(0).swap(node.kmeans.centroids.row(1));

    const auto labels = cluster::kmeans_predict(node.kmeans, z);
    std::vector<std::size_t> side_rows[2];
    for (std::size_t i = 0; i < rows.size(); ++i) side_rows[labels[i]].push_back(rows[i]);
    const bool both = !side_rows[0].empty() && !side_rows[1].empty();
    node.silhouette = both ? cluster::silhouette_score(z, labels, cluster::kSilhouetteRowCap, node_seed) : 0.0;
    fit.splits.push_back({path, spec.features, rows.size(), node.silhouette, node.kmeans.inertia, side_rows[0].size(),
                          side_rows[1].size()});

    const char* names[2] = {"low", "high"};
    const SplitSpec::Child* children[2] = {&spec.low, &spec.high};
    int child_refs[2];
    for (int s = 0; s < 2; ++s) {
      const std::string child_path = path + "." + names[s];
      if (auto p = std::get_if<std::shared_ptr<SplitSpec>>(children[s])) {
        child_refs[s] = build(**p, side_rows[s], child_path);
      } else {
        const std::size_t leaf = fit.model.leaves.size();
        fit.model.leaves.push_back({std::get<std::string>(*children[s]), "", child_path});
        for (std::size_t r : side_rows[s]) fit.row_leaf[r] = leaf;
        child_refs[s] = leaf_ref(leaf);
      }
    }
    node.child[0] = child_refs[0];
    node.child[1] = child_refs[1];
    fit.model.nodes[index] = std::move(node);
    return static_cast<int>(index);
  }
};

}  // namespace detail

/// Fits one k=2 K-Means per split on the rows reaching it, each split
/// z-scoring only its own columns. Leaves carry the default chaos levels
/// when the label is known, otherwise an empty level until level_map.
inline TreeFit tree_fit(const features::FeatureTable& table, const TreeSpec& spec, std::uint64_t seed,
                        const cluster::KMeansOptions& opt = {}) {
  spec.validate();
  detail::TreeBuilder b{table, opt, Rng(seed), {}};
  b.fit.model.rng_seed = seed;
  b.fit.row_leaf.assign(table.size(), 0);
  std::vector<std::size_t> all(table.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  b.build(*spec.root, all, "root");
  const auto levels = default_level_map();
  for (auto& leaf : b.fit.model.leaves)
    if (auto it = levels.find(leaf.label); it != levels.end()) leaf.chaos_level = it->second;
  return std::move(b.fit);
}

/// Returns a copy of the model with every leaf's chaos level taken from
/// `mapping`.
inline ChaosTreeModel level_map(ChaosTreeModel model, const LevelMap& mapping) {
  const auto& valid = chaos_levels();
  for (auto& leaf : model.leaves) {
    const auto it = mapping.find(leaf.label);
    if (it == mapping.end()) throw config_error("level map: no chaos level for leaf '" + leaf.label + "'");
    if (std::find(valid.begin(), valid.end(), it->second) == valid.end())
      throw config_error("level map: '" + it->second + "' is not one of none/low/high");
    leaf.chaos_level = it->second;
  }
  return model;
}

inline LevelMap level_map_from_json(const io::Json& j) {
  if (!j.is_object()) throw config_error("level map: expected an object of label -> level");
  LevelMap m;
  for (const auto& [k, v] : j.items()) m[k] = v.get<std::string>();
  return m;
}

struct TreePrediction {
  std::string source_id;
  std::size_t window_index = 0;
  double window_start_s = 0.0;
  std::size_t leaf = 0;
  std::string label;
  std::string chaos_level;
};

inline std::vector<TreePrediction> tree_predict(const ChaosTreeModel& model, const features::FeatureTable& table) {
  std::vector<TreePrediction> out;
  out.reserve(table.size());
  for (const auto& row : table.rows()) {
    const std::size_t leaf = model.route(row.values);
    out.push_back({row.source_id, row.window_index, row.window_start_s, leaf, model.leaves[leaf].label,
                   model.leaves[leaf].chaos_level});
  }
  return out;
}

inline void write_predictions(std::ostream& out, const std::vector<TreePrediction>& preds) {
  out << "source_id,window_index,window_start_s,leaf_label,chaos_level\n";
  for (const auto& p : preds)
    io::write_row(out, {p.source_id, std::to_string(p.window_index), io::format_real(p.window_start_s), p.label,
                        p.chaos_level});
}

inline std::vector<TreePrediction> read_predictions(std::istream& in, const std::string& name) {
  const auto doc = io::read_csv(in, name);
  const std::vector<std::string> want = {"source_id", "window_index", "window_start_s", "leaf_label", "chaos_level"};
  if (doc.header != want) throw data_error(name + ": not a tree prediction table");
  std::vector<TreePrediction> out;
  for (const auto& f : doc.rows)
    out.push_back({f[0], static_cast<std::size_t>(io::parse_int(f[1], name)), io::parse_real(f[2], name), 0, f[3], f[4]});
  return out;
}

inline void write_split_report(std::ostream& out, const std::vector<SplitReport>& splits) {
  out << "node,features,n_rows,low_rows,high_rows,silhouette,inertia\n";
  for (const auto& s : splits) {
    std::string feats;
    for (const auto& f : s.features) feats += (feats.empty() ? "" : "+") + f;
    io::write_row(out, {s.path, feats, std::to_string(s.n_rows), std::to_string(s.low_rows),
                        std::to_string(s.high_rows), io::format_real(s.silhouette), io::format_real(s.inertia)});
  }
}

}  // namespace chaoskit::tree
