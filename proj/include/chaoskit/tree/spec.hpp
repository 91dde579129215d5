#pragma once

#include "../features/schema.hpp"
#include "../io/json_io.hpp"

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace chaoskit::tree {

inline constexpr const char* kInfantCrying = "infant crying/fussing";
inline constexpr const char* kLowHumanSounds = "low human sounds";
inline constexpr const char* kLoudHumanNoise = "loud human noise/overlap";
inline constexpr const char* kSilence = "silence";
inline constexpr const char* kLoudWhiteNoise = "loud white noise";

/// A binary split on a feature subset. Each side is either a leaf label or a
/// further split. "low" is the child whose centroid has the smaller value of
/// the first listed feature.
struct SplitSpec {
  using Child = std::variant<std::string, std::shared_ptr<SplitSpec>>;
  std::vector<std::string> features;
  Child low;
  Child high;
};

struct TreeSpec {
  std::shared_ptr<SplitSpec> root;

  std::size_t split_count() const { return count(root, true); }
  std::size_t leaf_count() const { return count(root, false); }

  std::vector<std::string> leaf_labels() const {
    std::vector<std::string> out;
    collect(root, out);
    return out;
  }

  void validate() const {
    if (!root) throw config_error("tree spec: empty");
    validate_node(*root, "root");
    const auto labels = leaf_labels();
    const std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() != labels.size()) throw config_error("tree spec: leaf labels must be unique");
  }

  static TreeSpec from_json(const io::Json& j);
  io::Json to_json() const { return node_json(*root); }

 private:
  static std::size_t count(const std::shared_ptr<SplitSpec>& n, bool splits) {
    if (!n) return 0;
    std::size_t c = splits ? 1 : 0;
    for (const auto* child : {&n->low, &n->high}) {
      if (auto p = std::get_if<std::shared_ptr<SplitSpec>>(child)) c += count(*p, splits);
      else if (!splits) c += 1;
    }
    return c;
  }

  static void collect(const std::shared_ptr<SplitSpec>& n, std::vector<std::string>& out) {
    for (const auto* child : {&n->low, &n->high}) {
      if (auto p = std::get_if<std::shared_ptr<SplitSpec>>(child)) collect(*p, out);
      else out.push_back(std::get<std::string>(*child));
    }
  }

  static void validate_node(const SplitSpec& n, const std::string& path) {
    if (n.features.empty()) throw config_error("tree spec: split at " + path + " has no features");
    const std::set<std::string> unique(n.features.begin(), n.features.end());
    if (unique.size() != n.features.size()) throw config_error("tree spec: duplicate feature at " + path);
    for (const auto& f : n.features) features::feature_index(f);
    const char* sides[2] = {"low", "high"};
    const SplitSpec::Child* children[2] = {&n.low, &n.high};
    for (int s = 0; s < 2; ++s) {
      if (auto p = std::get_if<std::shared_ptr<SplitSpec>>(children[s])) {
        if (!*p) throw config_error("tree spec: null child at " + path + "." + sides[s]);
        validate_node(**p, path + "." + sides[s]);
      } else if (std::get<std::string>(*children[s]).empty()) {
        throw config_error("tree spec: empty leaf label at " + path + "." + sides[s]);
      }
    }
  }

  static io::Json child_json(const SplitSpec::Child& c) {
    if (auto p = std::get_if<std::shared_ptr<SplitSpec>>(&c)) return node_json(**p);
    return std::get<std::string>(c);
  }

  static io::Json node_json(const SplitSpec& n) {
    return {{"features", n.features}, {"low", child_json(n.low)}, {"high", child_json(n.high)}};
  }
};

namespace detail {

inline std::shared_ptr<SplitSpec> node_from_json(const io::Json& j);

inline SplitSpec::Child child_from_json(const io::Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_object()) return node_from_json(j);
  throw config_error("tree spec: child must be a label string or a split object");
}

inline std::shared_ptr<SplitSpec> node_from_json(const io::Json& j) {
  if (!j.is_object() || !j.contains("features") || !j.contains("low") || !j.contains("high"))
    throw config_error("tree spec: split needs 'features', 'low' and 'high'");
  auto n = std::make_shared<SplitSpec>();
  n->features = j.at("features").get<std::vector<std::string>>();
  n->low = child_from_json(j.at("low"));
  n->high = child_from_json(j.at("high"));
  return n;
}

// Ordered chain: each split names the branch the next split descends into
// and labels the other; the last split labels both.
inline std::shared_ptr<SplitSpec> chain_from_json(const io::Json& splits) {
  if (!splits.is_array() || splits.empty()) throw config_error("tree spec: 'splits' must be a non-empty list");
  std::shared_ptr<SplitSpec> next;
  for (auto it = splits.rbegin(); it != splits.rend(); ++it) {
    const auto& s = *it;
    auto n = std::make_shared<SplitSpec>();
    n->features = s.at("features").get<std::vector<std::string>>();
    if (!next) {
      const auto& leaves = s.at("leaves");
      n->low = leaves.at("low").get<std::string>();
      n->high = leaves.at("high").get<std::string>();
    } else {
      const auto descend = s.at("descend").get<std::string>();
      const auto leaf = s.at("leaf").get<std::string>();
      if (descend == "low") {
        n->low = next;
        n->high = leaf;
      } else if (descend == "high") {
        n->low = leaf;
        n->high = next;
      } else {
        throw config_error("tree spec: 'descend' must be 'low' or 'high'");
      }
    }
    next = n;
  }
  return next;
}

}  // namespace detail

inline TreeSpec TreeSpec::from_json(const io::Json& j) {
  TreeSpec spec;
  try {
    spec.root = j.contains("splits") ? detail::chain_from_json(j.at("splits")) : detail::node_from_json(j);
  } catch (const io::Json::exception& e) {
    throw config_error(std::string("tree spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

/// Silence and near-silence split off on waveform spread first, then the
/// loud side separates steady broadband noise from bursty tonal sound.
inline TreeSpec default_tree_spec() {
  auto tonal = std::make_shared<SplitSpec>(SplitSpec{{"centroid_std"}, kLoudHumanNoise, kInfantCrying});
  auto loud = std::make_shared<SplitSpec>(SplitSpec{{"rmse_mean", "rmse_std"}, tonal, kLoudWhiteNoise});
  auto quiet = std::make_shared<SplitSpec>(SplitSpec{{"mfcc_std"}, kLowHumanSounds, kSilence});
  TreeSpec spec;
  spec.root = std::make_shared<SplitSpec>(SplitSpec{{"raw_std"}, quiet, loud});
  return spec;
}

}  // namespace chaoskit::tree
