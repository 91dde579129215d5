#include <chaoskit/features/extract.hpp>
#include <chaoskit/synth/corpus.hpp>
#include <chaoskit/tree/audit.hpp>
#include <chaoskit/tree/chaos_tree.hpp>
#include <chaoskit/tree/reports.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <random>
#include <sstream>

using namespace chaoskit;
using namespace chaoskit::tree;
using features::FeatureTable;
using features::WindowFeatureVector;

namespace {

struct Corpus {
  FeatureTable table;
  std::vector<std::string> truth;  // generator class of each table row
  std::map<std::string, audio::AudioClip> clips;
};

Corpus build_corpus(double seconds_per_class, std::uint64_t seed, bool only_silence = false) {
  synth::SynthSpec spec;
  spec.seconds = {seconds_per_class, only_silence ? 0.0 : seconds_per_class, only_silence ? 0.0 : seconds_per_class,
                  only_silence ? 0.0 : seconds_per_class};
  spec.seed = seed;
  Corpus c;
  std::vector<WindowFeatureVector> rows;
  for (auto& item : synth::make_corpus(spec)) {
    auto w = features::extract_windows(item.clip);
    rows.insert(rows.end(), w.begin(), w.end());
    c.clips[item.clip.source_id] = item.clip;
  }
  c.table = FeatureTable(std::move(rows));
  for (const auto& r : c.table.rows()) c.truth.push_back(r.source_id);
  return c;
}

const Corpus& training_corpus() {
  static const Corpus c = build_corpus(240.0, 11);
  return c;
}

WindowFeatureVector row_with(std::initializer_list<std::pair<const char*, double>> values, std::size_t index,
                             const std::string& source = "s") {
  WindowFeatureVector r;
  r.source_id = source;
  r.window_index = index;
  r.window_start_s = 10.0 * static_cast<double>(index);
  for (const auto& [name, v] : values) r.values[features::feature_index(name)] = v;
  return r;
}

TreeSpec one_split(const std::string& feature) {
  TreeSpec s;
  s.root = std::make_shared<SplitSpec>(SplitSpec{{feature}, std::string("a"), std::string("b")});
  return s;
}

std::vector<TreePrediction> preds_with(const std::vector<std::pair<std::string, std::size_t>>& counts,
                                       const std::string& source = "s") {
  std::vector<TreePrediction> out;
  for (const auto& [label, n] : counts)
    for (std::size_t i = 0; i < n; ++i) {
      TreePrediction p;
      p.source_id = source;
      p.label = label;
      p.window_start_s = 10.0 * static_cast<double>(out.size());
      out.push_back(p);
    }
  return out;
}

}  // namespace

TEST(TreeSpec, DefaultShape) {
  const auto spec = default_tree_spec();
  spec.validate();
  EXPECT_EQ(spec.split_count(), 4u);
  EXPECT_EQ(spec.leaf_count(), 5u);
  EXPECT_EQ(spec.leaf_count(), spec.split_count() + 1);
}

TEST(TreeSpec, JsonRoundTripAndChainForm) {
  const auto spec = default_tree_spec();
  const auto back = TreeSpec::from_json(spec.to_json());
  EXPECT_EQ(back.to_json(), spec.to_json());

  const auto chain = TreeSpec::from_json(io::Json::parse(R"({"splits": [
    {"features": ["raw_std"], "descend": "high", "leaf": "silence"},
    {"features": ["mfcc_std"], "descend": "low", "leaf": "x"},
    {"features": ["rmse_mean", "rmse_std"], "descend": "low", "leaf": "y"},
    {"features": ["centroid_std"], "leaves": {"low": "p", "high": "q"}}]})"));
  EXPECT_EQ(chain.split_count(), 4u);
  EXPECT_EQ(chain.leaf_count(), 5u);
  EXPECT_EQ(chain.leaf_labels(), (std::vector<std::string>{"silence", "p", "q", "y", "x"}));

  const auto single = TreeSpec::from_json(
      io::Json::parse(R"({"splits": [{"features": ["raw_std"], "leaves": {"low": "a", "high": "b"}}]})"));
  EXPECT_EQ(single.leaf_count(), 2u);
}

TEST(TreeSpec, RejectsBadInput) {
  EXPECT_THROW(TreeSpec::from_json(io::Json::parse(R"({"features": ["nope"], "low": "a", "high": "b"})")), Error);
  EXPECT_THROW(TreeSpec::from_json(io::Json::parse(R"({"features": ["raw_std"], "low": "a", "high": "a"})")), Error);
  EXPECT_THROW(TreeSpec::from_json(io::Json::parse(R"({"features": [], "low": "a", "high": "b"})")), Error);
  EXPECT_THROW(TreeSpec::from_json(io::Json::parse(R"({"splits": [{"features": ["raw_std"], "descend": "left", "leaf": "a"},
      {"features": ["raw_std"], "leaves": {"low": "b", "high": "c"}}]})")), Error);
}

TEST(ChaosTree, SyntheticLeavesArePure) {
  const auto& c = training_corpus();
  const auto fit = tree_fit(c.table, default_tree_spec(), 5);
  ASSERT_EQ(fit.model.leaves.size(), 5u);
  EXPECT_GT(fit.splits[0].silhouette, 0.90);
  std::vector<std::map<std::string, std::size_t>> per_leaf(5);
  for (std::size_t i = 0; i < c.truth.size(); ++i) ++per_leaf[fit.row_leaf[i]][c.truth[i]];
  for (std::size_t l = 0; l < 5; ++l) {
    std::size_t total = 0, best = 0;
    for (const auto& [cls, n] : per_leaf[l]) {
      total += n;
      best = std::max(best, n);
    }
    ASSERT_GT(total, 0u) << fit.model.leaves[l].label;
    EXPECT_GE(static_cast<double>(best) / static_cast<double>(total), 0.9) << fit.model.leaves[l].label;
  }
}

TEST(ChaosTree, RoutingIsAPartitionMatchingFit) {
  const auto& c = training_corpus();
  const auto fit = tree_fit(c.table, default_tree_spec(), 5);
  const auto preds = tree_predict(fit.model, c.table);
  ASSERT_EQ(preds.size(), c.table.size());
  std::vector<std::size_t> counts(fit.model.leaves.size(), 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    EXPECT_EQ(preds[i].leaf, fit.row_leaf[i]);
    ++counts[preds[i].leaf];
  }
  std::size_t total = 0;
  for (auto n : counts) total += n;
  EXPECT_EQ(total, c.table.size());
}

TEST(ChaosTree, HeldOutSilenceGoesToSilenceLeaf) {
  const auto fit = tree_fit(training_corpus().table, default_tree_spec(), 5);
  const auto silence = build_corpus(120.0, 99, true);
  const auto preds = tree_predict(fit.model, silence.table);
  std::size_t hits = 0;
  for (const auto& p : preds) hits += p.label == kSilence;
  EXPECT_GE(static_cast<double>(hits) / static_cast<double>(preds.size()), 0.9);
}

TEST(ChaosTree, PointMassesGiveNearIdealFirstSplit) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<WindowFeatureVector> rows;
  for (std::size_t i = 0; i < 60; ++i)
    rows.push_back(row_with({{"raw_mean", i % 2 ? 1.0 : -1.0}, {"raw_std", g(rng)}, {"zcr_mean", g(rng)}}, i));
  const FeatureTable t(rows);
  const auto fit = tree_fit(t, one_split("raw_mean"), 1);
  EXPECT_EQ(fit.model.leaves.size(), 2u);
  EXPECT_GT(fit.splits[0].silhouette, 0.95);
  for (std::size_t i = 0; i < t.size(); ++i)
    EXPECT_EQ(fit.row_leaf[i], t[i].values[features::raw_mean] < 0 ? 0u : 1u);
}

TEST(ChaosTree, TieGoesToLowChild) {
  std::vector<WindowFeatureVector> rows;
  for (std::size_t i = 0; i < 4; ++i) rows.push_back(row_with({{"raw_std", i < 2 ? 0.0 : 2.0}}, i));
  const auto fit = tree_fit(FeatureTable(rows), one_split("raw_std"), 1);
  const auto preds = tree_predict(fit.model, FeatureTable({row_with({{"raw_std", 1.0}}, 0)}));
  EXPECT_EQ(preds[0].label, "a");
}

TEST(ChaosTree, TooFewRowsNamesTheNode) {
  std::vector<WindowFeatureVector> rows;
  for (std::size_t i = 0; i < 5; ++i) rows.push_back(row_with({{"raw_std", i == 0 ? 10.0 : 0.0}}, i));
  TreeSpec spec;
  auto inner = std::make_shared<SplitSpec>(SplitSpec{{"zcr_mean"}, std::string("x"), std::string("y")});
  spec.root = std::make_shared<SplitSpec>(SplitSpec{{"raw_std"}, std::string("a"), inner});
  try {
    tree_fit(FeatureTable(rows), spec, 0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("root.high"), std::string::npos) << e.what();
  }
}

TEST(ChaosTree, NonSplitColumnScalingLeavesPredictionsUnchanged) {
  const auto& c = training_corpus();
  const auto fit = tree_fit(c.table, default_tree_spec(), 5);
  std::vector<WindowFeatureVector> rows = c.table.rows();
  for (auto& r : rows) {
    r.values[features::flatness_mean] = 3.0 * r.values[features::flatness_mean] + 1.0;
    r.values[features::zcr_std] = std::exp(r.values[features::zcr_std]);
  }
  const FeatureTable scaled(rows);
  const auto a = tree_predict(fit.model, c.table);
  const auto b = tree_predict(tree_fit(scaled, default_tree_spec(), 5).model, scaled);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].leaf, b[i].leaf);
}

TEST(ChaosTree, SeedChangesDoNotChangeThePartition) {
  const auto& c = training_corpus();
  const auto a = tree_fit(c.table, default_tree_spec(), 1);
  const auto b = tree_fit(c.table, default_tree_spec(), 2);
  EXPECT_EQ(a.row_leaf, b.row_leaf);
}

TEST(ChaosTree, DeterministicAndJsonRoundTrip) {
  const auto& c = training_corpus();
  const auto a = tree_fit(c.table, default_tree_spec(), 4);
  const auto b = tree_fit(c.table, default_tree_spec(), 4);
  EXPECT_EQ(a.model.to_json().dump(), b.model.to_json().dump());
  const auto back = ChaosTreeModel::from_json(io::Json::parse(a.model.to_json().dump()));
  const auto pa = tree_predict(a.model, c.table);
  const auto pb = tree_predict(back, c.table);
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i].leaf, pb[i].leaf);
}

TEST(LevelMap, DefaultGivesOneNoneTwoLowTwoHigh) {
  const auto fit = tree_fit(training_corpus().table, default_tree_spec(), 5);
  const auto m = level_map(fit.model, default_level_map());
  std::map<std::string, int> n;
  for (const auto& l : m.leaves) ++n[l.chaos_level];
  EXPECT_EQ(n["none"], 1);
  EXPECT_EQ(n["low"], 2);
  EXPECT_EQ(n["high"], 2);
}

TEST(LevelMap, OverrideAndMissingLabel) {
  const auto fit = tree_fit(training_corpus().table, default_tree_spec(), 5);
  LevelMap all_low;
  for (const auto& l : fit.model.leaves) all_low[l.label] = "low";
  const auto m = level_map(fit.model, all_low);
  for (const auto& p : tree_predict(m, training_corpus().table)) EXPECT_EQ(p.chaos_level, "low");

  auto partial = default_level_map();
  partial.erase(kLoudWhiteNoise);
  try {
    level_map(fit.model, partial);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(kLoudWhiteNoise), std::string::npos);
  }
  auto bad = default_level_map();
  bad[kSilence] = "medium";
  EXPECT_THROW(level_map(fit.model, bad), Error);
}

TEST(Proportions, Examples) {
  auto r = time_proportions(preds_with({{kSilence, 10}}));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_DOUBLE_EQ(r[0].proportion, 1.0);

  r = time_proportions(preds_with({{kSilence, 5}, {kLoudWhiteNoise, 5}}));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r[0].proportion, 0.5);
  EXPECT_DOUBLE_EQ(r[1].proportion, 0.5);

  r = time_proportions(preds_with({{"a", 10}, {"b", 20}, {"c", 30}, {"d", 40}}));
  ASSERT_EQ(r.size(), 4u);
  EXPECT_NEAR(r[0].proportion, 0.1, 1e-15);
  EXPECT_NEAR(r[1].proportion, 0.2, 1e-15);
  EXPECT_NEAR(r[2].proportion, 0.3, 1e-15);
  EXPECT_NEAR(r[3].proportion, 0.4, 1e-15);
}

TEST(Proportions, ExcludesCryingByDefaultAndSumsToOne) {
  auto preds = preds_with({{kInfantCrying, 7}, {kSilence, 3}, {kLowHumanSounds, 5}}, "x");
  const auto more = preds_with({{kLoudHumanNoise, 4}, {kSilence, 9}, {kLoudWhiteNoise, 2}}, "y");
  preds.insert(preds.end(), more.begin(), more.end());
  const auto r = time_proportions(preds);
  std::map<std::string, double> sums;
  for (const auto& row : r) {
    EXPECT_NE(row.label, kInfantCrying);
    EXPECT_GE(row.proportion, 0.0);
    EXPECT_LE(row.proportion, 1.0);
    sums[row.source_id] += row.proportion;
  }
  ASSERT_EQ(sums.size(), 2u);
  for (const auto& [s, v] : sums) EXPECT_NEAR(v, 1.0, 1e-9);
  EXPECT_THROW(time_proportions(preds_with({{kInfantCrying, 3}})), Error);
  EXPECT_THROW(time_proportions({}), Error);
}

TEST(FeatureSweep, PointMassesThenNoiseDilutes) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<WindowFeatureVector> rows;
  for (std::size_t i = 0; i < 80; ++i)
    rows.push_back(row_with({{"raw_mean", i % 2 ? 1.0 : -1.0}, {"zcr_mean", g(rng)}}, i));
  const FeatureTable t(rows);
  const auto sweep = feature_sweep(t, {"raw_mean", "zcr_mean"}, {2, 3}, 1);
  ASSERT_EQ(sweep.size(), 4u);
  EXPECT_EQ(sweep[0].k, 2u);
  EXPECT_GT(sweep[0].silhouette, 0.95);
  EXPECT_EQ(sweep[2].n_features, 2u);
  EXPECT_LT(sweep[2].silhouette, sweep[0].silhouette);
  for (const auto& r : sweep) EXPECT_TRUE(r.silhouette >= -1.0 && r.silhouette <= 1.0);
  EXPECT_THROW(feature_sweep(t, {}), Error);
}

class AuditTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = std::filesystem::temp_directory_path() /
          ("chaoskit_audit_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir);
    clip.sample_rate_hz = 8000;
    clip.source_id = "rec";
    clip.samples.assign(8000 * 600, 0.25);
  }
  void TearDown() override { std::filesystem::remove_all(dir); }

  ClipResolver resolver() {
    return [this](const std::string& id) -> const audio::AudioClip& {
      if (id != clip.source_id) throw io_error("no clip for " + id);
      return clip;
    };
  }

  std::filesystem::path dir;
  audio::AudioClip clip;
};

TEST_F(AuditTest, SmallLeafIsTakenWhole) {
  auto preds = preds_with({{"a", 30}, {"b", 8}}, "rec");
  const auto m = audit_sample(preds, resolver(), dir, 5, 3);
  EXPECT_EQ(m.size(), 10u);
  const auto all = audit_sample(preds, resolver(), dir, 50, 3);
  std::map<std::string, int> n;
  for (const auto& e : all) {
    ++n[e.leaf_label];
    EXPECT_TRUE(e.verdict.empty());
    const auto wav = audio::load_audio(dir / e.clip_path);
    EXPECT_DOUBLE_EQ(wav.duration_s(), 10.0);
  }
  EXPECT_EQ(n["a"], 30);
  EXPECT_EQ(n["b"], 8);
}

TEST_F(AuditTest, SameSeedSameManifest) {
  auto preds = preds_with({{"a", 30}, {"b", 12}}, "rec");
  std::ostringstream x, y, z;
  write_manifest(x, audit_sample(preds, resolver(), dir, 5, 9));
  write_manifest(y, audit_sample(preds, resolver(), dir, 5, 9));
  write_manifest(z, audit_sample(preds, resolver(), dir, 5, 10));
  EXPECT_EQ(x.str(), y.str());
  EXPECT_NE(x.str(), z.str());
  EXPECT_EQ(x.str().substr(0, x.str().find('\n')), "leaf_label,source_id,window_start_s,clip_path,verdict");
}

TEST_F(AuditTest, UnresolvableClip) {
  EXPECT_THROW(audit_sample(preds_with({{"a", 3}}, "missing"), resolver(), dir), Error);
}

TEST(AuditScore, PublishedCountsGiveMeanOf0812) {
  std::vector<AuditEntry> entries;
  const std::pair<const char*, int> counts[] = {
      {kInfantCrying, 45}, {kLowHumanSounds, 47}, {kLoudHumanNoise, 28}, {kSilence, 41}, {kLoudWhiteNoise, 42}};
  for (const auto& [label, correct] : counts)
    for (int i = 0; i < 50; ++i) entries.push_back({label, "s", 10.0 * i, "", i < correct ? "correct" : "incorrect"});
  const auto s = score_audit(entries);
  ASSERT_EQ(s.clusters.size(), 5u);
  const double expected[] = {0.90, 0.94, 0.56, 0.82, 0.84};
  double manual = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(s.clusters[i].accuracy, expected[i], 1e-15);
    manual += static_cast<double>(counts[i].second) / 50.0;
  }
  EXPECT_DOUBLE_EQ(s.mean_accuracy, manual / 5.0);
  EXPECT_EQ(io::format_real(s.mean_accuracy, 3), "0.812");
}

TEST(AuditScore, UnsureLeavesTheDenominator) {
  std::vector<AuditEntry> e = {{"a", "s", 0, "", "correct"},   {"a", "s", 10, "", "Unsure"},
                               {"a", "s", 20, "", "incorrect"}, {"b", "s", 0, "", "unsure"}};
  const auto s = score_audit(e);
  ASSERT_EQ(s.clusters.size(), 1u);
  EXPECT_DOUBLE_EQ(s.clusters[0].accuracy, 0.5);
  EXPECT_EQ(s.clusters[0].unsure, 1u);
  EXPECT_EQ(s.skipped, std::vector<std::string>{"b"});
  e[0].verdict = "";
  EXPECT_THROW(score_audit(e), Error);
}
