// Synthesizes two minutes of each sound class, extracts window features,
// fits the chaos tree and prints where each class ended up.

#include <chaoskit/features/extract.hpp>
#include <chaoskit/synth/corpus.hpp>
#include <chaoskit/tree/chaos_tree.hpp>

#include <cstdio>
#include <map>

using namespace chaoskit;

int main() {
  synth::SynthSpec spec;
  spec.seconds = {120.0, 120.0, 120.0, 120.0};
  spec.seed = 1;

  std::vector<features::WindowFeatureVector> rows;
  for (auto& item : synth::make_corpus(spec)) {
    item.clip.source_id = synth::class_name(item.cls);
    auto w = features::extract_windows(item.clip);
    rows.insert(rows.end(), w.begin(), w.end());
  }
  const features::FeatureTable table(std::move(rows));
  std::printf("%zu windows of %zu features\n", table.size(), features::kFeatureCount);

  const auto fit = tree::tree_fit(table, tree::default_tree_spec(), spec.seed);
  for (const auto& s : fit.splits)
    std::printf("split %-6s rows %3zu  silhouette %.3f  -> %zu / %zu\n", s.path.empty() ? "root" : s.path.c_str(),
                s.n_rows, s.silhouette, s.low_rows, s.high_rows);

  std::map<std::string, std::map<std::string, int>> counts;
  for (std::size_t i = 0; i < table.size(); ++i)
    ++counts[fit.model.leaves[fit.row_leaf[i]].label][table.rows()[i].source_id];
  for (const auto& leaf : fit.model.leaves) {
    std::printf("%-22s", leaf.label.c_str());
    for (const auto& [cls, n] : counts[leaf.label]) std::printf("  %s=%d", cls.c_str(), n);
    std::printf("\n");
  }
}
