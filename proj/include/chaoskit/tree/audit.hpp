#pragma once

#include "../audio/wav.hpp"
#include "../io/csv.hpp"
#include "chaos_tree.hpp"

#include <cctype>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace chaoskit::tree {

inline constexpr std::size_t kAuditPerLeaf = 50;
inline constexpr double kAuditClipSeconds = 10.0;

struct AuditEntry {
  std::string leaf_label;
  std::string source_id;
  double window_start_s = 0.0;
  std::string clip_path;  // relative to the manifest directory
  std::string verdict;    // empty until a listener fills it in
};

/// Turns a label into something safe for a directory name.
inline std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '_') out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "leaf" : out;
}

using ClipResolver = std::function<const audio::AudioClip&(const std::string& source_id)>;

/// Seeded sampling without replacement of up to `per_leaf` windows per leaf
/// label, exporting each sampled window as a WAV under `out_dir/clips`.
inline std::vector<AuditEntry> audit_sample(const std::vector<TreePrediction>& preds, const ClipResolver& resolve,
                                            const std::filesystem::path& out_dir, std::size_t per_leaf = kAuditPerLeaf,
                                            std::uint64_t seed = 0, double clip_s = kAuditClipSeconds) {
  if (per_leaf == 0) throw config_error("audit: per-leaf sample size must be positive");
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < preds.size(); ++i) by_label[preds[i].label].push_back(i);

  Rng master(seed);
  std::vector<AuditEntry> out;
  for (auto& [label, idx] : by_label) {
    Rng rng(master());
    shuffle_indices(idx, rng);
    if (idx.size() > per_leaf) idx.resize(per_leaf);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(preds[a].source_id, preds[a].window_start_s) < std::tie(preds[b].source_id, preds[b].window_start_s);
    });
    const auto dir = std::filesystem::path("clips") / slug(label);
    std::filesystem::create_directories(out_dir / dir);
    for (std::size_t i : idx) {
      const auto& p = preds[i];
      const audio::AudioClip& src = resolve(p.source_id);
      const auto start = static_cast<std::size_t>(std::llround(p.window_start_s * src.sample_rate_hz));
      if (start >= src.samples.size())
        throw data_error("audit: window at " + io::format_real(p.window_start_s) + " s lies outside '" + p.source_id + "'");
      const std::size_t len = std::min(src.samples.size() - start,
                                       static_cast<std::size_t>(std::llround(clip_s * src.sample_rate_hz)));
      audio::AudioClip piece;
      piece.sample_rate_hz = src.sample_rate_hz;
      piece.source_id = p.source_id;
      piece.samples.assign(src.samples.begin() + static_cast<std::ptrdiff_t>(start),
                           src.samples.begin() + static_cast<std::ptrdiff_t>(start + len));
      const auto rel = dir / (slug(p.source_id) + "_" + std::to_string(std::llround(p.window_start_s * 1000.0)) + "ms.wav");
      audio::write_wav16(out_dir / rel, piece);
      out.push_back({label, p.source_id, p.window_start_s, rel.generic_string(), ""});
    }
  }
  return out;
}

inline constexpr const char* kManifestHeader = "leaf_label,source_id,window_start_s,clip_path,verdict";

inline void write_manifest(std::ostream& out, const std::vector<AuditEntry>& entries) {
  out << kManifestHeader << '\n';
  for (const auto& e : entries)
    io::write_row(out, {e.leaf_label, e.source_id, io::format_real(e.window_start_s), e.clip_path, e.verdict});
}

inline std::vector<AuditEntry> read_manifest(std::istream& in, const std::string& name) {
  const auto doc = io::read_csv(in, name);
  if (doc.header != io::split_csv_line(kManifestHeader)) throw data_error(name + ": not an audit manifest");
  std::vector<AuditEntry> out;
  for (const auto& f : doc.rows) out.push_back({f[0], f[1], io::parse_real(f[2], name), f[3], f[4]});
  return out;
}

struct AuditScore {
  std::string leaf_label;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t unsure = 0;
  double accuracy = 0.0;  // correct / (correct + incorrect)
};

struct AuditSummary {
  std::vector<AuditScore> clusters;  // clusters with at least one decided verdict
  std::vector<std::string> skipped;  // clusters where every verdict was unsure
  double mean_accuracy = 0.0;        // unweighted mean over scored clusters
};

inline std::string normalize_verdict(const std::string& v) {
  std::string s;
  for (char c : v)
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Scores a filled-in manifest. "unsure" verdicts are counted but left out of
/// the denominator.
inline AuditSummary score_audit(const std::vector<AuditEntry>& entries) {
  if (entries.empty()) throw data_error("audit: manifest has no rows");
  std::map<std::string, AuditScore> by_label;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string v = normalize_verdict(e.verdict);
    if (!by_label.count(e.leaf_label)) order.push_back(e.leaf_label);
    auto& s = by_label[e.leaf_label];
    s.leaf_label = e.leaf_label;
    if (v == "correct") ++s.correct;
    else if (v == "incorrect") ++s.incorrect;
    else if (v == "unsure") ++s.unsure;
    else
      throw data_error("audit: row " + std::to_string(i + 2) + " has verdict '" + e.verdict +
                       "', expected correct, incorrect or unsure");
  }
  AuditSummary out;
  double sum = 0.0;
  for (const auto& label : order) {
    auto s = by_label[label];
    const std::size_t decided = s.correct + s.incorrect;
    if (decided == 0) {
      out.skipped.push_back(label);
      continue;
    }
    s.accuracy = static_cast<double>(s.correct) / static_cast<double>(decided);
    sum += s.accuracy;
    out.clusters.push_back(s);
  }
  if (out.clusters.empty()) throw data_error("audit: no cluster has a decided verdict");
  out.mean_accuracy = sum / static_cast<double>(out.clusters.size());
  return out;
}

inline void write_audit_scores(std::ostream& out, const AuditSummary& s) {
  out << "leaf_label,correct,incorrect,unsure,accuracy\n";
  for (const auto& c : s.clusters)
    io::write_row(out, {c.leaf_label, std::to_string(c.correct), std::to_string(c.incorrect), std::to_string(c.unsure),
                        io::format_real(c.accuracy)});
  io::write_row(out, {"mean", "", "", "", io::format_real(s.mean_accuracy)});
}

}  // namespace chaoskit::tree
