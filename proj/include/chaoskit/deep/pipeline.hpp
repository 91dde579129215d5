#pragma once

#include "../ae/autoencoder.hpp"
#include "../cluster/kmeans.hpp"
#include "../cluster/silhouette.hpp"
#include "../io/csv.hpp"
#include "mel_input.hpp"

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace chaoskit::deep {

inline constexpr std::size_t kVoteWindowSeconds = 11;

/// Fitted mel -> encoder -> K-Means chain with a binary chaos verdict per
/// cluster.
struct DeepPipelineModel {
  MelInputConfig mel;
  MelScaler scaler;
  ae::MlpAutoencoder encoder;
  cluster::KMeansModel kmeans;
  std::vector<bool> cluster_chaos;
  std::vector<double> cluster_rms;  // mean per-second RMS of the fitting seconds
  double silhouette = 0.0;
  std::size_t vote_window_s = kVoteWindowSeconds;

  std::size_t k() const { return kmeans.k; }

  void validate() const {
    mel.validate();
    encoder.validate();
    if (encoder.in_dim() != mel.in_dim())
      throw data_error("pipeline: encoder expects " + std::to_string(encoder.in_dim()) + " inputs, mel gives " +
                       std::to_string(mel.in_dim()));
    if (static_cast<std::size_t>(kmeans.centroids.cols()) != encoder.latent_dim())
      throw data_error("pipeline: k-means centroids do not match the latent width");
    if (cluster_chaos.size() != kmeans.k) throw data_error("pipeline: mapping must cover every cluster");
    if (vote_window_s == 0) throw config_error("pipeline: vote window must be positive");
  }

  /// The encoder is stored by reference: a path (relative to the pipeline
  /// file) plus a checksum of its JSON.
  io::Json to_json(const std::string& encoder_path) const {
    auto j = io::model_header("deep_pipeline");
    j["mel"] = mel.to_json();
    j["scaler"] = scaler.to_json();
    j["encoder"] = {{"path", encoder_path}, {"checksum", hex64(fnv1a(encoder.to_json().dump()))}};
    j["kmeans"] = kmeans.to_json();
    j["cluster_chaos"] = std::vector<int>(cluster_chaos.begin(), cluster_chaos.end());
    j["cluster_rms"] = cluster_rms;
    j["silhouette"] = silhouette;
    j["vote_window_s"] = vote_window_s;
    return j;
  }

  static DeepPipelineModel from_json(const io::Json& j, const ae::MlpAutoencoder& encoder) {
    io::check_header(j, "deep_pipeline");
    const auto want = j.at("encoder").at("checksum").get<std::string>();
    if (hex64(fnv1a(encoder.to_json().dump())) != want)
      throw data_error("pipeline: encoder checksum mismatch (expected " + want + ")");
    DeepPipelineModel m;
    m.mel = MelInputConfig::from_json(j.at("mel"));
    m.scaler = MelScaler::from_json(j.at("scaler"));
    m.encoder = encoder;
    m.kmeans = cluster::KMeansModel::from_json(j.at("kmeans"));
    for (int v : j.at("cluster_chaos").get<std::vector<int>>()) m.cluster_chaos.push_back(v != 0);
    m.cluster_rms = j.value("cluster_rms", std::vector<double>{});
    m.silhouette = j.value("silhouette", 0.0);
    m.vote_window_s = j.value("vote_window_s", kVoteWindowSeconds);
    m.validate();
    return m;
  }
};

inline void save_pipeline(const DeepPipelineModel& m, const std::filesystem::path& pipeline_json,
                          const std::string& encoder_file = "encoder.json") {
  const auto dir = pipeline_json.parent_path();
  io::write_json(dir / encoder_file, m.encoder.to_json());
  io::write_json(pipeline_json, m.to_json(encoder_file));
}

inline DeepPipelineModel load_pipeline(const std::filesystem::path& pipeline_json) {
  const auto j = io::read_json(pipeline_json);
  io::check_header(j, "deep_pipeline");
  const auto enc = ae::MlpAutoencoder::from_json(
      io::read_json(pipeline_json.parent_path() / j.at("encoder").at("path").get<std::string>()));
  return DeepPipelineModel::from_json(j, enc);
}

/// Lowest-RMS cluster is "no chaos", the others "yes chaos".
inline std::vector<bool> energy_mapping(const std::vector<double>& cluster_rms) {
  if (cluster_rms.empty()) throw data_error("energy mapping: no clusters");
  const auto low = std::min_element(cluster_rms.begin(), cluster_rms.end()) - cluster_rms.begin();
  std::vector<bool> chaos(cluster_rms.size(), true);
  chaos[static_cast<std::size_t>(low)] = false;
  return chaos;
}

/// Replaces the automatic verdicts, e.g. after listening to each cluster.
inline void override_mapping(DeepPipelineModel& m, const std::vector<bool>& cluster_chaos) {
  if (cluster_chaos.size() != m.k())
    throw config_error("pipeline: mapping has " + std::to_string(cluster_chaos.size()) + " entries for k=" +
                       std::to_string(m.k()));
  m.cluster_chaos = cluster_chaos;
}

struct PipelineFit {
  DeepPipelineModel model;
  Matrix latents;
  std::vector<int> labels;
};

/// Encodes every second, clusters the latents and maps clusters to verdicts
/// by mean RMS.
inline PipelineFit fit_pipeline(const SecondBatch& seconds, const MelScaler& scaler, const ae::MlpAutoencoder& encoder,
                                std::size_t k, std::uint64_t seed, const cluster::KMeansOptions& opt = {},
                                const MelInputConfig& mel = {}) {
  if (seconds.size() < k)
    throw data_error("fit_pipeline: corpus yields " + std::to_string(seconds.size()) + " seconds, fewer than k=" +
                     std::to_string(k));
  PipelineFit f;
  f.model.mel = mel;
  f.model.scaler = scaler;
  f.model.encoder = encoder;
  f.latents = ae::encode(encoder, scaler.transform(seconds.log_mel));
  f.model.kmeans = cluster::kmeans_fit(f.latents, k, seed, opt);
  f.labels = cluster::kmeans_predict(f.model.kmeans, f.latents);
  f.model.silhouette = k > 1 ? cluster::silhouette_score(f.latents, f.labels, cluster::kSilhouetteRowCap, seed) : 0.0;
  std::vector<double> sum(k, 0.0), count(k, 0.0);
  for (std::size_t i = 0; i < f.labels.size(); ++i) {
    sum[static_cast<std::size_t>(f.labels[i])] += seconds.rms[i];
    count[static_cast<std::size_t>(f.labels[i])] += 1.0;
  }
  for (std::size_t c = 0; c < k; ++c) f.model.cluster_rms.push_back(count[c] > 0 ? sum[c] / count[c] : 0.0);
  f.model.cluster_chaos = energy_mapping(f.model.cluster_rms);
  f.model.validate();
  return f;
}

struct SecondPrediction {
  std::string source_id;
  std::size_t second_offset = 0;
  int cluster_id = 0;
  bool chaos = false;
};

inline std::vector<SecondPrediction> predict_seconds(const DeepPipelineModel& m, const audio::AudioClip& clip) {
  const MelInput mel(m.mel);
  const auto labels = cluster::kmeans_predict(m.kmeans, ae::encode(m.encoder, m.scaler.transform(mel.log_mel(clip))));
  std::vector<SecondPrediction> out;
  for (std::size_t s = 0; s < labels.size(); ++s)
    out.push_back({clip.source_id, s, labels[s], m.cluster_chaos[static_cast<std::size_t>(labels[s])]});
  return out;
}

/// Modal verdict per consecutive block of `window` seconds; a trailing short
/// block votes over what it has. Ties count as chaos.
inline std::vector<bool> majority_vote(const std::vector<bool>& seconds, std::size_t window = kVoteWindowSeconds) {
  if (seconds.empty()) throw data_error("majority_vote: empty timeline");
  if (window == 0) throw config_error("majority_vote: window must be positive");
  std::vector<bool> out;
  for (std::size_t b = 0; b < seconds.size(); b += window) {
    const std::size_t end = std::min(seconds.size(), b + window);
    const auto yes = static_cast<std::size_t>(std::count(seconds.begin() + static_cast<std::ptrdiff_t>(b),
                                                         seconds.begin() + static_cast<std::ptrdiff_t>(end), true));
    out.push_back(2 * yes >= end - b);
  }
  return out;
}

struct WindowVerdict {
  std::string source_id;
  std::size_t window_start_s = 0;
  bool chaos = false;
};

/// Votes each source's seconds separately, in order of first appearance.
inline std::vector<WindowVerdict> vote_windows(const std::vector<SecondPrediction>& preds,
                                               std::size_t window = kVoteWindowSeconds) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const SecondPrediction*>> by_source;
  for (const auto& p : preds) {
    auto [it, fresh] = by_source.try_emplace(p.source_id);
    if (fresh) order.push_back(p.source_id);
    it->second.push_back(&p);
  }
  std::vector<WindowVerdict> out;
  for (const auto& id : order) {
    auto& v = by_source[id];
    std::stable_sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->second_offset < b->second_offset; });
    std::vector<bool> flags;
    for (auto* p : v) flags.push_back(p->chaos);
    const auto verdicts = majority_vote(flags, window);
    for (std::size_t w = 0; w < verdicts.size(); ++w) out.push_back({id, w * window, verdicts[w]});
  }
  return out;
}

inline double accuracy(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  if (predicted.size() != truth.size()) throw data_error("accuracy: length mismatch");
  if (truth.empty()) throw data_error("accuracy: no labels");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

/// A clip with one ground-truth verdict for all of its seconds.
struct TruthClip {
  audio::AudioClip clip;
  bool chaos = false;
};

struct Evaluation {
  std::size_t k = 0;
  std::size_t windows = 0;
  double window_accuracy = 0.0;
  double second_accuracy = 0.0;
  std::size_t no_chaos_clusters = 0;
};

inline Evaluation evaluate(const DeepPipelineModel& m, const std::vector<TruthClip>& clips) {
  if (clips.empty()) throw data_error("evaluate: no labelled clips");
  std::vector<bool> sec_pred, sec_truth, win_pred, win_truth;
  for (const auto& tc : clips) {
    const auto preds = predict_seconds(m, tc.clip);
    for (const auto& p : preds) {
      sec_pred.push_back(p.chaos);
      sec_truth.push_back(tc.chaos);
    }
    for (const auto& w : vote_windows(preds, m.vote_window_s)) {
      win_pred.push_back(w.chaos);
      win_truth.push_back(tc.chaos);
    }
  }
  Evaluation e;
  e.k = m.k();
  e.windows = win_pred.size();
  e.window_accuracy = accuracy(win_pred, win_truth);
  e.second_accuracy = accuracy(sec_pred, sec_truth);
  e.no_chaos_clusters = static_cast<std::size_t>(std::count(m.cluster_chaos.begin(), m.cluster_chaos.end(), false));
  return e;
}

/// Between-class over within-class scatter (trace ratio) of labelled rows.
inline double scatter_ratio(const Matrix& x, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(x.rows()) != labels.size() || labels.empty())
    throw data_error("scatter_ratio: one label per row required");
  const RowVector mean = x.colwise().mean();
  std::map<int, std::pair<RowVector, double>> groups;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    auto [it, fresh] = groups.try_emplace(labels[static_cast<std::size_t>(i)], RowVector::Zero(x.cols()), 0.0);
    it->second.first += x.row(i);
    it->second.second += 1.0;
  }
  double between = 0.0, within = 0.0;
  for (auto& [label, g] : groups) {
    g.first /= g.second;
    between += g.second * (g.first - mean).squaredNorm();
  }
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    within += (x.row(i) - groups.at(labels[static_cast<std::size_t>(i)]).first).squaredNorm();
  if (!(within > 0.0)) throw numeric_error("scatter_ratio: zero within-class scatter");
  return between / within;
}

struct KSweepRow {
  std::size_t k = 0;
  double inertia = 0.0;
  double silhouette = 0.0;
};

inline std::vector<KSweepRow> k_sweep(const Matrix& latents, const std::vector<std::size_t>& ks, std::uint64_t seed,
                                      const cluster::KMeansOptions& opt = {}) {
  std::vector<KSweepRow> rows;
  for (auto k : ks) {
    if (k < 2) throw config_error("k_sweep: k must be at least 2");
    const auto model = cluster::kmeans_fit(latents, k, seed, opt);
    const auto labels = cluster::kmeans_predict(model, latents);
    rows.push_back({k, model.inertia, cluster::silhouette_score(latents, labels, cluster::kSilhouetteRowCap, seed)});
  }
  return rows;
}

inline void write_k_sweep(std::ostream& out, const std::vector<KSweepRow>& rows) {
  out << "k,inertia,silhouette\n";
  for (const auto& r : rows)
    io::write_row(out, {std::to_string(r.k), io::format_real(r.inertia), io::format_real(r.silhouette)});
}

inline void write_second_timeline(std::ostream& out, const std::vector<SecondPrediction>& preds) {
  out << "source_id,second_offset,cluster_id,chaos\n";
  for (const auto& p : preds)
    io::write_row(out, {p.source_id, std::to_string(p.second_offset), std::to_string(p.cluster_id),
                        p.chaos ? "yes" : "no"});
}

inline void write_window_timeline(std::ostream& out, const std::vector<WindowVerdict>& wins) {
  out << "source_id,window_start_s,verdict\n";
  for (const auto& w : wins) io::write_row(out, {w.source_id, std::to_string(w.window_start_s), w.chaos ? "yes" : "no"});
}

}  // namespace chaoskit::deep
