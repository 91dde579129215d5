#pragma once

#include "../ae/train.hpp"
#include "../audio/wav.hpp"
#include "../deep/pipeline.hpp"
#include "../features/correlation.hpp"
#include "../features/extract.hpp"
#include "../som/som.hpp"
#include "../synth/corpus.hpp"
#include "../tree/audit.hpp"
#include "../tree/reports.hpp"
#include "run_config.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace chaoskit::cli {

inline fs::path corpus_dir(const RunConfig& cfg) { return cfg.out / "corpus"; }
inline fs::path features_path(const RunConfig& cfg) { return cfg.out / "features.csv"; }

inline Provenance provenance(const RunConfig& cfg, const std::string& command, io::Json relevant) {
  relevant["command"] = command;
  relevant["seed"] = cfg.seed;
  relevant["tool_version"] = kToolVersion;
  return {command, config_hash(relevant), cfg.seed};
}

inline void require_file(const fs::path& p, const std::string& what, const std::string& producer) {
  if (!fs::exists(p))
    throw config_error("missing " + what + " (" + p.string() + "); run `chaoskit " + producer + "` first");
}

/// Configured inputs, or the synthetic corpus under the output directory.
inline std::vector<fs::path> audio_inputs(const RunConfig& cfg, const std::vector<std::string>& configured) {
  std::vector<std::string> in = configured;
  if (in.empty()) {
    if (!fs::is_directory(corpus_dir(cfg)))
      throw config_error("no inputs; pass audio paths or run `chaoskit synth` first");
    in = {corpus_dir(cfg).string()};
  }
  auto files = resolve_inputs(in);
  if (files.empty()) throw config_error("no inputs matched");
  std::set<std::string> ids;
  for (const auto& f : files)
    if (!ids.insert(audio::source_id_for(f)).second)
      throw data_error("two inputs share the source id '" + audio::source_id_for(f) + "'");
  return files;
}

inline io::Json digests(const std::vector<fs::path>& files) {
  io::Json j = io::Json::array();
  for (const auto& f : files) j.push_back({audio::source_id_for(f), file_digest(f)});
  return j;
}

inline features::NoiseGateSettings gate_settings(const RunConfig& cfg) {
  features::NoiseGateSettings g;
  g.enabled = cfg.noise_gate;
  g.reduction_db = cfg.get("extract", "reduction_db", g.reduction_db);
  g.profile_s = cfg.get("extract", "profile_s", g.profile_s);
  return g;
}

inline audio::AudioClip load_prepared(const fs::path& p, const features::NoiseGateSettings& gate) {
  return features::prepare_clip(audio::load_audio(p), gate);
}

// ---------------------------------------------------------------- synth

inline synth::SynthSpec synth_spec(const RunConfig& cfg) {
  synth::SynthSpec s;
  const auto sec = cfg.section("synth");
  try {
    if (sec.contains("seconds")) {
      const auto& v = sec.at("seconds");
      if (v.is_number()) s.seconds.fill(v.get<double>());
      else if (v.is_array() && v.size() == 4) s.seconds = v.get<std::array<double, 4>>();
      else throw config_error("synth.seconds must be a number or an array of 4");
    }
    s.dither = sec.value("dither", false);
    s.params.chunk_s = sec.value("chunk_s", s.params.chunk_s);
  } catch (const io::Json::exception& e) {
    throw config_error(std::string("synth: ") + e.what());
  }
  s.seed = cfg.seed;
  s.validate();
  return s;
}

inline void cmd_synth(const RunConfig& cfg, const Log& log) {
  const auto spec = synth_spec(cfg);
  const auto prov = provenance(cfg, "synth", {{"synth", cfg.section("synth")}});
  const auto corpus = synth::make_corpus(spec);
  const auto dir = corpus_dir(cfg);
  for (const auto& item : corpus) {
    write_artifact(dir / (item.clip.source_id + ".wav"), audio::encode_wav16(item.clip), prov);
    log(item.clip.source_id + ": " + io::format_real(item.clip.duration_s(), 6) + " s");
  }
  write_artifact(dir / "labels.csv", prov, [&](std::ostream& o) { synth::write_labels(o, synth::label_rows(corpus)); });
  log("wrote " + dir.string());
}

// ---------------------------------------------------------------- extract

inline void cmd_extract(const RunConfig& cfg, const Log& log) {
  const auto files = audio_inputs(cfg, cfg.inputs);
  features::ExtractConfig ex;
  ex.gate = gate_settings(cfg);
  const io::Json settings = {{"extract", cfg.section("extract")}, {"noise_gate", cfg.noise_gate}};
  const fs::path cache = cfg.out / "features" / "cache";
  const fs::path merged = features_path(cfg);

  std::vector<std::vector<features::WindowFeatureVector>> rows(files.size());
  std::vector<std::string> hashes(files.size()), errors(files.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < files.size();) {
      const auto id = audio::source_id_for(files[i]);
      try {
        const auto prov = provenance(cfg, "extract", {{"settings", settings}, {"file", file_digest(files[i])}});
        hashes[i] = prov.config_hash;
        const auto cached = cache / (id + ".csv");
        if (up_to_date(cached, prov.config_hash)) {
          rows[i] = features::FeatureTable::load(cached.string()).rows();
          log(id + ": cached, " + std::to_string(rows[i].size()) + " windows");
          continue;
        }
        rows[i] = features::extract_windows(load_prepared(files[i], ex.gate), ex);
        write_artifact(cached, prov, [&](std::ostream& o) { features::FeatureTable(rows[i]).write_csv(o); });
        log(id + ": " + std::to_string(rows[i].size()) + " windows");
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(cfg.jobs, files.size()); ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::string failed;
  std::size_t n_failed = 0;
  for (std::size_t i = 0; i < files.size(); ++i)
    if (!errors[i].empty()) {
      failed += "\n  " + errors[i];
      ++n_failed;
    }
  if (n_failed) {
    fs::remove(merged);
    fs::remove(meta_path(merged));
    throw io_error("could not read " + std::to_string(n_failed) + " of " + std::to_string(files.size()) + " inputs:" + failed);
  }

  features::FeatureTable table;
  for (const auto& r : rows) table.append(r);
  if (table.empty()) throw data_error("extract: inputs yield no complete 10-s windows");
  write_artifact(merged, provenance(cfg, "extract", {{"settings", settings}, {"sources", hashes}}),
                 [&](std::ostream& o) { table.write_csv(o); });
  log("wrote " + merged.string() + " (" + std::to_string(table.size()) + " windows)");
}

// ---------------------------------------------------------------- tree

inline features::FeatureTable load_features(const RunConfig& cfg) {
  require_file(features_path(cfg), "feature table", "extract");
  return features::FeatureTable::load(features_path(cfg).string());
}

inline std::vector<std::string> default_columns(const features::FeatureTable& table, std::size_t cap) {
  return features::uncorrelated_columns(features::correlation_matrix(table), cap);
}

inline void cmd_tree(const RunConfig& cfg, const Log& log) {
  const auto table = load_features(cfg);
  const auto sec = cfg.section("tree");
  const auto spec = sec.contains("spec") ? tree::TreeSpec::from_json(sec.at("spec")) : tree::default_tree_spec();
  const auto prov = provenance(cfg, "tree", {{"tree", sec}, {"features", file_digest(features_path(cfg))}});
  const fs::path dir = cfg.out / "tree";

  auto fit = tree::tree_fit(table, spec, cfg.seed);
  auto model = sec.contains("levels") ? tree::level_map(fit.model, tree::level_map_from_json(sec.at("levels"))) : fit.model;
  for (const auto& s : fit.splits) log("split " + s.path + ": silhouette " + io::format_real(s.silhouette, 4));
  const auto preds = tree::tree_predict(model, table);

  write_json_artifact(dir / "model.json", model.to_json(), prov);
  write_artifact(dir / "splits.csv", prov, [&](std::ostream& o) { tree::write_split_report(o, fit.splits); });
  write_artifact(dir / "predictions.csv", prov, [&](std::ostream& o) { tree::write_predictions(o, preds); });
  try {
    const auto props = tree::time_proportions(preds);
    write_artifact(dir / "proportions.csv", prov, [&](std::ostream& o) { tree::write_proportions(o, props); });
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::data) throw;
    log(std::string("proportions skipped: ") + e.what());
  }

  const auto candidates = cfg.get("tree", "sweep_features", default_columns(table, 8));
  const auto ks = cfg.get("tree", "sweep_k", std::vector<std::size_t>{2, 3});
  const auto sweep = tree::feature_sweep(table, candidates, ks, cfg.seed);
  write_artifact(dir / "sweep.csv", prov, [&](std::ostream& o) { tree::write_sweep(o, sweep); });
  log("wrote " + dir.string() + " (" + std::to_string(model.leaves.size()) + " leaves)");
}

// ---------------------------------------------------------------- som

inline void cmd_som(const RunConfig& cfg, const Log& log) {
  const auto table = load_features(cfg);
  auto sec = cfg.section("som");
  if (!sec.contains("rng_seed")) sec["rng_seed"] = cfg.seed;
  const auto som_cfg = som::SomConfig::from_json(sec);
  const auto columns = cfg.get("som", "columns", default_columns(table, 8));
  const auto prov = provenance(cfg, "som", {{"som", sec}, {"columns", columns}, {"features", file_digest(features_path(cfg))}});
  const fs::path dir = cfg.out / "som";

  const auto model = som::som_fit(table, columns, som_cfg);
  log("quantization error " + io::format_real(model.initial_qe, 4) + " -> " + io::format_real(model.final_qe, 4));
  const auto bmu = som::bmu_assign(model, table);

  write_json_artifact(dir / "model.json", model.to_json(), prov);
  write_artifact(dir / "u_matrix.csv", prov, [&](std::ostream& o) { som::write_u_matrix(o, som::u_matrix(model)); });
  write_artifact(dir / "planes.csv", prov, [&](std::ostream& o) { som::write_planes(o, model); });
  write_artifact(dir / "qe.csv", prov, [&](std::ostream& o) { som::write_qe_trace(o, model); });
  write_artifact(dir / "bmu.csv", prov, [&](std::ostream& o) {
    o << "source_id,window_index,window_start_s,bmu_row,bmu_col\n";
    for (std::size_t i = 0; i < table.size(); ++i)
      io::write_row(o, {table[i].source_id, std::to_string(table[i].window_index), io::format_real(table[i].window_start_s),
                        std::to_string(bmu[i] / som_cfg.cols), std::to_string(bmu[i] % som_cfg.cols)});
  });

  io::Json verify;
  try {
    verify = som::som_verify(model, table.matrix(columns), cfg.seed).to_json();
    log("verify: knn accuracy " + io::format_real(verify["knn"].value("mean_accuracy", 0.0), 4));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::data) throw;
    verify = {{"skipped", e.what()}};
    log(std::string("verify skipped: ") + e.what());
  }
  write_json_artifact(dir / "verify.json", verify, prov);
  log("wrote " + dir.string());
}

// ---------------------------------------------------------------- ae-train

struct MelData {
  deep::MelInputConfig mel;
  deep::SecondBatch seconds;
  std::vector<fs::path> files;
};

inline MelData mel_data(const RunConfig& cfg, const std::vector<std::string>& inputs, const Log& log) {
  MelData d;
  d.mel = deep::MelInputConfig::from_json(cfg.section("mel"));
  d.files = audio_inputs(cfg, inputs);
  std::vector<audio::AudioClip> clips;
  for (const auto& f : d.files) clips.push_back(load_prepared(f, gate_settings(cfg)));
  d.seconds = deep::collect_seconds(clips, deep::MelInput(d.mel));
  log(std::to_string(d.seconds.size()) + " seconds from " + std::to_string(d.files.size()) + " inputs");
  return d;
}

inline std::string rate_tag(double lr) {
  std::string s = io::format_real(lr, 6);
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

inline void cmd_ae_train(const RunConfig& cfg, bool grid, const Log& log) {
  const auto data = mel_data(cfg, cfg.inputs, log);
  const auto sec = cfg.section("ae");
  const auto opt = ae::OptimizerConfig::from_json(sec);
  const auto latent = cfg.get<std::size_t>("ae", "latent_dim", 16);
  const auto hidden = cfg.get("ae", "hidden", std::vector<std::size_t>{512, 128});
  const double sigma = cfg.get("ae", "noise_sigma", 1.0 / std::sqrt(10.0));
  const auto prov = provenance(cfg, "ae-train",
                               {{"ae", sec}, {"mel", data.mel.to_json()}, {"grid", grid}, {"noise_gate", cfg.noise_gate},
                                {"inputs", digests(data.files)}});
  const fs::path dir = cfg.out / "ae";

  const auto scaler = deep::MelScaler::fit(data.seconds.log_mel);
  const Matrix x = scaler.transform(data.seconds.log_mel);
  auto scaler_json = io::model_header("mel_scaler");
  scaler_json["mel"] = data.mel.to_json();
  scaler_json["scaler"] = scaler.to_json();

  ae::MlpAutoencoder model;
  ae::TrainReport report;
  if (grid) {
    const auto dims = cfg.get("ae", "grid_latent_dims", std::vector<std::size_t>{8, 16, 32});
    const auto rates = cfg.get("ae", "grid_learning_rates", std::vector<double>{0.1, 1.0, 10.0});
    auto res = ae::param_search(x, dims, rates, opt, cfg.seed, hidden, sigma);
    for (const auto& c : res.cells) {
      log("L=" + std::to_string(c.latent_dim) + " lr=" + io::format_real(c.learning_rate, 4) + ": " +
          (c.diverged ? "diverged" : "val " + io::format_real(c.report.final_val(), 6)));
      if (!c.diverged)
        write_artifact(dir / "search" / ("L" + std::to_string(c.latent_dim) + "_lr" + rate_tag(c.learning_rate) + ".csv"),
                       prov, [&](std::ostream& o) { ae::write_train_report(o, c.report); });
    }
    write_artifact(dir / "search.csv", prov, [&](std::ostream& o) { ae::write_search_table(o, res); });
    model = std::move(res.best_model);
    report = res.cells[res.best].report;
  } else {
    fs::remove_all(dir / "search");
    fs::remove(dir / "search.csv");
    fs::remove(meta_path(dir / "search.csv"));
    model = ae::make_autoencoder(x.cols(), latent, hidden, sigma, cfg.seed);
    report = ae::train(model, x, opt, cfg.seed);
  }
  log("final loss train " + io::format_real(report.final_train(), 6) + " val " + io::format_real(report.final_val(), 6));

  write_json_artifact(dir / "scaler.json", scaler_json, prov);
  write_json_artifact(dir / "encoder.json", model.to_json(), prov);
  write_artifact(dir / "train_report.csv", prov, [&](std::ostream& o) { ae::write_train_report(o, report); });
  log("wrote " + dir.string());
}

// ---------------------------------------------------------------- deep

/// Per-second labels from every labels.csv next to the inputs.
inline std::map<std::string, std::vector<std::string>> find_labels(const std::vector<fs::path>& files) {
  std::set<fs::path> sheets;
  for (const auto& f : files)
    if (fs::exists(f.parent_path() / "labels.csv")) sheets.insert(f.parent_path() / "labels.csv");
  std::map<std::string, std::map<std::size_t, std::string>> by_second;
  for (const auto& s : sheets) {
    std::ifstream in(s);
    for (const auto& r : synth::read_labels(in, s.string())) by_second[r.source_id][r.second_offset] = r.label;
  }
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [id, secs] : by_second) {
    std::vector<std::string> v;
    for (const auto& [s, label] : secs) {
      if (s != v.size()) break;
      v.push_back(label);
    }
    out[id] = std::move(v);
  }
  return out;
}

struct DeepScore {
  std::size_t windows = 0;
  std::size_t seconds = 0;
  double window_accuracy = 0.0;
  double second_accuracy = 0.0;
};

/// Scores the sources whose labels cover every predicted second. A window's
/// truth is the majority of its per-second truths.
inline std::optional<DeepScore> score_deep(const std::vector<std::vector<deep::SecondPrediction>>& per_source,
                                           const std::map<std::string, std::vector<std::string>>& labels,
                                           std::size_t window) {
  std::vector<bool> sp, st, wp, wt;
  for (const auto& preds : per_source) {
    if (preds.empty()) continue;
    const auto it = labels.find(preds.front().source_id);
    if (it == labels.end() || it->second.size() < preds.size()) continue;
    std::vector<bool> truth, pred;
    for (const auto& p : preds) {
      truth.push_back(synth::is_chaos(synth::class_from_name(it->second[p.second_offset])));
      pred.push_back(p.chaos);
    }
    const auto tv = deep::majority_vote(truth, window), pv = deep::majority_vote(pred, window);
    sp.insert(sp.end(), pred.begin(), pred.end());
    st.insert(st.end(), truth.begin(), truth.end());
    wp.insert(wp.end(), pv.begin(), pv.end());
    wt.insert(wt.end(), tv.begin(), tv.end());
  }
  if (st.empty()) return std::nullopt;
  return DeepScore{wt.size(), st.size(), deep::accuracy(wp, wt), deep::accuracy(sp, st)};
}

inline void cmd_deep(const RunConfig& cfg, const Log& log) {
  const fs::path ae_dir = cfg.out / "ae";
  require_file(ae_dir / "encoder.json", "trained encoder", "ae-train");
  require_file(ae_dir / "scaler.json", "mel scaler", "ae-train");
  const auto scaler_json = io::read_json(ae_dir / "scaler.json");
  io::check_header(scaler_json, "mel_scaler");
  const auto encoder = ae::MlpAutoencoder::from_json(io::read_json(ae_dir / "encoder.json"));
  const auto mel = deep::MelInputConfig::from_json(scaler_json.at("mel"));
  const auto scaler = deep::MelScaler::from_json(scaler_json.at("scaler"));

  RunConfig fit_cfg = cfg;
  fit_cfg.params["mel"] = mel.to_json();
  const auto data = mel_data(fit_cfg, cfg.inputs, log);
  const auto eval_inputs = cfg.get("deep", "eval_inputs", std::vector<std::string>{});
  const auto eval_files = eval_inputs.empty() ? data.files : audio_inputs(cfg, eval_inputs);
  std::vector<audio::AudioClip> eval_clips;
  for (const auto& f : eval_files) eval_clips.push_back(load_prepared(f, gate_settings(cfg)));
  const auto labels = find_labels(eval_files);

  const auto ks = cfg.get("deep", "k", std::vector<std::size_t>{2, 3});
  const auto sweep_ks = cfg.get("deep", "sweep_k", std::vector<std::size_t>{2, 3, 4, 6, 8, 12});
  const auto prov = provenance(cfg, "deep",
                               {{"deep", cfg.section("deep")}, {"encoder", file_digest(ae_dir / "encoder.json")},
                                {"scaler", file_digest(ae_dir / "scaler.json")}, {"noise_gate", cfg.noise_gate},
                                {"inputs", digests(data.files)}, {"eval", digests(eval_files)}});
  const fs::path dir = cfg.out / "deep";

  std::ostringstream acc;
  acc << "k,windows,seconds,window_accuracy,second_accuracy,no_chaos_clusters\n";
  bool scored = false;
  Matrix latents;
  for (std::size_t k : ks) {
    auto fit = deep::fit_pipeline(data.seconds, scaler, encoder, k, cfg.seed, {}, mel);
    if (latents.size() == 0) latents = fit.latents;
    const auto& m = fit.model;
    const fs::path kdir = dir / ("k" + std::to_string(k));
    write_json_artifact(kdir / "encoder.json", m.encoder.to_json(), prov);
    write_json_artifact(kdir / "pipeline.json", m.to_json("encoder.json"), prov);

    std::vector<std::vector<deep::SecondPrediction>> per_source;
    std::vector<deep::SecondPrediction> all;
    for (const auto& c : eval_clips) {
      per_source.push_back(deep::predict_seconds(m, c));
      all.insert(all.end(), per_source.back().begin(), per_source.back().end());
    }
    write_artifact(kdir / "seconds.csv", prov, [&](std::ostream& o) { deep::write_second_timeline(o, all); });
    write_artifact(kdir / "windows.csv", prov,
                   [&](std::ostream& o) { deep::write_window_timeline(o, deep::vote_windows(all, m.vote_window_s)); });

    const auto no_chaos = static_cast<std::size_t>(std::count(m.cluster_chaos.begin(), m.cluster_chaos.end(), false));
    std::string msg = "k=" + std::to_string(k) + ": silhouette " + io::format_real(m.silhouette, 4);
    if (const auto s = score_deep(per_source, labels, m.vote_window_s)) {
      scored = true;
      io::write_row(acc, {std::to_string(k), std::to_string(s->windows), std::to_string(s->seconds),
                          io::format_real(s->window_accuracy), io::format_real(s->second_accuracy), std::to_string(no_chaos)});
      msg += ", window accuracy " + io::format_real(s->window_accuracy, 4);
    }
    log(msg);
  }
  if (scored) write_artifact(dir / "accuracy.csv", acc.str(), prov);
  else log("no labels next to the inputs; accuracy skipped");

  std::vector<std::size_t> usable;
  for (auto k : sweep_ks)
    if (k <= static_cast<std::size_t>(latents.rows())) usable.push_back(k);
  if (!usable.empty()) {
    const auto sweep = deep::k_sweep(latents, usable, cfg.seed);
    write_artifact(dir / "sweep.csv", prov, [&](std::ostream& o) { deep::write_k_sweep(o, sweep); });
  }
  log("wrote " + dir.string());
}

// ---------------------------------------------------------------- audit

inline void cmd_audit_sample(const RunConfig& cfg, const Log& log) {
  const fs::path pred_path = cfg.out / "tree" / "predictions.csv";
  require_file(pred_path, "tree predictions", "tree");
  std::ifstream in(pred_path);
  const auto preds = tree::read_predictions(in, pred_path.string());
  const auto files = audio_inputs(cfg, cfg.inputs);
  const auto per_leaf = cfg.get<std::size_t>("audit", "per_leaf", tree::kAuditPerLeaf);
  const double clip_s = cfg.get("audit", "clip_s", tree::kAuditClipSeconds);
  const auto prov = provenance(cfg, "audit", {{"audit", cfg.section("audit")}, {"predictions", file_digest(pred_path)},
                                              {"noise_gate", cfg.noise_gate}, {"inputs", digests(files)}});
  const fs::path dir = cfg.out / "audit";

  std::map<std::string, fs::path> paths;
  for (const auto& f : files) paths[audio::source_id_for(f)] = f;
  std::map<std::string, audio::AudioClip> loaded;
  const tree::ClipResolver resolve = [&](const std::string& id) -> const audio::AudioClip& {
    if (auto it = loaded.find(id); it != loaded.end()) return it->second;
    const auto p = paths.find(id);
    if (p == paths.end()) throw data_error("audit: no input audio for source '" + id + "'");
    return loaded.emplace(id, load_prepared(p->second, gate_settings(cfg))).first->second;
  };

  fs::remove_all(dir / "clips");
  const auto entries = tree::audit_sample(preds, resolve, dir, per_leaf, cfg.seed, clip_s);
  for (const auto& e : entries) write_meta(dir / e.clip_path, prov);
  write_artifact(dir / "manifest.csv", prov, [&](std::ostream& o) { tree::write_manifest(o, entries); });
  log("sampled " + std::to_string(entries.size()) + " windows into " + (dir / "manifest.csv").string());
}

inline void cmd_audit_score(const RunConfig& cfg, const fs::path& manifest, const Log& log) {
  std::ifstream in(manifest);
  if (!in) throw io_error(manifest.string() + ": cannot open manifest");
  const auto summary = tree::score_audit(tree::read_manifest(in, manifest.string()));
  for (const auto& s : summary.skipped) log("warning: cluster '" + s + "' has no decided verdicts, skipped");
  for (const auto& c : summary.clusters)
    log(c.leaf_label + ": " + std::to_string(c.correct) + "/" + std::to_string(c.correct + c.incorrect) +
        (c.unsure ? " (" + std::to_string(c.unsure) + " unsure)" : ""));
  log("mean accuracy " + io::format_real(summary.mean_accuracy, 6));
  const auto prov = provenance(cfg, "audit", {{"manifest", file_digest(manifest)}});
  write_artifact(cfg.out / "audit" / "scores.csv", prov, [&](std::ostream& o) { tree::write_audit_scores(o, summary); });
}

// ---------------------------------------------------------------- report

/// CSV rows as JSON objects, numbers parsed where they parse.
inline io::Json csv_records(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw io_error(p.string() + ": cannot open");
  const auto doc = io::read_csv(in, p.string());
  io::Json out = io::Json::array();
  for (const auto& row : doc.rows) {
    io::Json r = io::Json::object();
    for (std::size_t j = 0; j < doc.header.size() && j < row.size(); ++j) {
      const char* s = row[j].c_str();
      char* end = nullptr;
      const long long i = std::strtoll(s, &end, 10);
      if (!row[j].empty() && *end == '\0') {
        r[doc.header[j]] = i;
        continue;
      }
      const double v = std::strtod(s, &end);
      if (!row[j].empty() && *end == '\0') r[doc.header[j]] = v;
      else r[doc.header[j]] = row[j];
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline void cmd_report(const RunConfig& cfg, const Log& log) {
  const auto want = [&](const char* p) { return cfg.pipeline.empty() || cfg.pipeline == p; };
  const auto has = [&](const fs::path& rel) { return fs::exists(cfg.out / rel); };
  io::Json summary = {{"tool_version", kToolVersion}, {"seed", cfg.seed}};
  io::Json inputs = io::Json::object();
  auto note = [&](const fs::path& rel) { inputs[rel.generic_string()] = file_digest(cfg.out / rel); };

  std::optional<features::FeatureTable> table;
  if (has("features.csv")) {
    table = load_features(cfg);
    note("features.csv");
    std::set<std::string> sources;
    for (const auto& r : table->rows()) sources.insert(r.source_id);
    summary["features"] = {{"windows", table->size()}, {"sources", sources.size()}};
  }
  if (want("tree") && has("tree/splits.csv")) {
    io::Json t = {{"splits", csv_records(cfg.out / "tree/splits.csv")}};
    note("tree/splits.csv");
    if (has("tree/proportions.csv")) {
      t["proportions"] = csv_records(cfg.out / "tree/proportions.csv");
      note("tree/proportions.csv");
    }
    if (has("audit/scores.csv")) {
      t["audit"] = csv_records(cfg.out / "audit/scores.csv");
      note("audit/scores.csv");
    }
    summary["tree"] = t;
  }
  if (want("som") && has("som/model.json")) {
    const auto m = io::read_json(cfg.out / "som/model.json");
    note("som/model.json");
    io::Json s = {{"initial_qe", m.at("initial_qe")}, {"final_qe", m.at("final_qe")}, {"columns", m.at("columns")}};
    if (has("som/verify.json")) {
      s["verify"] = io::read_json(cfg.out / "som/verify.json");
      note("som/verify.json");
    }
    summary["som"] = s;
  }
  if (want("deep") && has("ae/train_report.csv")) {
    const auto curve = csv_records(cfg.out / "ae/train_report.csv");
    note("ae/train_report.csv");
    io::Json a = {{"epochs", curve.size()}};
    if (!curve.empty()) a["final"] = curve.back();
    if (has("ae/search.csv")) {
      a["search"] = csv_records(cfg.out / "ae/search.csv");
      note("ae/search.csv");
    }
    summary["ae"] = a;
  }
  if (want("deep") && (has("deep/accuracy.csv") || has("deep/sweep.csv"))) {
    io::Json d = io::Json::object();
    for (const char* f : {"accuracy", "sweep"})
      if (has(std::string("deep/") + f + ".csv")) {
        d[f] = csv_records(cfg.out / "deep" / (std::string(f) + ".csv"));
        note(std::string("deep/") + f + ".csv");
      }
    summary["deep"] = d;
  }
  if (inputs.empty()) throw config_error("nothing to report under " + cfg.out.string() + "; run `chaoskit extract` first");

  const auto prov = provenance(cfg, "report", {{"pipeline", cfg.pipeline}, {"inputs", inputs}});
  const fs::path dir = cfg.out / "report";
  write_json_artifact(dir / "summary.json", summary, prov);
  if (table && table->size() >= 2) {
    const auto rep = features::correlation_matrix(*table);
    write_artifact(dir / "correlation.csv", prov, [&](std::ostream& o) {
      std::vector<std::string> head = {"feature"};
      head.insert(head.end(), rep.columns.begin(), rep.columns.end());
      io::write_row(o, head);
      for (std::size_t i = 0; i < rep.columns.size(); ++i) {
        std::vector<std::string> row = {rep.columns[i]};
        for (std::size_t j = 0; j < rep.columns.size(); ++j)
          row.push_back(io::format_real(rep.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
        io::write_row(o, row);
      }
    });
  }
  log("wrote " + dir.string());
}

}  // namespace chaoskit::cli
