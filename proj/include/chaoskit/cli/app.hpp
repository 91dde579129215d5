#pragma once

#include "commands.hpp"

#include <CLI11.hpp>

namespace chaoskit::cli {

/// Parses argv, runs one subcommand and maps failures onto exit codes:
/// 2 config/usage, 3 I/O, 4 numeric divergence, 5 bad data, 1 anything else.
inline int run(int argc, const char* const* argv) {
  CLI::App app{"Household chaos analysis for long-form audio recordings", "chaoskit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> jobs;
  bool noise_gate = false, quiet = false;
  app.add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "RNG seed (default 0)");
  app.add_option("--out", out, "output directory (default chaoskit_out)");
  app.add_option("--jobs", jobs, "parallel workers for per-file work")->check(CLI::PositiveNumber);
  app.add_flag("--noise-gate", noise_gate, "apply spectral noise gating before analysis");
  app.add_flag("-q,--quiet", quiet, "no progress output");

  std::vector<std::string> inputs;
  auto* synth = app.add_subcommand("synth", "write the synthetic labelled corpus");
  std::optional<double> seconds;
  bool dither = false;
  synth->add_option("--seconds", seconds, "seconds per class");
  synth->add_flag("--dither", dither, "-60 dBFS dither on silence");

  auto* extract = app.add_subcommand("extract", "window feature table from audio files, directories or globs");
  extract->add_option("inputs", inputs, "audio inputs (default: the synthetic corpus)");

  auto* tree_cmd = app.add_subcommand("tree", "fit the hierarchical chaos tree on the feature table");
  auto* som_cmd = app.add_subcommand("som", "train a self-organizing map on the feature table");

  auto* ae_cmd = app.add_subcommand("ae-train", "train the denoising autoencoder on per-second log-mel inputs");
  bool grid = false;
  ae_cmd->add_option("inputs", inputs, "audio inputs (default: the synthetic corpus)");
  ae_cmd->add_flag("--grid", grid, "search latent width x learning rate");

  auto* deep_cmd = app.add_subcommand("deep", "cluster encoder latents into chaos timelines");
  deep_cmd->add_option("inputs", inputs, "audio inputs (default: the synthetic corpus)");

  auto* audit = app.add_subcommand("audit", "sample tree windows for listening, or score a filled manifest");
  std::string score;
  audit->add_option("inputs", inputs, "audio the predictions came from (default: the synthetic corpus)");
  audit->add_option("--score", score, "filled manifest to score")->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "summary JSON and correlation table for plotting");
  std::string pipeline;
  report->add_option("--pipeline", pipeline, "restrict to tree, som or deep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(ErrorKind::config);
  }

  try {
    RunConfig cfg = config_file.empty() ? RunConfig{} : RunConfig::load(config_file);
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    if (jobs) cfg.jobs = *jobs;
    if (noise_gate) cfg.noise_gate = true;
    if (!inputs.empty()) cfg.inputs = inputs;
    if (!pipeline.empty()) cfg.pipeline = pipeline;
    if (seconds) cfg.params["synth"]["seconds"] = *seconds;
    if (dither) cfg.params["synth"]["dither"] = true;
    cfg.validate();

    const auto* sub = app.get_subcommands().front();
    const Log log(sub->get_name(), quiet);
    if (sub == synth) cmd_synth(cfg, log);
    else if (sub == extract) cmd_extract(cfg, log);
    else if (sub == tree_cmd) cmd_tree(cfg, log);
    else if (sub == som_cmd) cmd_som(cfg, log);
    else if (sub == ae_cmd) cmd_ae_train(cfg, grid, log);
    else if (sub == deep_cmd) cmd_deep(cfg, log);
    else if (sub == audit && !score.empty()) cmd_audit_score(cfg, score, log);
    else if (sub == audit) cmd_audit_sample(cfg, log);
    else cmd_report(cfg, log);
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "chaoskit: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const io::Json::exception& e) {
    std::fprintf(stderr, "chaoskit: configuration: %s\n", e.what());
    return exit_code(ErrorKind::config);
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "chaoskit: %s\n", e.what());
    return exit_code(ErrorKind::io);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "chaoskit: %s\n", e.what());
    return 1;
  }
}

}  // namespace chaoskit::cli
