#pragma once

#include "../error.hpp"
#include "../io/json_io.hpp"
#include "../types.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace chaoskit::cli {

namespace fs = std::filesystem;

/// Everything a command needs: inputs, output root, seed and the
/// per-module parameter sections ("synth", "extract", "tree", "som", "ae",
/// "mel", "deep", "audit"). `pipeline` narrows the report to one of tree,
/// som or deep; empty means all of them.
struct RunConfig {
  std::vector<std::string> inputs;
  fs::path out = "chaoskit_out";
  std::string pipeline;
  std::uint64_t seed = 0;
  bool noise_gate = false;
  std::size_t jobs = 1;
  io::Json params = io::Json::object();

  static RunConfig from_json(const io::Json& j) {
    if (!j.is_object()) throw config_error("config: top level must be an object");
    RunConfig c;
    for (const auto& [key, value] : j.items()) {
      if (key == "inputs") {
        if (value.is_string()) c.inputs = {value.get<std::string>()};
        else c.inputs = value.get<std::vector<std::string>>();
      } else if (key == "out") {
        c.out = value.get<std::string>();
      } else if (key == "pipeline") {
        c.pipeline = value.get<std::string>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "noise_gate") {
        c.noise_gate = value.get<bool>();
      } else if (key == "jobs") {
        c.jobs = value.get<std::size_t>();
      } else if (value.is_object()) {
        c.params[key] = value;
      } else {
        throw config_error("config: unknown key '" + key + "'");
      }
    }
    return c;
  }

  static RunConfig load(const fs::path& path) {
    try {
      return from_json(io::read_json(path));
    } catch (const io::Json::exception& e) {
      throw config_error(path.string() + ": " + e.what());
    }
  }

  io::Json section(const std::string& name) const {
    return params.contains(name) ? params.at(name) : io::Json::object();
  }

  template <class T>
  T get(const std::string& sec, const std::string& key, T fallback) const {
    const auto s = section(sec);
    try {
      return s.contains(key) ? s.at(key).get<T>() : fallback;
    } catch (const io::Json::exception& e) {
      throw config_error("config: " + sec + "." + key + ": " + e.what());
    }
  }

  void validate() const {
    if (jobs == 0) throw config_error("config: jobs must be at least 1");
    if (!pipeline.empty() && pipeline != "tree" && pipeline != "som" && pipeline != "deep")
      throw config_error("config: pipeline must be tree, som or deep");
    for (const auto& in : inputs)
      if (in.find_first_of("*?") == std::string::npos && !fs::exists(in))
        throw config_error("config: input '" + in + "' does not exist");
  }
};

/// Hash over the parts of the configuration and upstream artifacts that
/// determine one command's outputs. Output directory and job count are left
/// out because they do not change any byte written.
inline std::string config_hash(const io::Json& relevant) { return hex64(fnv1a(relevant.dump())); }

inline std::string file_digest(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw io_error(p.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a(ss.str()));
}

struct Provenance {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;

  io::Json to_json() const {
    return {{"command", command}, {"config_hash", config_hash}, {"seed", seed}, {"tool_version", kToolVersion}};
  }
};

inline fs::path meta_path(const fs::path& artifact) { return artifact.string() + ".meta.json"; }

inline void write_meta(const fs::path& artifact, const Provenance& prov) {
  std::ofstream meta(meta_path(artifact), std::ios::binary | std::ios::trunc);
  if (!meta) throw io_error(meta_path(artifact).string() + ": cannot open for writing");
  meta << prov.to_json().dump(2) << '\n';
}

/// Writes through a temporary file so an interrupted run never leaves a
/// truncated artifact behind, then drops the provenance sidecar.
inline void write_artifact(const fs::path& path, const std::string& bytes, const Provenance& prov) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  const fs::path tmp = path.string() + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error(path.string() + ": cannot open for writing");
    out << bytes;
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw io_error(path.string() + ": write failed");
    }
  }
  fs::rename(tmp, path);
  write_meta(path, prov);
}

template <class Fn>
void write_artifact(const fs::path& path, const Provenance& prov, Fn&& fill) {
  std::ostringstream os;
  fill(os);
  write_artifact(path, os.str(), prov);
}

inline void write_json_artifact(const fs::path& path, const io::Json& j, const Provenance& prov) {
  write_artifact(path, j.dump(2) + "\n", prov);
}

/// True when `artifact` exists and its sidecar records `hash`.
inline bool up_to_date(const fs::path& artifact, const std::string& hash) {
  if (!fs::exists(artifact) || !fs::exists(meta_path(artifact))) return false;
  try {
    return io::read_json(meta_path(artifact)).value("config_hash", std::string{}) == hash;
  } catch (const Error&) {
    return false;
  }
}

/// Progress lines on stderr with elapsed wall time.
class Log {
 public:
  explicit Log(std::string command, bool quiet = false)
      : command_(std::move(command)), quiet_(quiet), start_(std::chrono::steady_clock::now()) {}

  void operator()(const std::string& msg) const {
    if (quiet_) return;
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::fprintf(stderr, "[%s %7.2fs] %s\n", command_.c_str(), t, msg.c_str());
  }

 private:
  std::string command_;
  bool quiet_;
  std::chrono::steady_clock::time_point start_;
};

/// Shell-style match supporting '*' and '?'.
inline bool wildcard_match(const std::string& pattern, const std::string& name) {
  std::size_t p = 0, n = 0, star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

inline bool is_wav(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".wav";
}

/// Expands files, directories (recursively, *.wav) and wildcard patterns in
/// the last path component. Sorted, duplicates removed.
inline std::vector<fs::path> resolve_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (in.find_first_of("*?") != std::string::npos) {
      const fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
      if (!fs::is_directory(dir)) continue;
      for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && wildcard_match(p.filename().string(), e.path().filename().string()))
          out.push_back(e.path());
    } else if (fs::is_directory(p)) {
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file() && is_wav(e.path())) out.push_back(e.path());
    } else {
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace chaoskit::cli
