#pragma once

// Seeded stand-in corpus with four sound classes whose acoustic signatures
// mimic the household categories the clustering back-ends are meant to find.

#include "../audio/clip.hpp"
#include "../audio/wav.hpp"
#include "../io/csv.hpp"
#include "../types.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

namespace chaoskit::synth {

enum class SoundClass { silence, soft, noise, cry };

inline constexpr std::array<SoundClass, 4> kAllClasses = {SoundClass::silence, SoundClass::soft, SoundClass::noise,
                                                          SoundClass::cry};

inline const char* class_name(SoundClass c) {
  switch (c) {
    case SoundClass::silence: return "silence";
    case SoundClass::soft: return "soft";
    case SoundClass::noise: return "noise";
    case SoundClass::cry: return "cry";
  }
  return "?";
}

inline SoundClass class_from_name(const std::string& name) {
  for (auto c : kAllClasses)
    if (name == class_name(c)) return c;
  throw config_error("synth: unknown class '" + name + "'");
}

/// Ground truth for the binary chaos pipeline: only silence is calm.
inline bool is_chaos(SoundClass c) { return c != SoundClass::silence; }

struct GeneratorParams {
  double chunk_s = 5.0;          // parameters are redrawn every chunk
  double dither_sigma = 1e-3;    // -60 dBFS
  double soft_amplitude = 0.03;  // harmonic AM tone, f0 140-220 Hz, 4 Hz envelope
  double noise_amplitude = 0.5;  // uniform broadband
  double cry_amplitude = 0.43;   // pulsed harmonic tone, f0 400-500 Hz
  double cry_on_s = 0.6;
  double cry_period_s = 1.0;
};

struct SynthSpec {
  std::array<double, 4> seconds{60.0, 60.0, 60.0, 60.0};  // per class, kAllClasses order
  std::uint64_t seed = 0;
  bool dither = false;
  GeneratorParams params;

  double seconds_of(SoundClass c) const { return seconds[static_cast<std::size_t>(c)]; }

  void validate() const {
    double total = 0.0;
    for (double s : seconds) {
      if (!(s >= 0.0) || std::floor(s) != s) throw config_error("synth: class durations must be whole seconds >= 0");
      total += s;
    }
    if (!(total > 0.0)) throw config_error("synth: total duration must be positive");
    if (!(params.chunk_s > 0.0)) throw config_error("synth: chunk_s must be positive");
  }
};

namespace detail {

inline double harmonic_sum(double f0, double t, int harmonics, const double* phase) {
  double s = 0.0;
  for (int h = 1; h <= harmonics; ++h) s += std::sin(2.0 * std::numbers::pi * f0 * h * t + phase[h - 1]) / h;
  return s;
}

}  // namespace detail

/// `seconds` of one class at 8 kHz. Every chunk draws fresh pitch, phase and
/// level so windows of a class are similar but not identical.
inline audio::AudioClip generate(SoundClass cls, double seconds, Rng& rng, bool dither = false,
                                 const GeneratorParams& p = {}) {
  const int sr = audio::kCanonicalRate;
  const auto n = static_cast<std::size_t>(std::llround(seconds * sr));
  const auto chunk = static_cast<std::size_t>(std::llround(p.chunk_s * sr));
  audio::AudioClip clip;
  clip.samples.assign(n, 0.0);
  clip.sample_rate_hz = sr;
  clip.source_id = class_name(cls);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t end = std::min(n, start + chunk);
    const double level = 0.9 + 0.1 * unit(rng);
    double ph[5];
    for (double& v : ph) v = phase(rng);
    switch (cls) {
      case SoundClass::silence:
        break;
      case SoundClass::soft: {
        const double f0 = 140.0 + 80.0 * unit(rng);
        const double am_phase = phase(rng);
        for (std::size_t i = start; i < end; ++i) {
          const double t = static_cast<double>(i - start) / sr;
          const double env = 0.5 * (1.0 + std::sin(2.0 * std::numbers::pi * 4.0 * t + am_phase));
          clip.samples[i] = p.soft_amplitude * level * env * detail::harmonic_sum(f0, t, 4, ph);
        }
        break;
      }
      case SoundClass::noise: {
        std::uniform_real_distribution<double> u(-p.noise_amplitude * level, p.noise_amplitude * level);
        for (std::size_t i = start; i < end; ++i) clip.samples[i] = u(rng);
        break;
      }
      case SoundClass::cry: {
        const double f0 = 400.0 + 100.0 * unit(rng);
        for (std::size_t i = start; i < end; ++i) {
          const double t = static_cast<double>(i - start) / sr;
          if (std::fmod(t, p.cry_period_s) >= p.cry_on_s) continue;
          clip.samples[i] = p.cry_amplitude * level * detail::harmonic_sum(f0, t, 5, ph);
        }
        break;
      }
    }
  }
  if (dither && cls == SoundClass::silence)
    for (double& v : clip.samples) v = p.dither_sigma * gauss(rng);
  audio::clamp_unit(clip.samples);
  return clip;
}

struct LabeledClip {
  SoundClass cls;
  audio::AudioClip clip;
};

/// One clip per class with non-zero duration, each from its own engine seeded
/// off the master seed so class durations do not perturb each other.
inline std::vector<LabeledClip> make_corpus(const SynthSpec& spec) {
  spec.validate();
  Rng master(spec.seed);
  std::vector<LabeledClip> out;
  for (auto c : kAllClasses) {
    Rng rng(master());
    if (spec.seconds_of(c) <= 0.0) continue;
    out.push_back({c, generate(c, spec.seconds_of(c), rng, spec.dither, spec.params)});
  }
  return out;
}

struct LabelRow {
  std::string source_id;
  std::size_t second_offset = 0;
  std::string label;
};

inline std::vector<LabelRow> label_rows(const std::vector<LabeledClip>& corpus) {
  std::vector<LabelRow> rows;
  for (const auto& item : corpus) {
    const auto secs = static_cast<std::size_t>(item.clip.samples.size() / static_cast<std::size_t>(item.clip.sample_rate_hz));
    for (std::size_t s = 0; s < secs; ++s) rows.push_back({item.clip.source_id, s, class_name(item.cls)});
  }
  return rows;
}

inline void write_labels(std::ostream& out, const std::vector<LabelRow>& rows) {
  out << "source_id,second_offset,label\n";
  for (const auto& r : rows) io::write_row(out, {r.source_id, std::to_string(r.second_offset), r.label});
}

inline std::vector<LabelRow> read_labels(std::istream& in, const std::string& name) {
  const auto doc = io::read_csv(in, name);
  const std::vector<std::string> want = {"source_id", "second_offset", "label"};
  if (doc.header != want) throw data_error(name + ": expected header source_id,second_offset,label");
  std::vector<LabelRow> rows;
  for (const auto& f : doc.rows)
    rows.push_back({f[0], static_cast<std::size_t>(io::parse_int(f[1], name)), f[2]});
  return rows;
}

/// Writes `<class>.wav` per class and `labels.csv` under `dir`.
inline std::vector<std::filesystem::path> write_corpus(const std::vector<LabeledClip>& corpus,
                                                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (const auto& item : corpus) {
    auto path = dir / (item.clip.source_id + ".wav");
    audio::write_wav16(path, item.clip);
    paths.push_back(path);
  }
  std::ofstream out(dir / "labels.csv", std::ios::binary);
  if (!out) throw io_error((dir / "labels.csv").string() + ": cannot write");
  write_labels(out, label_rows(corpus));
  return paths;
}

}  // namespace chaoskit::synth
