#pragma once

#include "clip.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace chaoskit::audio {

namespace detail {

inline std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace detail

/// Decodes RIFF/WAVE bytes. Integer PCM is scaled by the type's maximum
/// magnitude (8-bit is offset binary); stereo is averaged to mono.
inline AudioClip decode_wav(const std::vector<unsigned char>& bytes, const std::string& name) {
  using namespace detail;
  auto fail = [&](const std::string& cause) { return io_error(name + ": " + cause); };

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw fail("not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t len = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16 || avail < 16) throw fail("truncated fmt chunk");
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = le32(chunk + 12);
      bits = le16(chunk + 22);
      if (format == kFormatExtensible) {
        if (len < 40 || avail < 40) throw fail("truncated extensible fmt chunk");
        format = le16(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      // Streaming writers sometimes leave the length unset.
      data_len = std::min<std::size_t>(len, avail);
    }
    pos = body + len + (len & 1U);
  }

  if (format == 0) throw fail("missing fmt chunk");
  if (data == nullptr) throw fail("missing data chunk");
  if (channels != 1 && channels != 2)
    throw fail("unsupported channel count " + std::to_string(channels));
  if (rate == 0) throw fail("zero sample rate");

  const bool is_int = format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24);
  const bool is_float = format == kFormatFloat && bits == 32;
  if (!is_int && !is_float)
    throw fail("unsupported encoding (format " + std::to_string(format) + ", " +
               std::to_string(bits) + "-bit)");

  const std::size_t width = bits / 8;
  const std::size_t frame_bytes = width * channels;
  const std::size_t frames = data_len / frame_bytes;
  if (frames == 0) throw fail("zero-length audio stream");

  auto read_one = [&](const unsigned char* p) -> double {
    switch (bits) {
      case 8:
        return (static_cast<double>(p[0]) - 128.0) / 128.0;
      case 16:
        return static_cast<double>(static_cast<std::int16_t>(le16(p))) / 32768.0;
      case 24: {
        std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
        if (v & 0x800000) v -= 0x1000000;
        return static_cast<double>(v) / 8388608.0;
      }
      default: {
        float f;
        std::uint32_t raw = le32(p);
        std::memcpy(&f, &raw, sizeof f);
        const double d = std::isfinite(f) ? static_cast<double>(f) : 0.0;
        return std::clamp(d, -1.0, 1.0);
      }
    }
  };

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(rate);
  clip.source_id = name;
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const unsigned char* p = data + i * frame_bytes;
    double v = read_one(p);
    if (channels == 2) v = 0.5 * (v + read_one(p + width));
    clip.samples[i] = v;
  }
  return clip;
}

inline std::string source_id_for(const std::filesystem::path& path) {
  return path.stem().string();
}

inline AudioClip load_audio(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path.string() + ": cannot open for reading");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error(path.string() + ": read failed");
  AudioClip clip = decode_wav(bytes, path.string());
  clip.source_id = source_id_for(path);
  return clip;
}

/// 16-bit mono PCM encoding; samples are clamped then scaled by 32768.
inline std::string encode_wav16(const AudioClip& clip) {
  using namespace detail;
  const auto n = static_cast<std::uint32_t>(clip.samples.size());
  std::string out;
  out.reserve(44 + 2 * n);
  out += "RIFF";
  put32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(clip.sample_rate_hz));
  put32(out, static_cast<std::uint32_t>(clip.sample_rate_hz) * 2);
  put16(out, 2);
  put16(out, 16);
  out += "data";
  put32(out, 2 * n);
  for (double v : clip.samples) {
    const double scaled = std::round(std::clamp(v, -1.0, 1.0) * 32768.0);
    const auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put16(out, static_cast<std::uint16_t>(q));
  }
  return out;
}

inline void write_wav16(const std::filesystem::path& path, const AudioClip& clip) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(path.string() + ": cannot open for writing");
  const std::string bytes = encode_wav16(clip);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error(path.string() + ": write failed");
}

}  // namespace chaoskit::audio
