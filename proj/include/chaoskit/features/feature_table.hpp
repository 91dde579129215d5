#pragma once

#include "../io/csv.hpp"
#include "../types.hpp"
#include "frame_features.hpp"
#include "schema.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

namespace chaoskit::features {

inline constexpr std::size_t kFramesPerWindow = 20;

struct WindowFeatureVector {
  FeatureValues values{};
  std::string source_id;
  std::size_t window_index = 0;
  double window_start_s = 0.0;

  double operator[](Feature f) const { return values[f]; }
};

/// Averages consecutive non-overlapping groups of `group` frames; a trailing
/// short group is dropped.
inline std::vector<WindowFeatureVector> aggregate_windows(const std::vector<FrameFeatureVector>& frames,
                                                          std::size_t group = kFramesPerWindow) {
  if (group == 0) throw config_error("aggregate_windows: group size must be positive");
  if (frames.size() < group)
    throw data_error("aggregate_windows: need at least " + std::to_string(group) + " frames, got " +
                     std::to_string(frames.size()));
  for (std::size_t i = 1; i < frames.size(); ++i)
    if (frames[i].start_offset_s < frames[i - 1].start_offset_s)
      throw data_error("aggregate_windows: frames are not sorted by offset");

  std::vector<WindowFeatureVector> out;
  const std::size_t count = frames.size() / group;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    WindowFeatureVector win;
    win.source_id = frames[w * group].source_id;
    win.window_index = w;
    win.window_start_s = frames[w * group].start_offset_s;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < group; ++i) sum += frames[w * group + i].values[j];
      win.values[j] = sum / static_cast<double>(group);
    }
    out.push_back(std::move(win));
  }
  return out;
}

inline constexpr const char* kFeatureTableHeader =
    "source_id,window_index,window_start_s,raw_mean,raw_std,mfcc_mean,mfcc_std,rmse_mean,rmse_std,"
    "zcr_mean,zcr_std,centroid_mean,centroid_std,bandwidth_mean,bandwidth_std,rolloff_mean,rolloff_std,"
    "flatness_mean,flatness_std";

/// Ordered window rows for one or more sources.
class FeatureTable {
 public:
  FeatureTable() = default;
  explicit FeatureTable(std::vector<WindowFeatureVector> rows) : rows_(std::move(rows)) { sort(); }

  const std::vector<WindowFeatureVector>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const WindowFeatureVector& operator[](std::size_t i) const { return rows_[i]; }

  void append(const std::vector<WindowFeatureVector>& more) {
    rows_.insert(rows_.end(), more.begin(), more.end());
    sort();
  }

  std::vector<double> column(std::string_view name) const {
    const std::size_t j = feature_index(name);
    std::vector<double> out(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) out[i] = rows_[i].values[j];
    return out;
  }

  /// N x columns.size() matrix of the named feature columns.
  Matrix matrix(const std::vector<std::string>& columns) const {
    std::vector<std::size_t> idx;
    for (const auto& c : columns) idx.push_back(feature_index(c));
    Matrix m(static_cast<Eigen::Index>(rows_.size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < rows_.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows_[i].values[idx[j]];
    return m;
  }

  Matrix matrix() const { return matrix(all_columns()); }

  static std::vector<std::string> all_columns() {
    return {kFeatureNames.begin(), kFeatureNames.end()};
  }

  void write_csv(std::ostream& out) const {
    out << kFeatureTableHeader << '\n';
    for (const auto& r : rows_) {
      out << io::csv_escape(r.source_id) << ',' << r.window_index << ',' << io::format_real(r.window_start_s);
      for (double v : r.values) out << ',' << io::format_real(v);
      out << '\n';
    }
  }

  static FeatureTable read_csv(std::istream& in, const std::string& name = "features") {
    const auto doc = io::read_csv(in, name);
    if (io::split_csv_line(kFeatureTableHeader) != doc.header)
      throw data_error(name + ": header does not match the feature table schema");
    std::vector<WindowFeatureVector> rows;
    rows.reserve(doc.rows.size());
    for (const auto& f : doc.rows) {
      WindowFeatureVector r;
      r.source_id = f[0];
      r.window_index = static_cast<std::size_t>(io::parse_int(f[1], name));
      r.window_start_s = io::parse_real(f[2], name);
      for (std::size_t j = 0; j < kFeatureCount; ++j) {
        r.values[j] = io::parse_real(f[3 + j], name);
        if (!std::isfinite(r.values[j])) throw data_error(name + ": non-finite feature value");
      }
      rows.push_back(std::move(r));
    }
    return FeatureTable(std::move(rows));
  }

  static FeatureTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path + ": cannot open feature table");
    return read_csv(in, path);
  }

 private:
  void sort() {
    std::stable_sort(rows_.begin(), rows_.end(), [](const auto& a, const auto& b) {
      return std::tie(a.source_id, a.window_start_s) < std::tie(b.source_id, b.window_start_s);
    });
  }

  std::vector<WindowFeatureVector> rows_;
};

}  // namespace chaoskit::features
