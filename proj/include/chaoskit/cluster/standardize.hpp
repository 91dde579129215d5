#pragma once

#include "../io/json_io.hpp"
#include "../types.hpp"

#include <cmath>

namespace chaoskit::cluster {

/// Per-column z-score. Columns with zero spread keep scale 1 so they map to 0.
struct Standardizer {
  RowVector mean;
  RowVector scale;

  static Standardizer fit(const Matrix& data) {
    if (data.rows() == 0) throw data_error("standardize: empty data");
    Standardizer s;
    s.mean = data.colwise().mean();
    s.scale.resize(data.cols());
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      const double sd = std::sqrt((data.col(j).array() - s.mean(j)).square().mean());
      s.scale(j) = sd > 1e-12 * std::max(1.0, std::abs(s.mean(j))) ? sd : 1.0;
    }
    return s;
  }

  Matrix transform(const Matrix& data) const {
    check(data);
    return (data.rowwise() - mean).array().rowwise() / scale.array();
  }

  Matrix inverse(const Matrix& z) const {
    check(z);
    return (z.array().rowwise() * scale.array()).rowwise() + mean.array();
  }

  Eigen::Index dim() const { return mean.size(); }

  io::Json to_json() const { return {{"mean", io::vector_to_json(mean)}, {"scale", io::vector_to_json(scale)}}; }
  static Standardizer from_json(const io::Json& j) {
    return {io::row_from_json(j.at("mean")), io::row_from_json(j.at("scale"))};
  }

 private:
  void check(const Matrix& m) const {
    if (m.cols() != mean.size()) throw data_error("standardize: column count mismatch");
  }
};

}  // namespace chaoskit::cluster
