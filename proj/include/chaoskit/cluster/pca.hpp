#pragma once

#include "../io/json_io.hpp"
#include "../types.hpp"

#include <Eigen/Eigenvalues>

#include <vector>

namespace chaoskit::cluster {

struct PcaModel {
  RowVector mean;                      // d
  Matrix components;                   // p x d, orthonormal rows
  std::vector<double> explained_ratio; // p, descending

  std::size_t n_components() const { return static_cast<std::size_t>(components.rows()); }
  double retained() const {
    double s = 0.0;
    for (double r : explained_ratio) s += r;
    return s;
  }

  Matrix transform(const Matrix& data) const {
    if (data.cols() != mean.size()) throw data_error("pca: column count mismatch");
    return (data.rowwise() - mean) * components.transpose();
  }

  Matrix inverse_transform(const Matrix& scores) const {
    return (scores * components).rowwise() + mean;
  }

  io::Json to_json() const {
    auto j = io::model_header("pca");
    j["mean"] = io::vector_to_json(mean);
    j["components"] = io::matrix_to_json(components);
    j["explained_ratio"] = explained_ratio;
    return j;
  }

  static PcaModel from_json(const io::Json& j) {
    io::check_header(j, "pca");
    PcaModel m;
    m.mean = io::row_from_json(j.at("mean"));
    m.components = io::matrix_from_json(j.at("components"));
    m.explained_ratio = j.at("explained_ratio").get<std::vector<double>>();
    if (m.components.cols() != m.mean.size()) throw data_error("pca: component width does not match mean");
    return m;
  }
};

/// Covariance eigendecomposition keeping the fewest leading components whose
/// explained-variance ratios reach `variance_target`. Each component is
/// signed so its largest-magnitude entry is positive.
inline PcaModel pca_fit(const Matrix& data, double variance_target = 0.95) {
  if (data.rows() < 2) throw data_error("pca: need at least 2 rows");
  if (data.cols() < 1) throw data_error("pca: need at least 1 column");
  if (!(variance_target > 0.0 && variance_target <= 1.0)) throw config_error("pca: variance target must be in (0, 1]");

  PcaModel m;
  m.mean = data.colwise().mean();
  const Matrix centered = data.rowwise() - m.mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(data.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw numeric_error("pca: eigendecomposition failed");

  const Eigen::Index d = data.cols();
  // Eigen returns ascending eigenvalues.
  std::vector<double> values(static_cast<std::size_t>(d));
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    values[static_cast<std::size_t>(i)] = std::max(0.0, eig.eigenvalues()(d - 1 - i));
    total += values[static_cast<std::size_t>(i)];
  }
  if (!(total > 0.0)) throw data_error("pca: data has zero variance");

  Eigen::Index p = 0;
  double cumulative = 0.0;
  while (p < d) {
    cumulative += values[static_cast<std::size_t>(p)] / total;
    ++p;
    if (cumulative >= variance_target - 1e-12) break;
  }

  m.components.resize(p, d);
  for (Eigen::Index i = 0; i < p; ++i) {
    Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - i);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    m.components.row(i) = v.transpose();
    m.explained_ratio.push_back(values[static_cast<std::size_t>(i)] / total);
  }
  return m;
}

}  // namespace chaoskit::cluster
