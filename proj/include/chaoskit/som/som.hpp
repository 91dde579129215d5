#pragma once

#include "../cluster/knn.hpp"
#include "../cluster/pca.hpp"
#include "../cluster/standardize.hpp"
#include "../features/feature_table.hpp"
#include "../io/json_io.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace chaoskit::som {

struct SomConfig {
  std::size_t rows = 18;
  std::size_t cols = 18;
  std::size_t epochs = 50;
  double initial_learning_rate = 0.5;
  double final_learning_rate = 0.01;
  double initial_radius = 0.0;  // 0 means max(rows, cols) / 2
  double final_radius = 1.0;
  std::uint64_t rng_seed = 0;

  double start_radius() const {
    return initial_radius > 0.0 ? initial_radius : static_cast<double>(std::max(rows, cols)) / 2.0;
  }

  void validate() const {
    if (rows == 0 || cols == 0 || rows * cols < 2) throw config_error("som: grid needs at least 2 nodes");
    if (epochs == 0) throw config_error("som: epochs must be positive");
    if (!(final_learning_rate > 0.0) || !(initial_learning_rate >= final_learning_rate))
      throw config_error("som: learning rates must be positive and non-increasing");
    if (!(final_radius > 0.0) || !(start_radius() >= final_radius))
      throw config_error("som: radii must be positive and non-increasing");
  }

  /// Linear schedule position for an epoch, 0 at the first and 1 at the last.
  double progress(std::size_t epoch) const {
    return epochs > 1 ? static_cast<double>(epoch) / static_cast<double>(epochs - 1) : 0.0;
  }
  double learning_rate(std::size_t epoch) const {
    const double f = progress(epoch);
    return (1.0 - f) * initial_learning_rate + f * final_learning_rate;
  }
  double radius(std::size_t epoch) const {
    const double f = progress(epoch);
    return (1.0 - f) * start_radius() + f * final_radius;
  }

  io::Json to_json() const {
    return {{"rows", rows},
            {"cols", cols},
            {"epochs", epochs},
            {"initial_learning_rate", initial_learning_rate},
            {"final_learning_rate", final_learning_rate},
            {"initial_radius", start_radius()},
            {"final_radius", final_radius},
            {"rng_seed", rng_seed},
            {"neighborhood", "gaussian"},
            {"topology", "rectangular"}};
  }

  static SomConfig from_json(const io::Json& j) {
    SomConfig c;
    c.rows = j.value("rows", c.rows);
    c.cols = j.value("cols", c.cols);
    c.epochs = j.value("epochs", c.epochs);
    c.initial_learning_rate = j.value("initial_learning_rate", c.initial_learning_rate);
    c.final_learning_rate = j.value("final_learning_rate", c.final_learning_rate);
    c.initial_radius = j.value("initial_radius", c.initial_radius);
    c.final_radius = j.value("final_radius", c.final_radius);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    c.validate();
    return c;
  }
};

/// Nearest weight row; ties go to the lower node index.
inline std::size_t nearest_node(const Matrix& weights, const Eigen::Ref<const RowVector>& x, double* dist2 = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < weights.rows(); ++n) {
    const double d = (weights.row(n) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(n);
    }
  }
  if (dist2) *dist2 = best_d;
  return best;
}

/// One online update: every node moves toward `x` by alpha times its Gaussian
/// grid-distance weight from the BMU. Returns the BMU.
inline std::size_t train_step(Matrix& weights, std::size_t cols, const Eigen::Ref<const RowVector>& x, double alpha,
                              double radius) {
  const std::size_t bmu = nearest_node(weights, x);
  const auto br = static_cast<double>(bmu / cols), bc = static_cast<double>(bmu % cols);
  const double inv = 1.0 / (2.0 * radius * radius);
  for (Eigen::Index n = 0; n < weights.rows(); ++n) {
    const double dr = static_cast<double>(static_cast<std::size_t>(n) / cols) - br;
    const double dc = static_cast<double>(static_cast<std::size_t>(n) % cols) - bc;
    const double h = std::exp(-(dr * dr + dc * dc) * inv);
    weights.row(n) += alpha * h * (x - weights.row(n));
  }
  return bmu;
}

struct SomModel {
  SomConfig config;
  std::vector<std::string> columns;
  cluster::Standardizer scaler;
  Matrix weights;  // (rows * cols) x d in standardized units, row-major grid order
  double initial_qe = 0.0;        // before training
  double final_qe = 0.0;          // after training
  std::vector<double> qe_trace;   // mean BMU distance seen while training each epoch

  std::size_t nodes() const { return config.rows * config.cols; }
  std::size_t dim() const { return columns.size(); }

  Matrix standardize(const Matrix& data) const {
    if (data.cols() != static_cast<Eigen::Index>(columns.size()))
      throw data_error("som: expected " + std::to_string(columns.size()) + " columns, got " + std::to_string(data.cols()));
    return scaler.transform(data);
  }

  io::Json to_json() const {
    auto j = io::model_header("som");
    j["config"] = config.to_json();
    j["columns"] = columns;
    j["scaler"] = scaler.to_json();
    j["weights"] = io::matrix_to_json(weights);
    j["initial_qe"] = initial_qe;
    j["final_qe"] = final_qe;
    j["qe_trace"] = qe_trace;
    return j;
  }

  static SomModel from_json(const io::Json& j) {
    io::check_header(j, "som");
    SomModel m;
    m.config = SomConfig::from_json(j.at("config"));
    m.columns = j.at("columns").get<std::vector<std::string>>();
    m.scaler = cluster::Standardizer::from_json(j.at("scaler"));
    m.weights = io::matrix_from_json(j.at("weights"));
    m.initial_qe = j.at("initial_qe").get<double>();
    m.final_qe = j.at("final_qe").get<double>();
    m.qe_trace = j.at("qe_trace").get<std::vector<double>>();
    if (m.weights.rows() != static_cast<Eigen::Index>(m.nodes()) || m.weights.cols() != static_cast<Eigen::Index>(m.dim()) ||
        m.scaler.dim() != static_cast<Eigen::Index>(m.dim()))
      throw data_error("som: model shapes are inconsistent");
    return m;
  }
};

/// Mean distance from each standardized row to its nearest weight.
inline double mean_nearest_distance(const Matrix& weights, const Matrix& z) {
  if (z.rows() == 0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double d2 = 0.0;
    nearest_node(weights, z.row(i), &d2);
    s += std::sqrt(d2);
  }
  return s / static_cast<double>(z.rows());
}

inline SomModel som_fit(const Matrix& data, std::vector<std::string> columns, const SomConfig& cfg) {
  cfg.validate();
  if (data.rows() == 0) throw data_error("som: empty table");
  if (data.cols() == 0 || static_cast<Eigen::Index>(columns.size()) != data.cols())
    throw data_error("som: column names do not match the data");
  if (!data.allFinite()) throw data_error("som: non-finite input");

  SomModel m;
  m.config = cfg;
  m.columns = std::move(columns);
  m.scaler = cluster::Standardizer::fit(data);
  const Matrix z = m.scaler.transform(data);

  Rng rng(cfg.rng_seed);
  std::uniform_real_distribution<double> init(-1.0, 1.0);
  m.weights.resize(static_cast<Eigen::Index>(m.nodes()), data.cols());
  for (Eigen::Index i = 0; i < m.weights.size(); ++i) m.weights.data()[i] = init(rng);
  m.initial_qe = mean_nearest_distance(m.weights, z);

  std::vector<std::size_t> order(static_cast<std::size_t>(z.rows()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    shuffle_indices(order, rng);
    const double alpha = cfg.learning_rate(e), radius = cfg.radius(e);
    double seen = 0.0;
    for (std::size_t i : order) {
      const auto x = z.row(static_cast<Eigen::Index>(i));
      double d2 = 0.0;
      nearest_node(m.weights, x, &d2);
      seen += std::sqrt(d2);
      train_step(m.weights, cfg.cols, x, alpha, radius);
    }
    m.qe_trace.push_back(seen / static_cast<double>(order.size()));
  }
  m.final_qe = mean_nearest_distance(m.weights, z);
  if (!m.weights.allFinite()) throw numeric_error("som: weights became non-finite");
  return m;
}

inline SomModel som_fit(const features::FeatureTable& table, const std::vector<std::string>& columns,
                        const SomConfig& cfg) {
  if (table.empty()) throw data_error("som: empty table");
  return som_fit(table.matrix(columns), columns, cfg);
}

inline std::vector<std::size_t> bmu_assign(const SomModel& m, const Matrix& data) {
  const Matrix z = m.standardize(data);
  std::vector<std::size_t> out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) out[static_cast<std::size_t>(i)] = nearest_node(m.weights, z.row(i));
  return out;
}

inline std::vector<std::size_t> bmu_assign(const SomModel& m, const features::FeatureTable& table) {
  return bmu_assign(m, table.matrix(m.columns));
}

inline double quantization_error(const SomModel& m, const Matrix& data) {
  return mean_nearest_distance(m.weights, m.standardize(data));
}

/// Mean distance of each node's weight to its 4-connected grid neighbours.
inline Matrix u_matrix(const SomModel& m) {
  const auto R = static_cast<Eigen::Index>(m.config.rows), C = static_cast<Eigen::Index>(m.config.cols);
  Matrix u = Matrix::Zero(R, C);
  const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
  for (Eigen::Index r = 0; r < R; ++r)
    for (Eigen::Index c = 0; c < C; ++c) {
      double s = 0.0;
      int n = 0;
      for (int k = 0; k < 4; ++k) {
        const Eigen::Index rr = r + dr[k], cc = c + dc[k];
        if (rr < 0 || rr >= R || cc < 0 || cc >= C) continue;
        s += (m.weights.row(r * C + c) - m.weights.row(rr * C + cc)).norm();
        ++n;
      }
      u(r, c) = n ? s / n : 0.0;
    }
  return u;
}

/// One rows x cols plane per input column, in the column's original units.
inline std::vector<Matrix> component_planes(const SomModel& m) {
  const auto R = static_cast<Eigen::Index>(m.config.rows), C = static_cast<Eigen::Index>(m.config.cols);
  const Matrix w = m.scaler.inverse(m.weights);
  std::vector<Matrix> planes;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    Matrix p(R, C);
    for (Eigen::Index n = 0; n < w.rows(); ++n) p(n / C, n % C) = w(n, j);
    planes.push_back(std::move(p));
  }
  return planes;
}

struct SomVerifyReport {
  std::vector<std::pair<std::size_t, std::size_t>> merged;  // (small node, node it joined)
  std::size_t classes = 0;
  cluster::CvReport knn;
  cluster::CvReport knn_pca;
  std::size_t pca_components = 0;
  double pca_retained = 0.0;

  io::Json to_json() const {
    io::Json m = io::Json::array();
    for (const auto& [from, to] : merged) m.push_back({{"node", from}, {"merged_into", to}});
    return {{"classes", classes}, {"merged", m}, {"knn", knn.to_json()}, {"knn_pca", knn_pca.to_json()},
            {"pca_components", pca_components}, {"pca_retained_variance", pca_retained}};
  }
};

inline constexpr std::size_t kMinClassSize = 5;

/// BMU labels with every node of fewer than 5 members folded into the
/// nearest-weight node that has at least 5.
inline std::vector<int> merged_bmu_labels(const SomModel& m, const std::vector<std::size_t>& bmu,
                                          std::vector<std::pair<std::size_t, std::size_t>>* merged = nullptr) {
  std::map<std::size_t, std::size_t> counts;
  for (auto b : bmu) ++counts[b];
  std::vector<std::size_t> big;
  for (const auto& [node, n] : counts)
    if (n >= kMinClassSize) big.push_back(node);
  if (big.size() < 2) throw data_error("som_verify: fewer than 2 BMU clusters with at least 5 members");
  std::map<std::size_t, std::size_t> target;
  for (const auto& [node, n] : counts) {
    if (n >= kMinClassSize) {
      target[node] = node;
      continue;
    }
    std::size_t best = big[0];
    double best_d = std::numeric_limits<double>::infinity();
    for (auto b : big) {
      const double d = (m.weights.row(static_cast<Eigen::Index>(node)) - m.weights.row(static_cast<Eigen::Index>(b))).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = b;
      }
    }
    target[node] = best;
    if (merged) merged->push_back({node, best});
  }
  std::vector<int> labels(bmu.size());
  for (std::size_t i = 0; i < bmu.size(); ++i) labels[i] = static_cast<int>(target[bmu[i]]);
  return labels;
}

/// Cross-validated weighted KNN on the standardized inputs, labelled by
/// BMU cluster, both directly and after a 95%-variance PCA projection.
inline SomVerifyReport som_verify(const SomModel& m, const Matrix& data, std::uint64_t seed,
                                  std::size_t k_neighbors = 10, double pca_variance = 0.95) {
  SomVerifyReport rep;
  const Matrix z = m.standardize(data);
  const auto labels = merged_bmu_labels(m, bmu_assign(m, data), &rep.merged);
  std::map<int, int> uniq;
  for (int l : labels) uniq[l] = 1;
  rep.classes = uniq.size();
  rep.knn = cluster::knn_weighted_cv5(z, labels, k_neighbors, seed);
  const auto pca = cluster::pca_fit(z, pca_variance);
  rep.pca_components = pca.n_components();
  rep.pca_retained = pca.retained();
  rep.knn_pca = cluster::knn_weighted_cv5(pca.transform(z), labels, k_neighbors, seed);
  rep.knn_pca.classifier = "weighted-knn+pca";
  return rep;
}

inline void write_u_matrix(std::ostream& out, const Matrix& u) {
  out << "row,col,distance\n";
  for (Eigen::Index r = 0; r < u.rows(); ++r)
    for (Eigen::Index c = 0; c < u.cols(); ++c)
      out << r << ',' << c << ',' << io::format_real(u(r, c)) << '\n';
}

inline void write_planes(std::ostream& out, const SomModel& m) {
  const auto planes = component_planes(m);
  out << "feature,row,col,value\n";
  for (std::size_t j = 0; j < planes.size(); ++j)
    for (Eigen::Index r = 0; r < planes[j].rows(); ++r)
      for (Eigen::Index c = 0; c < planes[j].cols(); ++c)
        out << io::csv_escape(m.columns[j]) << ',' << r << ',' << c << ',' << io::format_real(planes[j](r, c)) << '\n';
}

inline void write_qe_trace(std::ostream& out, const SomModel& m) {
  out << "epoch,training_qe\n";
  for (std::size_t e = 0; e < m.qe_trace.size(); ++e) out << e + 1 << ',' << io::format_real(m.qe_trace[e]) << '\n';
}

}  // namespace chaoskit::som
