#pragma once

#include "../io/json_io.hpp"
#include "../types.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace chaoskit::cluster {

struct KMeansOptions {
  std::size_t max_iter = 300;
  double tol = 1e-6;
  std::size_t restarts = 10;
  bool hartigan = true;  // single-point refinement after Lloyd converges
};

struct KMeansModel {
  std::size_t k = 0;
  Matrix centroids;  // k x d
  std::vector<std::string> feature_columns;
  std::uint64_t rng_seed = 0;
  double inertia = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(centroids.cols()); }

  io::Json to_json() const {
    auto j = io::model_header("kmeans");
    j["k"] = k;
    j["centroids"] = io::matrix_to_json(centroids);
    j["feature_columns"] = feature_columns;
    j["rng_seed"] = rng_seed;
    j["inertia"] = inertia;
    return j;
  }

  static KMeansModel from_json(const io::Json& j) {
    io::check_header(j, "kmeans");
    KMeansModel m;
    m.k = j.at("k").get<std::size_t>();
    m.centroids = io::matrix_from_json(j.at("centroids"));
    m.feature_columns = j.at("feature_columns").get<std::vector<std::string>>();
    m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    m.inertia = j.at("inertia").get<double>();
    if (static_cast<Eigen::Index>(m.k) != m.centroids.rows()) throw data_error("kmeans: k does not match centroids");
    return m;
  }
};

/// Index of the nearest centroid; ties go to the lower index.
inline int nearest_centroid(const Eigen::Ref<const RowVector>& x, const Matrix& centroids, double* dist2 = nullptr) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist2) *dist2 = best_d;
  return best;
}

/// One Lloyd run from given starting centroids.
struct LloydResult {
  Matrix centroids;
  std::vector<int> labels;
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // after every assignment step
  std::size_t iterations = 0;
};

namespace detail {

inline double assign(const Matrix& data, const Matrix& centroids, std::vector<int>& labels, std::vector<double>& d2) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    labels[static_cast<std::size_t>(i)] = nearest_centroid(data.row(i), centroids, &d2[static_cast<std::size_t>(i)]);
    inertia += d2[static_cast<std::size_t>(i)];
  }
  return inertia;
}

/// Empty clusters take the point farthest from its own centroid among
/// clusters that can spare one. Returns the updated inertia.
inline double repair_empty(const Matrix& data, Matrix& centroids, std::vector<int>& labels, std::vector<double>& d2,
                           double inertia) {
  const auto k = static_cast<std::size_t>(centroids.rows());
  std::vector<std::size_t> counts(k, 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] != 0) continue;
    std::size_t pick = labels.size();
    double far = -1.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (counts[static_cast<std::size_t>(labels[i])] < 2) continue;
      if (d2[i] > far) {
        far = d2[i];
        pick = i;
      }
    }
    if (pick == labels.size()) break;
    --counts[static_cast<std::size_t>(labels[pick])];
    ++counts[c];
    labels[pick] = static_cast<int>(c);
    centroids.row(static_cast<Eigen::Index>(c)) = data.row(static_cast<Eigen::Index>(pick));
    inertia -= d2[pick];
    d2[pick] = 0.0;
  }
  return inertia;
}

/// Hartigan point moves: relocate a point whenever doing so lowers the total
/// inertia once both centroids are updated. Stops at a partition where no
/// single move helps, which is also a fixed point of Lloyd's update.
inline bool hartigan_refine(const Matrix& data, Matrix& centroids, std::vector<int>& labels,
                            std::size_t max_sweeps) {
  const auto n = static_cast<std::size_t>(data.rows());
  const Eigen::Index k = centroids.rows();
  std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
  for (int l : labels) counts[static_cast<std::size_t>(l)] += 1.0;
  bool moved_any = false;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = data.row(static_cast<Eigen::Index>(i));
      const int a = labels[i];
      const double na = counts[static_cast<std::size_t>(a)];
      if (na < 2.0) continue;
      const double remove_gain = na / (na - 1.0) * (x - centroids.row(a)).squaredNorm();
      int best = a;
      double best_cost = remove_gain;
      for (Eigen::Index b = 0; b < k; ++b) {
        if (b == a) continue;
        const double nb = counts[static_cast<std::size_t>(b)];
        const double cost = nb / (nb + 1.0) * (x - centroids.row(b)).squaredNorm();
        if (cost < best_cost * (1.0 - 1e-12)) {
          best_cost = cost;
          best = static_cast<int>(b);
        }
      }
      if (best == a) continue;
      const double nb = counts[static_cast<std::size_t>(best)];
      centroids.row(a) = (centroids.row(a) * na - x) / (na - 1.0);
      centroids.row(best) = (centroids.row(best) * nb + x) / (nb + 1.0);
      counts[static_cast<std::size_t>(a)] -= 1.0;
      counts[static_cast<std::size_t>(best)] += 1.0;
      labels[i] = best;
      moved = moved_any = true;
    }
    if (!moved) break;
  }
  if (moved_any) {
    // Recompute means exactly to shed incremental rounding.
    Matrix exact = Matrix::Zero(k, data.cols());
    for (std::size_t i = 0; i < n; ++i) exact.row(labels[i]) += data.row(static_cast<Eigen::Index>(i));
    for (Eigen::Index c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0.0) centroids.row(c) = exact.row(c) / counts[static_cast<std::size_t>(c)];
  }
  return moved_any;
}

}  // namespace detail

inline LloydResult lloyd(const Matrix& data, Matrix centroids, const KMeansOptions& opt = {}) {
  const auto n = static_cast<std::size_t>(data.rows());
  const Eigen::Index k = centroids.rows();
  LloydResult r;
  r.labels.assign(n, 0);
  std::vector<double> d2(n, 0.0);

  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    double inertia = detail::assign(data, centroids, r.labels, d2);
    inertia = detail::repair_empty(data, centroids, r.labels, d2, inertia);
    r.inertia_trace.push_back(inertia);
    ++r.iterations;

    Matrix next = Matrix::Zero(k, data.cols());
    std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      next.row(r.labels[i]) += data.row(static_cast<Eigen::Index>(i));
      counts[static_cast<std::size_t>(r.labels[i])] += 1.0;
    }
    double shift = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0.0) next.row(c) /= counts[static_cast<std::size_t>(c)];
      else next.row(c) = centroids.row(c);
      shift = std::max(shift, (next.row(c) - centroids.row(c)).norm());
    }
    centroids = std::move(next);
    if (shift < opt.tol) break;
  }

  r.inertia = detail::assign(data, centroids, r.labels, d2);
  r.inertia = detail::repair_empty(data, centroids, r.labels, d2, r.inertia);
  r.inertia_trace.push_back(r.inertia);
  if (opt.hartigan && detail::hartigan_refine(data, centroids, r.labels, opt.max_iter)) {
    r.inertia = detail::assign(data, centroids, r.labels, d2);
    r.inertia_trace.push_back(r.inertia);
  }
  r.centroids = std::move(centroids);
  return r;
}

/// K-Means++ seeding: first centre uniform, the rest drawn with probability
/// proportional to squared distance to the nearest chosen centre. Returns the
/// chosen row indices.
inline std::vector<std::size_t> kmeanspp_rows(const Matrix& data, std::size_t k, Rng& rng) {
  const auto n = static_cast<std::size_t>(data.rows());
  std::vector<std::size_t> rows;
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  rows.push_back(first(rng));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = (data.row(static_cast<Eigen::Index>(i)) - data.row(static_cast<Eigen::Index>(rows[0]))).squaredNorm();

  for (std::size_t j = 1; j < k; ++j) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        target -= d2[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    rows.push_back(pick);
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], (data.row(static_cast<Eigen::Index>(i)) - data.row(static_cast<Eigen::Index>(pick))).squaredNorm());
  }
  return rows;
}

inline Matrix rows_of(const Matrix& data, const std::vector<std::size_t>& rows) {
  Matrix c(static_cast<Eigen::Index>(rows.size()), data.cols());
  for (std::size_t j = 0; j < rows.size(); ++j) c.row(static_cast<Eigen::Index>(j)) = data.row(static_cast<Eigen::Index>(rows[j]));
  return c;
}

inline Matrix kmeanspp_init(const Matrix& data, std::size_t k, Rng& rng) { return rows_of(data, kmeanspp_rows(data, k, rng)); }

inline void check_fit_input(const Matrix& data, std::size_t k) {
  if (k < 1) throw config_error("kmeans: k must be positive");
  if (static_cast<std::size_t>(data.rows()) < k)
    throw data_error("kmeans: need at least k=" + std::to_string(k) + " rows, got " + std::to_string(data.rows()));
  if (data.cols() == 0) throw data_error("kmeans: data has no columns");
  if (!data.allFinite()) throw data_error("kmeans: non-finite input");
}

/// Best-inertia Lloyd run over `restarts` distinct K-Means++ seedings. Each restart
/// draws its own engine seed from the master seed, so results depend only on
/// (data, k, seed, options).
inline KMeansModel kmeans_fit(const Matrix& data, std::size_t k, std::uint64_t seed, const KMeansOptions& opt = {},
                              std::vector<std::string> columns = {}) {
  check_fit_input(data, k);
  Rng master(seed);
  LloydResult best;
  bool have = false;
  std::set<std::vector<std::size_t>> tried;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, opt.restarts); ++r) {
    Rng rng(master());
    // On small inputs K-Means++ repeats itself; redraw a few times so the
    // restarts cover distinct seedings.
    auto rows = kmeanspp_rows(data, k, rng);
    for (int redraw = 0; redraw < 16; ++redraw) {
      auto key = rows;
      std::sort(key.begin(), key.end());
      if (tried.insert(key).second) break;
      rows = kmeanspp_rows(data, k, rng);
    }
    auto run = lloyd(data, rows_of(data, rows), opt);
    if (!have || run.inertia < best.inertia) {
      best = std::move(run);
      have = true;
    }
  }
  KMeansModel m;
  m.k = k;
  m.centroids = std::move(best.centroids);
  m.rng_seed = seed;
  m.inertia = best.inertia;
  if (columns.empty())
    for (Eigen::Index j = 0; j < data.cols(); ++j) columns.push_back("x" + std::to_string(j));
  m.feature_columns = std::move(columns);
  return m;
}

inline std::vector<int> kmeans_predict(const KMeansModel& model, const Matrix& data) {
  if (data.cols() != model.centroids.cols())
    throw data_error("kmeans_predict: expected " + std::to_string(model.centroids.cols()) + " columns, got " +
                     std::to_string(data.cols()));
  std::vector<int> labels(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index i = 0; i < data.rows(); ++i) labels[static_cast<std::size_t>(i)] = nearest_centroid(data.row(i), model.centroids);
  return labels;
}

inline double inertia_of(const Matrix& data, const Matrix& centroids, const std::vector<int>& labels) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    s += (data.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  return s;
}

}  // namespace chaoskit::cluster
