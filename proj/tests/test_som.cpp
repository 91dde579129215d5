#include <chaoskit/som/som.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace chaoskit;
using namespace chaoskit::som;

namespace {

std::vector<std::string> names(std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < d; ++j) out.push_back("f" + std::to_string(j));
  return out;
}

// Gaussian blobs with centres `spacing` apart along successive axes.
Matrix blobs(std::size_t per_blob, std::size_t n_blobs, std::size_t d, double spacing, std::uint64_t seed,
             std::vector<int>* truth = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(static_cast<Eigen::Index>(per_blob * n_blobs), static_cast<Eigen::Index>(d));
  for (std::size_t b = 0; b < n_blobs; ++b)
    for (std::size_t i = 0; i < per_blob; ++i) {
      const auto r = static_cast<Eigen::Index>(b * per_blob + i);
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(r, j) = g(rng);
      x(r, static_cast<Eigen::Index>(b % d)) += spacing * static_cast<double>(1 + b / d);
      if (truth) truth->push_back(static_cast<int>(b));
    }
  return x;
}

Matrix uniform_square(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  return x;
}

SomConfig grid(std::size_t r, std::size_t c, std::size_t epochs, std::uint64_t seed = 1) {
  SomConfig cfg;
  cfg.rows = r;
  cfg.cols = c;
  cfg.epochs = epochs;
  cfg.rng_seed = seed;
  return cfg;
}

SomModel hand_model(std::size_t r, std::size_t c, Matrix weights) {
  SomModel m;
  m.config = grid(r, c, 1);
  m.columns = names(static_cast<std::size_t>(weights.cols()));
  m.scaler.mean = RowVector::Zero(weights.cols());
  m.scaler.scale = RowVector::Ones(weights.cols());
  m.weights = std::move(weights);
  return m;
}

}  // namespace

TEST(SomConfig, DefaultsAndValidation) {
  SomConfig c;
  EXPECT_EQ(c.rows * c.cols, 324u);
  EXPECT_DOUBLE_EQ(c.start_radius(), 9.0);
  EXPECT_DOUBLE_EQ(c.learning_rate(0), 0.5);
  EXPECT_DOUBLE_EQ(c.learning_rate(c.epochs - 1), 0.01);
  EXPECT_DOUBLE_EQ(c.radius(c.epochs - 1), 1.0);
  c.validate();
  auto bad = grid(1, 1, 5);
  EXPECT_THROW(bad.validate(), Error);
  bad = grid(4, 4, 5);
  bad.final_learning_rate = 0.9;
  EXPECT_THROW(bad.validate(), Error);
  bad = grid(4, 4, 5);
  bad.final_radius = 0.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(SomFit, SingleRepeatedVectorConverges) {
  RowVector v(3);
  v << 0.3, -2.0, 7.5;
  const Matrix x = v.replicate(20, 1);
  const auto m = som_fit(x, names(3), grid(4, 4, 50));
  const Matrix w = m.scaler.inverse(m.weights);
  for (Eigen::Index n = 0; n < w.rows(); ++n) EXPECT_LT((w.row(n) - v).cwiseAbs().maxCoeff(), 1e-2) << "node " << n;
  const auto b = bmu_assign(m, x);
  EXPECT_EQ(std::set<std::size_t>(b.begin(), b.end()).size(), 1u);
}

TEST(SomFit, UniformSquareReducesQuantizationError) {
  const Matrix x = uniform_square(1000, 3);
  const auto m = som_fit(x, names(2), grid(8, 8, 30, 2));
  EXPECT_LT(m.final_qe, m.initial_qe);
  EXPECT_NEAR(quantization_error(m, x), m.final_qe, 1e-12);
}

TEST(SomFit, ReducedGridHasSixteenNodes) {
  const Matrix x = blobs(40, 2, 8, 6.0, 4);
  const auto m = som_fit(x, names(8), grid(4, 4, 10));
  EXPECT_EQ(m.nodes(), 16u);
  EXPECT_EQ(m.weights.rows(), 16);
  EXPECT_EQ(m.weights.cols(), 8);
}

TEST(SomFit, RejectsEmptyAndMismatchedInput) {
  EXPECT_THROW(som_fit(Matrix(0, 2), names(2), grid(2, 2, 1)), Error);
  EXPECT_THROW(som_fit(uniform_square(10, 1), names(3), grid(2, 2, 1)), Error);
}

TEST(SomFit, DeterministicAndJsonRoundTrip) {
  const Matrix x = blobs(30, 3, 3, 5.0, 7);
  const auto a = som_fit(x, names(3), grid(5, 4, 8, 9));
  const auto b = som_fit(x, names(3), grid(5, 4, 8, 9));
  EXPECT_TRUE(a.weights == b.weights);
  EXPECT_EQ(a.qe_trace, b.qe_trace);
  const auto back = SomModel::from_json(io::Json::parse(a.to_json().dump()));
  EXPECT_EQ(bmu_assign(back, x), bmu_assign(a, x));
  EXPECT_EQ(back.to_json().dump(), a.to_json().dump());
}

TEST(SomFit, QuantizationErrorMostlyFallsOnBlobs) {
  const Matrix x = blobs(60, 4, 4, 6.0, 5);
  SomConfig cfg;
  cfg.rng_seed = 3;
  const auto m = som_fit(x, names(4), cfg);
  std::size_t ok = 0;
  for (std::size_t e = 1; e < m.qe_trace.size(); ++e) ok += m.qe_trace[e] <= m.qe_trace[e - 1];
  EXPECT_GE(static_cast<double>(ok), 0.9 * static_cast<double>(m.qe_trace.size() - 1));
}

TEST(SomStep, UpdateMovesBmuTowardInput) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix w(12, 3);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
    RowVector x(3);
    x << u(rng), u(rng), u(rng);
    const double alpha = 0.05 + 0.95 * (u(rng) + 1.0) / 2.0;
    double before = 0.0;
    const std::size_t bmu = nearest_node(w, x, &before);
    ASSERT_EQ(train_step(w, 4, x, alpha, 1.5), bmu);
    EXPECT_LT((w.row(static_cast<Eigen::Index>(bmu)) - x).squaredNorm(), before);
  }
}

TEST(Bmu, ExactWeightAndTieRule) {
  const Matrix x = blobs(20, 2, 2, 5.0, 1);
  const auto m = som_fit(x, names(2), grid(3, 3, 5));
  const Matrix w = m.scaler.inverse(m.weights);
  EXPECT_EQ(bmu_assign(m, w.row(7))[0], 7u);
  const auto h = hand_model(1, 2, (Matrix(2, 1) << -1.0, 1.0).finished());
  EXPECT_EQ(bmu_assign(h, Matrix::Zero(1, 1))[0], 0u);
  EXPECT_THROW(bmu_assign(h, Matrix::Zero(1, 2)), Error);
}

TEST(Bmu, SeparatedBlobsUseDisjointNodes) {
  std::vector<int> truth;
  const Matrix x = blobs(50, 2, 2, 20.0, 6, &truth);
  const auto m = som_fit(x, names(2), grid(4, 4, 20));
  const auto b = bmu_assign(m, x);
  std::set<std::size_t> s[2];
  for (std::size_t i = 0; i < b.size(); ++i) s[truth[i]].insert(b[i]);
  for (auto n : s[0]) EXPECT_FALSE(s[1].count(n)) << "node " << n;
}

TEST(UMatrix, ConstantAndTwoNodeExamples) {
  const auto flat = hand_model(3, 4, Matrix::Constant(12, 2, 0.7));
  EXPECT_EQ(u_matrix(flat).cwiseAbs().maxCoeff(), 0.0);
  const auto pair = hand_model(1, 2, (Matrix(2, 2) << 0.0, 0.0, 3.0, 0.0).finished());
  const Matrix u = u_matrix(pair);
  EXPECT_DOUBLE_EQ(u(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(u(0, 1), 3.0);
}

TEST(UMatrix, BorderAveragesExistingNeighbours) {
  // 2x2 grid: node 0 neighbours are 1 (dist 1) and 2 (dist 2).
  const auto m = hand_model(2, 2, (Matrix(4, 1) << 0.0, 1.0, 2.0, 5.0).finished());
  const Matrix u = u_matrix(m);
  EXPECT_DOUBLE_EQ(u(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(u(0, 1), (1.0 + 4.0) / 2.0);
  EXPECT_DOUBLE_EQ(u(1, 0), (2.0 + 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(u(1, 1), (4.0 + 3.0) / 2.0);
}

TEST(UMatrix, BlobsProduceARidge) {
  const Matrix x = blobs(100, 2, 2, 20.0, 8);
  const auto m = som_fit(x, names(2), grid(8, 8, 30));
  const Matrix u = u_matrix(m);
  std::vector<double> v(u.data(), u.data() + u.size());
  std::sort(v.begin(), v.end());
  EXPECT_GT(v.back(), 2.0 * v[v.size() / 2]);
}

TEST(Planes, CountUnitsAndSingleFeature) {
  Matrix x(50, 1);
  for (Eigen::Index i = 0; i < 50; ++i) x(i, 0) = 100.0 + 3.0 * static_cast<double>(i % 7);
  const auto m = som_fit(x, {"only"}, grid(3, 3, 5));
  const auto planes = component_planes(m);
  ASSERT_EQ(planes.size(), 1u);
  const Matrix w = m.scaler.inverse(m.weights);
  for (Eigen::Index n = 0; n < 9; ++n) EXPECT_DOUBLE_EQ(planes[0](n / 3, n % 3), w(n, 0));

  const auto m3 = som_fit(blobs(30, 2, 3, 4.0, 2), names(3), grid(3, 2, 5));
  EXPECT_EQ(component_planes(m3).size(), 3u);
}

TEST(Planes, DuplicatedFeatureGivesEqualPlanes) {
  Matrix x = blobs(80, 3, 3, 6.0, 12);
  Matrix dup(x.rows(), 4);
  dup.leftCols(3) = x;
  dup.col(3) = x.col(0);
  const auto m = som_fit(dup, names(4), grid(6, 6, 30));
  const auto planes = component_planes(m);
  const double diff = std::sqrt((planes[0] - planes[3]).squaredNorm() / static_cast<double>(planes[0].size()));
  const double mag = std::sqrt(planes[0].squaredNorm() / static_cast<double>(planes[0].size()));
  EXPECT_LT((planes[0] - planes[3]).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(diff, 1e-3 * mag);
}

TEST(QuantizationError, ZeroOnWeightsAndNonNegative) {
  const Matrix x = blobs(40, 2, 3, 5.0, 3);
  const auto m = som_fit(x, names(3), grid(4, 3, 10));
  EXPECT_NEAR(quantization_error(m, m.scaler.inverse(m.weights)), 0.0, 1e-12);
  EXPECT_GE(quantization_error(m, x), 0.0);
}

TEST(SomVerify, FourBlobsOnTwoByTwo) {
  std::vector<int> truth;
  const Matrix x = blobs(60, 4, 4, 12.0, 21, &truth);
  const auto m = som_fit(x, names(4), grid(2, 2, 20));
  const auto rep = som_verify(m, x, 3);
  EXPECT_EQ(rep.classes, 4u);
  EXPECT_GT(rep.knn.mean_accuracy, 0.95);
  EXPECT_GT(rep.knn_pca.mean_accuracy, 0.95);
  EXPECT_GE(rep.pca_retained, 0.95);

  std::mt19937_64 rng(5);
  std::vector<int> random(truth.size());
  for (auto& l : random) l = static_cast<int>(rng() % 4);
  const double chance = cluster::knn_weighted_cv5(m.standardize(x), random, 10, 3).mean_accuracy;
  EXPECT_NEAR(chance, 0.25, 0.1);
}

TEST(SomVerify, SmallClustersMergeIntoNearestNode) {
  // Nodes 0 and 2 hold most rows; node 1 (close to node 2) holds 3.
  auto m = hand_model(1, 3, (Matrix(3, 1) << 0.0, 9.0, 10.0).finished());
  Matrix x(23, 1);
  for (Eigen::Index i = 0; i < 10; ++i) x(i, 0) = 0.1 * static_cast<double>(i);
  for (Eigen::Index i = 10; i < 13; ++i) x(i, 0) = 9.0;
  for (Eigen::Index i = 13; i < 23; ++i) x(i, 0) = 10.0 + 0.1 * static_cast<double>(i - 13);
  std::vector<std::pair<std::size_t, std::size_t>> merged;
  const auto labels = merged_bmu_labels(m, bmu_assign(m, x), &merged);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0], (std::pair<std::size_t, std::size_t>{1, 2}));
  EXPECT_EQ(labels[11], 2);
  EXPECT_THROW(merged_bmu_labels(m, std::vector<std::size_t>(12, 0)), Error);
}
