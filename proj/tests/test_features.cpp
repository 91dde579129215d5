#include <gtest/gtest.h>

#include <chaoskit/features/correlation.hpp>
#include <chaoskit/features/extract.hpp>
#include <chaoskit/features/feature_table.hpp>

#include "support.hpp"

#include <sstream>

using namespace chaoskit;
using namespace chaoskit::features;
using testsupport::clip_of;

TEST(FrameFeatures, SilentFrame) {
  const auto v = frame_features(clip_of(std::vector<double>(8000, 0.0)));
  // Every coefficient column is (c0, 0, ..., 0) with c0 = 8 ln(1e-10); the
  // pooled mean and population std follow from 1 nonzero value in 13.
  const double c0 = 8.0 * std::log(1e-10);
  const double mean = c0 / 13.0;
  const double sd = std::sqrt((c0 * c0) / 13.0 - mean * mean);
  EXPECT_NEAR(v[mfcc_mean], mean, 1e-9);
  EXPECT_NEAR(v[mfcc_std], sd, 1e-9);
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (j == mfcc_mean || j == mfcc_std) continue;
    EXPECT_EQ(v.values[j], 0.0) << kFeatureNames[j];
  }
}

TEST(FrameFeatures, ConstantFrame) {
  const auto v = frame_features(clip_of(std::vector<double>(8000, 0.5)));
  EXPECT_DOUBLE_EQ(v[raw_mean], 0.5);
  EXPECT_NEAR(v[raw_std], 0.0, 1e-15);
  EXPECT_EQ(v[zcr_mean], 0.0);
}

TEST(FrameFeatures, AmplitudeModulationRaisesRmseSpread) {
  // Same total energy: half-silent burst at 0.5 RMS vs steady noise at 0.5/sqrt(2).
  auto burst = testsupport::white_noise(8000, 0.5 * std::sqrt(3.0), 17);
  for (std::size_t i = 0; i < 4000; ++i) burst[i] = 0.0;
  const auto steady = testsupport::white_noise(8000, 0.5 * std::sqrt(3.0) / std::sqrt(2.0), 18);
  EXPECT_GT(frame_features(clip_of(burst))[rmse_std], frame_features(clip_of(steady))[rmse_std]);
}

TEST(FrameFeatures, RejectsWrongRateOrLength) {
  EXPECT_THROW(FrameFeatureExtractor()(clip_of(std::vector<double>(16000, 0.0), 16000)), Error);
  EXPECT_THROW(FrameFeatureExtractor()(clip_of(std::vector<double>(7000, 0.0))), Error);
}

TEST(FrameFeatures, InvariantsHoldOnRandomSignals) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const FrameFeatureExtractor fx;
  for (int trial = 0; trial < 8; ++trial) {
    auto x = testsupport::white_noise(8000, 0.4, 100 + static_cast<std::uint64_t>(trial));
    const auto tone = testsupport::sine(200.0 + 300.0 * trial, 1.0, 8000, 0.3 * u(rng));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x[i] * (i > 3000 ? 1.0 : u(rng)) + tone[i];
    const double c = 0.25 + 1.5 * u(rng);
    std::vector<double> scaled(x);
    for (double& s : scaled) s *= c;

    const auto a = fx.compute(x);
    const auto b = fx.compute(scaled);
    for (Feature f : {zcr_mean, zcr_std, centroid_mean, centroid_std, bandwidth_mean, bandwidth_std,
                      rolloff_mean, rolloff_std, flatness_mean, flatness_std})
      EXPECT_NEAR(a[f], b[f], 1e-9 * std::max(1.0, std::abs(a[f]))) << kFeatureNames[f];
    EXPECT_NEAR(b[rmse_mean], c * a[rmse_mean], 1e-12);

    for (Feature f : {raw_std, mfcc_std, rmse_std, zcr_std, centroid_std, bandwidth_std, rolloff_std, flatness_std})
      EXPECT_GE(a[f], 0.0);
    EXPECT_GE(a[flatness_mean], 0.0);
    EXPECT_LE(a[flatness_mean], 1.0);
    EXPECT_GE(a[zcr_mean], 0.0);
    EXPECT_LE(a[zcr_mean], 1.0);
  }
}

namespace {
std::vector<FrameFeatureVector> frames_with(std::size_t n, auto value_of) {
  std::vector<FrameFeatureVector> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].start_offset_s = 0.5 * static_cast<double>(i);
    out[i].source_id = "s";
    for (std::size_t j = 0; j < kFeatureCount; ++j) out[i].values[j] = value_of(i, j);
  }
  return out;
}
}  // namespace

TEST(AggregateWindows, MeansOfTwentyFrames) {
  const auto same = aggregate_windows(frames_with(20, [](std::size_t, std::size_t j) { return 0.1 * j; }));
  ASSERT_EQ(same.size(), 1u);
  for (std::size_t j = 0; j < kFeatureCount; ++j) EXPECT_DOUBLE_EQ(same[0].values[j], 0.1 * j);

  EXPECT_EQ(aggregate_windows(frames_with(40, [](auto, auto) { return 1.0; })).size(), 2u);
  EXPECT_EQ(aggregate_windows(frames_with(59, [](auto, auto) { return 1.0; })).size(), 2u);

  const auto ramp = aggregate_windows(frames_with(20, [](std::size_t i, std::size_t) { return i / 19.0; }));
  EXPECT_NEAR(ramp[0][raw_mean], 0.5, 1e-15);

  const auto two = aggregate_windows(frames_with(45, [](std::size_t i, std::size_t) { return double(i); }));
  EXPECT_DOUBLE_EQ(two[1].window_start_s, 10.0);
  EXPECT_EQ(two[1].window_index, 1u);

  EXPECT_THROW(aggregate_windows(frames_with(19, [](auto, auto) { return 1.0; })), Error);
}

TEST(AggregateWindows, WindowsEqualMeanOfTheirFramesOnRealAudio) {
  auto x = testsupport::white_noise(8000 * 25, 0.3, 5);
  const auto tone = testsupport::sine(300.0, 25.0, 8000, 0.4);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i / 12000) % 2 ? tone[i] : x[i];
  const auto frames = extract_frames(clip_of(x));
  const auto windows = aggregate_windows(frames);
  ASSERT_EQ(frames.size(), 49u);
  ASSERT_EQ(windows.size(), 2u);
  for (std::size_t w = 0; w < windows.size(); ++w)
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < 20; ++i) s += frames[w * 20 + i].values[j];
      EXPECT_NEAR(windows[w].values[j], s / 20.0, 1e-12 * std::max(1.0, std::abs(s)));
    }
}

TEST(Correlation, PerfectAndAntiCorrelation) {
  Matrix m(50, 4);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    m(i, 0) = g(rng);
    m(i, 1) = 2.0 * m(i, 0);
    m(i, 2) = -m(i, 0);
    m(i, 3) = 7.0;
  }
  const auto rep = correlation_matrix(m, {"a", "b", "c", "k"});
  EXPECT_NEAR(rep.r(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(rep.r(0, 2), -1.0, 1e-12);
  EXPECT_EQ(rep.r(0, 3), 0.0);
  EXPECT_EQ(rep.r(3, 3), 1.0);
  ASSERT_EQ(rep.constant_columns, std::vector<std::size_t>{3});
  ASSERT_EQ(rep.pairs.size(), 3u);  // (a,b), (a,c), (b,c)
  EXPECT_EQ(rep.pairs[1].b, 2u);
  EXPECT_TRUE(rep.r.isApprox(rep.r.transpose()));
  EXPECT_EQ(uncorrelated_columns(rep), (std::vector<std::string>{"a"}));
  EXPECT_THROW(correlation_matrix(Matrix(1, 2), {"a", "b"}), Error);
}

TEST(Correlation, IndependentColumnsAreWeaklyCorrelated) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u;
  Matrix m(1000, 16);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  const auto rep = correlation_matrix(m, FeatureTable::all_columns());
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b)
      if (a != b) EXPECT_LT(std::abs(rep.r(a, b)), 0.2);
  EXPECT_TRUE(rep.pairs.empty());
  EXPECT_EQ(uncorrelated_columns(rep, 8).size(), 8u);
}

TEST(FeatureTable, CsvHeaderAndRoundTrip) {
  WindowFeatureVector a, b;
  a.source_id = "zeta";
  b.source_id = "alpha";
  b.window_start_s = 10.0;
  b.window_index = 1;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    a.values[j] = 1.0 / 3.0 + j;
    b.values[j] = -2e-7 * j;
  }
  const FeatureTable t({a, b});
  EXPECT_EQ(t[0].source_id, "alpha");
  std::stringstream ss;
  t.write_csv(ss);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header,
            "source_id,window_index,window_start_s,raw_mean,raw_std,mfcc_mean,mfcc_std,rmse_mean,rmse_std,"
            "zcr_mean,zcr_std,centroid_mean,centroid_std,bandwidth_mean,bandwidth_std,rolloff_mean,"
            "rolloff_std,flatness_mean,flatness_std");
  std::string line;
  std::getline(ss, line);
  std::getline(ss, line);
  EXPECT_EQ(line.substr(0, 24), "zeta,0,0,0.333333333,1.3");
  ss.seekg(0);
  const auto back = FeatureTable::read_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_NEAR(back[1][raw_mean], 1.0 / 3.0, 1e-9);
  std::stringstream bad("a,b\n1,2\n");
  EXPECT_THROW(FeatureTable::read_csv(bad), Error);
}
