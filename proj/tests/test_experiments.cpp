// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "sct/experiments.hpp"
#include "sct/ingest.hpp"
#include "test_util.hpp"

namespace sct::bench {
namespace {

using nlohmann::json;
using testing::throws_code;

TEST(Seeds, DeriveIsStableAndSpreads) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
  EXPECT_EQ(random_cloud(10, 4), random_cloud(10, 4));
}

TEST(Config, UnknownKeysAndBadTypesAreRejected) {
  EXPECT_TRUE(throws_code([] { InvarianceConfig::from_json({{"clouds", 2}, {"colouds", 3}}); }, ErrorCode::ConfigError));
  EXPECT_TRUE(throws_code([] { InvarianceConfig::from_json({{"clouds", "many"}}); }, ErrorCode::ConfigError));
  EXPECT_TRUE(throws_code([] { InvarianceConfig::from_json({{"methods", {"svd"}}}); }, ErrorCode::ConfigError));
  EXPECT_TRUE(throws_code([] { RobustnessConfig::from_json({{"subsample_counts", {2000}}}); }, ErrorCode::ConfigError));
  EXPECT_TRUE(throws_code([] { BenchTimeConfig::from_json({{"kernel", "gpu"}}); }, ErrorCode::ConfigError));
  EXPECT_TRUE(throws_code([] { ToyE2EConfig::from_json({{"epochs", 0}}); }, ErrorCode::ConfigError));
  EXPECT_TRUE(throws_code([] { ToyE2EConfig::from_json(json::array()); }, ErrorCode::ConfigError));
}

TEST(Config, EchoRoundTrips) {
  InvarianceConfig c;
  c.clouds = 3;
  c.seed = 77;
  c.cat.tie_tol = 1e-8;
  EXPECT_EQ(InvarianceConfig::from_json(c.to_json()).to_json(), c.to_json());
  EXPECT_EQ(RobustnessConfig::from_json(RobustnessConfig{}.to_json()).to_json(), RobustnessConfig{}.to_json());
  EXPECT_EQ(ToyE2EConfig::from_json(ToyE2EConfig{}.to_json()).to_json(), ToyE2EConfig{}.to_json());
  EXPECT_EQ(BenchTimeConfig::from_json(BenchTimeConfig{}.to_json()).to_json(), BenchTimeConfig{}.to_json());
}

TEST(VerifyInvariance, IdentityMotionsGiveZeroDeviation) {
  InvarianceConfig c;
  c.clouds = 3;
  c.motions = 2;
  c.identity_only = true;
  const BenchReport r = run_verify_invariance(c);
  ASSERT_EQ(r.records.size(), 3u * 2u * 3u);
  for (const TrialRecord& t : r.records) EXPECT_LE(t.value, 1e-12) << t.method;
  EXPECT_TRUE(r.passed);
}

TEST(VerifyInvariance, CatPassesAndPcaDoesNot) {
  InvarianceConfig c;
  c.clouds = 4;
  c.motions = 10;
  const BenchReport r = run_verify_invariance(c);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.summary["methods"]["cat"]["max_deviation_tie_free"].get<double>(), 1e-5);
  EXPECT_LE(r.summary["methods"]["cat+fa"]["max_deviation_tie_free"].get<double>(), 1e-5);
  EXPECT_GT(r.summary["methods"]["pca"]["max_deviation_tie_free"].get<double>(), 0.1);
  for (const TrialRecord& t : r.records) EXPECT_NE(t.seed, 0u);
}

TEST(VerifyInvariance, TiedInputsAreExcludedFromTheVerdict) {
  InvarianceConfig c;
  c.clouds = 0;
  c.motions = 3;
  c.methods = {"cat"};
  c.inputs = {testing::fixture("good/cube_quads.off").string()};
  const BenchReport r = run_verify_invariance(c);
  ASSERT_EQ(r.records.size(), 3u);
  for (const TrialRecord& t : r.records) EXPECT_FALSE(t.tie_free);
  EXPECT_EQ(r.summary["clouds_with_ties"], 1);
  EXPECT_TRUE(r.passed);
}

TEST(Robustness, ZeroLevelsAreExactAndAggregatesRecompute) {
  RobustnessConfig c;
  c.trials = 3;
  c.base_points = 256;
  c.noise_levels = {0.0, 0.05};
  c.subsample_counts = {256, 128};
  c.partial_ratios = {1.0, 0.7};
  const BenchReport r = run_robustness(c);
  EXPECT_TRUE(r.passed);
  for (const AggregateRow& a : r.aggregates()) {
    if ((a.kind == "noise" && a.level == 0.0) || (a.kind == "partial" && a.level == 1.0) ||
        (a.kind == "subsample" && a.level == 256.0)) {
      EXPECT_LE(a.max, 1e-12) << a.kind;
    }
    // Recompute the mean from the per-trial rows.
    double sum = 0.0;
    std::size_t n = 0;
    for (const TrialRecord& t : r.records) {
      if (t.method == a.method && t.kind == a.kind && t.level == a.level && t.metric == a.metric) {
        sum += t.value;
        ++n;
      }
    }
    EXPECT_EQ(n, a.count);
    EXPECT_DOUBLE_EQ(sum / double(n), a.mean);
  }
}

TEST(Report, JsonAndCsvShapes) {
  BenchReport r;
  r.command = "x";
  r.records.push_back({"cat", "noise", 0.01, 5, "rms_deviation", 0.5, 0, true, ""});
  r.records.push_back({"cat", "noise", 0.01, 6, "rms_deviation", NAN, 1, true, "failed, badly"});
  const json j = r.to_json();
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["records"][1]["value"], nullptr);
  EXPECT_EQ(j["aggregates"][0]["count"], 1);
  EXPECT_EQ(j["aggregates"][0]["failed"], 1);
  const std::string csv = r.to_csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("\"failed, badly\""), std::string::npos);
}

TEST(BenchTime, OneRowPerSize) {
  BenchTimeConfig c;
  c.min_log2 = 4;
  c.max_log2 = 8;
  c.repeats = 1;
  c.kernel = "both";
  c.max_ratio = 1e9;
  const BenchReport r = run_bench_time(c);
  EXPECT_EQ(r.records.size(), 10u);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.summary["kernels"].contains("serial"));
}

TEST(ToyE2E, UntrainedModelIsNearChance) {
  ToyE2EConfig c;
  c.train_per_class = 4;
  c.test_per_class = 10;
  c.points = 64;
  c.ablation = false;
  c.train.learning_rate = 0.0;
  c.train.epochs = 1;
  const BenchReport r = run_toy_e2e(c);
  const double acc = r.summary["cat+fa"]["accuracy_nr_nr"];
  EXPECT_LE(acc, 0.6);
  EXPECT_TRUE(r.passed);  // invariance does not depend on training
  EXPECT_EQ(r.summary["cat+fa"]["delta_acc"], 0.0);
}

TEST(Transform, TetrahedronFixture) {
  TransformRequest req;
  req.input = testing::fixture("good/tetra.off");
  const TransformOutcome out = run_transform(req);
  EXPECT_TRUE(out.warnings.empty());
  const PointCloud p = ingest::parse_xyz(out.xyz);
  ASSERT_EQ(p.size(), 4u);
  Vec3 b;
  for (const Vec3& v : p) b += v;
  EXPECT_LE(max_abs(b / 4.0), 1e-11);
  EXPECT_EQ(run_transform(req).xyz, out.xyz);
}

TEST(Transform, WarningsAndErrors) {
  TransformRequest req;
  req.input = testing::fixture("good/cube_quads.off");
  EXPECT_FALSE(run_transform(req).warnings.empty());
  req.method = "cat+fa";
  EXPECT_TRUE(throws_code([&] { run_transform(req); }, ErrorCode::ConfigError));
  req.method = "pca";
  req.sample = 500;
  EXPECT_EQ(ingest::parse_xyz(run_transform(req).xyz).size(), 500u);
  req.input = testing::fixture("bad/index_out_of_range.off");
  EXPECT_TRUE(throws_code([&] { run_transform(req); }, ErrorCode::IndexOutOfRange));
}

}  // namespace
}  // namespace sct::bench
