// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

// The runs behind each CLI verb. Configs are JSON objects; every field has a
// default, unknown keys are rejected, and the effective config is echoed into
// the report so a run can be reproduced from its report alone.

#ifndef SCT_EXPERIMENTS_HPP
#define SCT_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sct/cat.hpp"
#include "sct/report.hpp"
#include "sct/toy_model.hpp"

namespace sct::bench {

/// Anisotropic Gaussian cloud (axis std 1.0, 0.6, 0.3); tie-free with probability one.
PointCloud random_cloud(std::size_t n, std::uint64_t seed);

// --- transform --------------------------------------------------------------

struct TransformRequest {
  std::filesystem::path input;
  std::string method = "cat";  // cat | pca | cat+fa
  std::filesystem::path checkpoint;
  std::optional<std::size_t> sample;  // sample an OFF surface instead of using vertices
  std::uint64_t seed = 0;
  cat::Options cat;
  int digits = 12;
};

struct TransformOutcome {
  std::string xyz;
  std::vector<std::string> warnings;
};

TransformOutcome run_transform(const TransformRequest& req);

// --- verify-invariance ------------------------------------------------------

struct InvarianceConfig {
  std::size_t clouds = 10;
  std::vector<std::size_t> points = {16, 256, 1024};
  std::size_t motions = 20;
  double translation_scale = 10.0;
  double tolerance = 1e-5;
  std::vector<std::string> methods = {"cat", "pca", "cat+fa"};
  bool identity_only = false;
  std::vector<std::string> inputs;
  std::string checkpoint;
  std::uint64_t seed = 1;
  cat::Options cat;

  static InvarianceConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

BenchReport run_verify_invariance(const InvarianceConfig& cfg);

// --- robustness -------------------------------------------------------------

struct RobustnessConfig {
  std::size_t trials = 30;
  std::size_t base_points = 1024;
  std::vector<double> noise_levels = {0.0, 0.01, 0.02, 0.05, 0.1};
  std::vector<std::size_t> subsample_counts = {1024, 768, 512, 256};
  std::vector<double> partial_ratios = {1.0, 0.9, 0.8, 0.7};
  std::string checkpoint;
  std::size_t eval_per_class = 10;
  std::uint64_t seed = 1;
  cat::Options cat;

  static RobustnessConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

BenchReport run_robustness(const RobustnessConfig& cfg);

// --- toy-e2e ----------------------------------------------------------------

struct ToyE2EConfig {
  std::size_t train_per_class = 20;
  std::size_t test_per_class = 10;
  std::size_t points = 256;
  double translation_scale = 1.0;
  bool ablation = true;
  std::string checkpoint_out;
  toy::TrainConfig train;

  static ToyE2EConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Throws TrainingDiverged when training blows up.
BenchReport run_toy_e2e(const ToyE2EConfig& cfg);

// --- bench-time -------------------------------------------------------------

struct BenchTimeConfig {
  int min_log2 = 10;
  int max_log2 = 20;
  int repeats = 5;
  std::string kernel = "parallel";  // parallel | serial | both
  double max_ratio = 3.0;
  std::uint64_t seed = 1;

  static BenchTimeConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

BenchReport run_bench_time(const BenchTimeConfig& cfg);

}  // namespace sct::bench

#endif  // SCT_EXPERIMENTS_HPP
