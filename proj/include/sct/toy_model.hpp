// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

// Desk-scale end-to-end pipeline: CAT → FA → a small PointNet-style
// classifier (shared MLP, max-pool, linear head, softmax), trained jointly by
// plain gradient descent on cross-entropy.

#ifndef SCT_TOY_MODEL_HPP
#define SCT_TOY_MODEL_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sct/cat.hpp"
#include "sct/fa_net.hpp"
#include "sct/nn.hpp"

namespace sct::toy {

using nn::Matrix;
using nn::MlpLayer;

struct ClassifierShape {
  Eigen::Index h1 = 64;
  Eigen::Index c = 128;
};

struct ClassifierParams {
  std::vector<MlpLayer> shared;  // 3 → … → C, per point
  MlpLayer head;                 // C → labels, linear

  void validate() const;
  ClassifierParams zeros_like() const;
  void visit(const nn::TensorVisitor& fn);
  ClassifierParams& operator+=(const ClassifierParams& o);
};

ClassifierParams init_classifier(const ClassifierShape& shape, std::size_t labels, std::uint64_t seed);

struct Model {
  bool use_cat = true;
  bool use_fa = true;
  cat::Options cat_options;
  fa::FaParams fa;
  ClassifierParams classifier;

  std::size_t labels() const { return static_cast<std::size_t>(classifier.head.out_dim()); }
  void visit(const nn::TensorVisitor& fn);
};

struct LabeledCloud {
  PointCloud cloud;
  int label = 0;
};

struct ToyDataset {
  std::vector<LabeledCloud> train;
  std::vector<LabeledCloud> test;
  std::vector<std::string> class_names;
};

/// Axis-aligned boxes, cylinders and ellipsoids (labels 0, 1, 2) sampled
/// with `points` surface points each and normalized to the unit sphere.
ToyDataset make_toy_dataset(std::size_t train_per_class, std::size_t test_per_class, std::size_t points,
                            std::uint64_t seed);

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 200;
  std::size_t batch_size = 10;
  std::uint64_t seed = 1;
  fa::FaShape fa_shape;
  ClassifierShape classifier_shape;
  bool use_cat = true;
  bool use_fa = true;
  cat::Options cat_options;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<EpochStats> history;
};

/// Deterministic for a fixed config: per-sample gradients are computed in
/// parallel but summed in sample order. Throws TrainingDiverged on a
/// non-finite loss.
TrainResult train_toy(const std::vector<LabeledCloud>& data, const TrainConfig& cfg);

/// CAT (when enabled) then FA (when enabled): the classifier's input.
Matrix preprocess(const Model& model, const PointCloud& cloud);

std::vector<double> logits(const Model& model, const PointCloud& cloud);
int predict(const Model& model, const PointCloud& cloud);
std::vector<int> predict_all(const Model& model, const std::vector<PointCloud>& clouds);
double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels);

/// Text checkpoint; see README for the layout. Round-trips bit for bit.
std::string serialize_checkpoint(const Model& model);
Model parse_checkpoint(std::string_view text);
void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace sct::toy

#endif  // SCT_TOY_MODEL_HPP
