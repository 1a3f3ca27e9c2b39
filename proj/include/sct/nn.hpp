// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal dense layers with hand-written backward passes. Activations are
// stored row-per-point (N × features) so a layer applied to a whole cloud is
// a shared per-point MLP.

#ifndef SCT_NN_HPP
#define SCT_NN_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sct/geom.hpp"

namespace sct::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Activation { Relu, None };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

struct MlpLayer {
  Matrix weights;  // out × in
  Vector bias;     // out
  Activation activation = Activation::Relu;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }

  static MlpLayer zeros(Eigen::Index in, Eigen::Index out, Activation act);
  /// He-style Gaussian init: std = gain · sqrt(1 / in), bias zero.
  static MlpLayer random(Eigen::Index in, Eigen::Index out, Activation act, double gain, std::mt19937_64& rng);

  MlpLayer zeros_like() const { return zeros(in_dim(), out_dim(), activation); }
};

/// Inputs and pre-activations kept for the backward pass.
struct DenseCache {
  Matrix input;
  Matrix pre;
};

Matrix dense_forward(const MlpLayer& layer, const Matrix& x, DenseCache* cache = nullptr);

/// Accumulates into grad and returns d(loss)/d(input).
Matrix dense_backward(const MlpLayer& layer, const DenseCache& cache, const Matrix& d_out, MlpLayer& grad);

/// Column-wise max over rows; argmax ties go to the lowest row.
Matrix max_pool(const Matrix& x, std::vector<Eigen::Index>& argmax);

/// Scatters a pooled gradient back to the argmax rows.
Matrix max_pool_backward(const Matrix& d_pooled, const std::vector<Eigen::Index>& argmax, Eigen::Index rows);

Matrix to_matrix(const PointCloud& p);
PointCloud to_cloud(const Matrix& m);

/// Visits every parameter tensor (weights then bias) of a layer stack.
using TensorVisitor = std::function<void(const std::string& name, std::span<double> values)>;
void visit_layer(MlpLayer& layer, const std::string& name, const TensorVisitor& fn);

bool all_finite(const MlpLayer& layer);

}  // namespace sct::nn

#endif  // SCT_NN_HPP
