// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include "sct/nn.hpp"

#include <cmath>

#include "sct/error.hpp"

namespace sct::nn {

std::string_view to_string(Activation a) { return a == Activation::Relu ? "relu" : "none"; }

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::Relu;
  if (name == "none") return Activation::None;
  throw Error(ErrorCode::ConfigError, "unknown activation '" + std::string(name) + "'");
}

MlpLayer MlpLayer::zeros(Eigen::Index in, Eigen::Index out, Activation act) {
  return {Matrix::Zero(out, in), Vector::Zero(out), act};
}

MlpLayer MlpLayer::random(Eigen::Index in, Eigen::Index out, Activation act, double gain, std::mt19937_64& rng) {
  MlpLayer l = zeros(in, out, act);
  std::normal_distribution<double> g(0.0, gain * std::sqrt(1.0 / static_cast<double>(in)));
  for (Eigen::Index r = 0; r < out; ++r)
    for (Eigen::Index c = 0; c < in; ++c) l.weights(r, c) = g(rng);
  return l;
}

Matrix dense_forward(const MlpLayer& layer, const Matrix& x, DenseCache* cache) {
  if (x.cols() != layer.in_dim()) {
    throw Error(ErrorCode::ConfigError, "layer expects " + std::to_string(layer.in_dim()) + " inputs, got " +
                                            std::to_string(x.cols()));
  }
  Matrix pre = x * layer.weights.transpose();
  pre.rowwise() += layer.bias.transpose();
  Matrix out = layer.activation == Activation::Relu ? Matrix(pre.cwiseMax(0.0)) : pre;
  if (cache != nullptr) {
    cache->input = x;
    cache->pre = std::move(pre);
  }
  return out;
}

Matrix dense_backward(const MlpLayer& layer, const DenseCache& cache, const Matrix& d_out, MlpLayer& grad) {
  Matrix d_pre = d_out;
  if (layer.activation == Activation::Relu) {
    d_pre = (cache.pre.array() > 0.0).select(d_out, 0.0);
  }
  grad.weights.noalias() += d_pre.transpose() * cache.input;
  grad.bias += d_pre.colwise().sum().transpose();
  return d_pre * layer.weights;
}

Matrix max_pool(const Matrix& x, std::vector<Eigen::Index>& argmax) {
  argmax.assign(static_cast<std::size_t>(x.cols()), 0);
  Matrix out(1, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < x.rows(); ++r) {
      if (x(r, c) > x(best, c)) best = r;
    }
    argmax[static_cast<std::size_t>(c)] = best;
    out(0, c) = x(best, c);
  }
  return out;
}

Matrix max_pool_backward(const Matrix& d_pooled, const std::vector<Eigen::Index>& argmax, Eigen::Index rows) {
  Matrix d = Matrix::Zero(rows, d_pooled.cols());
  for (Eigen::Index c = 0; c < d_pooled.cols(); ++c) d(argmax[static_cast<std::size_t>(c)], c) = d_pooled(0, c);
  return d;
}

Matrix to_matrix(const PointCloud& p) {
  Matrix m(static_cast<Eigen::Index>(p.size()), 3);
  for (std::size_t i = 0; i < p.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = p[i].x;
    m(static_cast<Eigen::Index>(i), 1) = p[i].y;
    m(static_cast<Eigen::Index>(i), 2) = p[i].z;
  }
  return m;
}

PointCloud to_cloud(const Matrix& m) {
  std::vector<Vec3> pts(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) pts[static_cast<std::size_t>(i)] = {m(i, 0), m(i, 1), m(i, 2)};
  return PointCloud(std::move(pts));
}

void visit_layer(MlpLayer& layer, const std::string& name, const TensorVisitor& fn) {
  fn(name + ".weight", std::span<double>(layer.weights.data(), static_cast<std::size_t>(layer.weights.size())));
  fn(name + ".bias", std::span<double>(layer.bias.data(), static_cast<std::size_t>(layer.bias.size())));
}

bool all_finite(const MlpLayer& layer) { return layer.weights.allFinite() && layer.bias.allFinite(); }

}  // namespace sct::nn
