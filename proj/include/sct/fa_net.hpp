// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

// Frame alignment (FA) on top of a CAT-normalized cloud P'.
//
//   contour encoding   f_c  = relu(L1(P'))                    N × H1
//                      P'_c = softmax over points of L2(f_c)  N × 3
//                      P'_a = P' + P'_c
//   frame regression   f_global = maxpool(encoder(P'_a))      C
//                      q        = decoder(f_global)           4 (raw)
//   alignment          P''      = R(q / ‖q‖) · P'
//
// Because the rotation is applied to P' (not P'_a), P'' is always an exact
// rotation of P'. Gradients flow through the quaternion normalization.

#ifndef SCT_FA_NET_HPP
#define SCT_FA_NET_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "sct/geom.hpp"
#include "sct/nn.hpp"

namespace sct::fa {

using nn::Matrix;
using nn::MlpLayer;

struct FaShape {
  Eigen::Index h1 = 64;  // contour encoder width
  Eigen::Index h2 = 64;  // first shared encoder width
  Eigen::Index c = 128;  // global descriptor width
  Eigen::Index decoder_hidden = 64;
};

struct FaParams {
  MlpLayer contour_enc1;           // 3 → H1
  MlpLayer contour_enc2;           // H1 → 3
  std::vector<MlpLayer> encoder;   // 3 → … → C, shared per point
  std::vector<MlpLayer> decoder;   // C → … → 4, last layer linear

  /// Throws ConfigError if layer sizes do not chain or the decoder does not end in a linear 4-way layer.
  void validate() const;
  FaParams zeros_like() const;
  void visit(const nn::TensorVisitor& fn);
  std::size_t parameter_count() const;
  FaParams& operator+=(const FaParams& o);
  FaParams& operator*=(double s);
};

/// Random init; the decoder's last bias is (1, 0, 0, 0) and its weights are
/// scaled down so training starts near the identity alignment.
FaParams init_fa_params(const FaShape& shape, std::uint64_t seed);

/// All weights and biases zero, with the given layer shapes.
FaParams zero_fa_params(const FaShape& shape);

/// Every activation switched to none (used by the linear-path gradient check).
FaParams linearized(FaParams params);

PointCloud contour_encode(const PointCloud& p_prime, const FaParams& params);
Quaternion regress_frame(const PointCloud& p_a, const FaParams& params);
std::vector<double> global_descriptor(const PointCloud& p_a, const FaParams& params);
PointCloud fa_transform(const PointCloud& p_prime, const FaParams& params);

/// Everything the backward pass needs from one forward evaluation.
struct FaForward {
  Matrix p_prime;
  nn::DenseCache enc1, enc2;
  Matrix softmax;  // P'_c
  Matrix p_a;
  std::vector<nn::DenseCache> encoder;
  std::vector<Eigen::Index> argmax;
  Matrix f_global;
  std::vector<nn::DenseCache> decoder;
  Quaternion q_raw;
  Mat3 rotation;
  Matrix p_out;  // P''
};

FaForward fa_forward(const Matrix& p_prime, const FaParams& params);

/// Accumulates d(loss)/d(params) into grad given d(loss)/dP''.
void fa_backward(const FaForward& fwd, const FaParams& params, const Matrix& d_out, FaParams& grad);

/// Gradient of the rotation entries with respect to the raw quaternion,
/// including the normalization q / ‖q‖.
std::array<double, 4> rotation_backward(const Quaternion& q_raw, const Mat3& d_rotation);

/// Probe objective for gradient checking: Σ_i Σ_k w_k · P''_ik² with
/// w = (1, 2, 3). The unweighted sum of squares is rotation invariant and
/// therefore has zero gradient with respect to every FA parameter.
double probe_loss(const Matrix& p_out);
Matrix probe_loss_grad(const Matrix& p_out);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t compared = 0;
  /// Parameters whose ±eps evaluation switched a max-pool argmax.
  std::size_t skipped = 0;
};

/// Central finite differences of probe_loss against fa_backward over every
/// parameter. Relative error is |a − n| / max(|a|, |n|, 1e-6).
GradCheckResult grad_check(const FaParams& params, const PointCloud& cloud, double eps);

}  // namespace sct::fa

#endif  // SCT_FA_NET_HPP
