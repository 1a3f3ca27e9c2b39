// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include "sct/fa_net.hpp"

#include <algorithm>
#include <cmath>

#include "sct/error.hpp"

namespace sct::fa {
namespace {

using nn::Activation;

void check_chain(const std::vector<MlpLayer>& layers, Eigen::Index in, const char* what) {
  for (const MlpLayer& l : layers) {
    if (l.in_dim() != in || l.bias.size() != l.out_dim()) {
      throw Error(ErrorCode::ConfigError, std::string(what) + " layer sizes do not chain");
    }
    in = l.out_dim();
  }
}

// Softmax over rows (points), independently per column.
Matrix softmax_over_points(const Matrix& z) {
  Matrix s(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double m = z.col(c).maxCoeff();
    double total = 0.0;
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      s(r, c) = std::exp(z(r, c) - m);
      total += s(r, c);
    }
    s.col(c) /= total;
  }
  return s;
}

Matrix softmax_over_points_backward(const Matrix& s, const Matrix& d_s) {
  Matrix d_z(s.rows(), s.cols());
  for (Eigen::Index c = 0; c < s.cols(); ++c) {
    const double inner = s.col(c).dot(d_s.col(c));
    d_z.col(c) = s.col(c).cwiseProduct(d_s.col(c).array().matrix() - Eigen::VectorXd::Constant(s.rows(), inner));
  }
  return d_z;
}

Matrix apply_rotation_rows(const Matrix& p, const Mat3& r) {
  Eigen::Matrix3d rm;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) rm(a, b) = r(a, b);
  return p * rm.transpose();
}

template <typename Fn>
void for_all_layers(FaParams& p, Fn&& fn) {
  fn(p.contour_enc1, std::string("fa.contour_enc1"));
  fn(p.contour_enc2, std::string("fa.contour_enc2"));
  for (std::size_t i = 0; i < p.encoder.size(); ++i) fn(p.encoder[i], "fa.encoder." + std::to_string(i));
  for (std::size_t i = 0; i < p.decoder.size(); ++i) fn(p.decoder[i], "fa.decoder." + std::to_string(i));
}

}  // namespace

void FaParams::validate() const {
  if (contour_enc1.in_dim() != 3 || contour_enc2.in_dim() != contour_enc1.out_dim() || contour_enc2.out_dim() != 3) {
    throw Error(ErrorCode::ConfigError, "contour encoder must map 3 → H1 → 3");
  }
  if (encoder.empty() || decoder.empty()) throw Error(ErrorCode::ConfigError, "encoder and decoder need layers");
  check_chain(encoder, 3, "encoder");
  check_chain(decoder, encoder.back().out_dim(), "decoder");
  if (decoder.back().out_dim() != 4 || decoder.back().activation != Activation::None) {
    throw Error(ErrorCode::ConfigError, "decoder must end in a linear layer with 4 outputs");
  }
}

FaParams FaParams::zeros_like() const {
  FaParams z;
  z.contour_enc1 = contour_enc1.zeros_like();
  z.contour_enc2 = contour_enc2.zeros_like();
  for (const auto& l : encoder) z.encoder.push_back(l.zeros_like());
  for (const auto& l : decoder) z.decoder.push_back(l.zeros_like());
  return z;
}

void FaParams::visit(const nn::TensorVisitor& fn) {
  for_all_layers(*this, [&](MlpLayer& l, const std::string& name) { nn::visit_layer(l, name, fn); });
}

std::size_t FaParams::parameter_count() const {
  std::size_t n = 0;
  const_cast<FaParams*>(this)->visit([&](const std::string&, std::span<double> v) { n += v.size(); });
  return n;
}

FaParams& FaParams::operator+=(const FaParams& o) {
  contour_enc1.weights += o.contour_enc1.weights;
  contour_enc1.bias += o.contour_enc1.bias;
  contour_enc2.weights += o.contour_enc2.weights;
  contour_enc2.bias += o.contour_enc2.bias;
  for (std::size_t i = 0; i < encoder.size(); ++i) {
    encoder[i].weights += o.encoder[i].weights;
    encoder[i].bias += o.encoder[i].bias;
  }
  for (std::size_t i = 0; i < decoder.size(); ++i) {
    decoder[i].weights += o.decoder[i].weights;
    decoder[i].bias += o.decoder[i].bias;
  }
  return *this;
}

FaParams& FaParams::operator*=(double s) {
  visit([&](const std::string&, std::span<double> v) {
    for (double& x : v) x *= s;
  });
  return *this;
}

FaParams init_fa_params(const FaShape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double he = std::sqrt(2.0);
  FaParams p;
  p.contour_enc1 = MlpLayer::random(3, shape.h1, Activation::Relu, he, rng);
  p.contour_enc2 = MlpLayer::random(shape.h1, 3, Activation::None, 1.0, rng);
  p.encoder.push_back(MlpLayer::random(3, shape.h2, Activation::Relu, he, rng));
  p.encoder.push_back(MlpLayer::random(shape.h2, shape.c, Activation::Relu, he, rng));
  p.decoder.push_back(MlpLayer::random(shape.c, shape.decoder_hidden, Activation::Relu, he, rng));
  p.decoder.push_back(MlpLayer::random(shape.decoder_hidden, 4, Activation::None, 0.1, rng));
  p.decoder.back().bias << 1.0, 0.0, 0.0, 0.0;
  return p;
}

FaParams zero_fa_params(const FaShape& shape) {
  FaParams p;
  p.contour_enc1 = MlpLayer::zeros(3, shape.h1, Activation::Relu);
  p.contour_enc2 = MlpLayer::zeros(shape.h1, 3, Activation::None);
  p.encoder.push_back(MlpLayer::zeros(3, shape.h2, Activation::Relu));
  p.encoder.push_back(MlpLayer::zeros(shape.h2, shape.c, Activation::Relu));
  p.decoder.push_back(MlpLayer::zeros(shape.c, shape.decoder_hidden, Activation::Relu));
  p.decoder.push_back(MlpLayer::zeros(shape.decoder_hidden, 4, Activation::None));
  return p;
}

FaParams linearized(FaParams params) {
  for_all_layers(params, [](MlpLayer& l, const std::string&) { l.activation = Activation::None; });
  return params;
}

FaForward fa_forward(const Matrix& p_prime, const FaParams& params) {
  params.validate();
  if (p_prime.cols() != 3 || p_prime.rows() < 1) throw Error(ErrorCode::ConfigError, "FA input must be N × 3");
  FaForward f;
  f.p_prime = p_prime;

  const Matrix fc = nn::dense_forward(params.contour_enc1, p_prime, &f.enc1);
  const Matrix z = nn::dense_forward(params.contour_enc2, fc, &f.enc2);
  f.softmax = softmax_over_points(z);
  f.p_a = p_prime + f.softmax;

  Matrix h = f.p_a;
  f.encoder.resize(params.encoder.size());
  for (std::size_t i = 0; i < params.encoder.size(); ++i) h = nn::dense_forward(params.encoder[i], h, &f.encoder[i]);
  f.f_global = nn::max_pool(h, f.argmax);

  Matrix g = f.f_global;
  f.decoder.resize(params.decoder.size());
  for (std::size_t i = 0; i < params.decoder.size(); ++i) g = nn::dense_forward(params.decoder[i], g, &f.decoder[i]);
  f.q_raw = {g(0, 0), g(0, 1), g(0, 2), g(0, 3)};
  f.rotation = quat_to_rotation(f.q_raw).matrix();
  f.p_out = apply_rotation_rows(p_prime, f.rotation);
  return f;
}

std::array<double, 4> rotation_backward(const Quaternion& q_raw, const Mat3& d) {
  const double n = q_raw.norm();
  const Quaternion u = q_raw.unit();
  const double q0 = u.q0, q1 = u.q1, q2 = u.q2, q3 = u.q3;
  // ∂R/∂q̂ contracted with dL/dR, entry by entry.
  const double g0 = d(0, 1) * (-2 * q3) + d(0, 2) * (2 * q2) + d(1, 0) * (2 * q3) + d(1, 2) * (-2 * q1) +
                    d(2, 0) * (-2 * q2) + d(2, 1) * (2 * q1);
  const double g1 = d(0, 1) * (2 * q2) + d(0, 2) * (2 * q3) + d(1, 0) * (2 * q2) + d(1, 1) * (-4 * q1) +
                    d(1, 2) * (-2 * q0) + d(2, 0) * (2 * q3) + d(2, 1) * (2 * q0) + d(2, 2) * (-4 * q1);
  const double g2 = d(0, 0) * (-4 * q2) + d(0, 1) * (2 * q1) + d(0, 2) * (2 * q0) + d(1, 0) * (2 * q1) +
                    d(1, 2) * (2 * q3) + d(2, 0) * (-2 * q0) + d(2, 1) * (2 * q3) + d(2, 2) * (-4 * q2);
  const double g3 = d(0, 0) * (-4 * q3) + d(0, 1) * (-2 * q0) + d(0, 2) * (2 * q1) + d(1, 0) * (2 * q0) +
                    d(1, 1) * (-4 * q3) + d(1, 2) * (2 * q2) + d(2, 0) * (2 * q1) + d(2, 1) * (2 * q2);
  const double radial = q0 * g0 + q1 * g1 + q2 * g2 + q3 * g3;
  return {(g0 - q0 * radial) / n, (g1 - q1 * radial) / n, (g2 - q2 * radial) / n, (g3 - q3 * radial) / n};
}

void fa_backward(const FaForward& f, const FaParams& params, const Matrix& d_out, FaParams& grad) {
  // P'' = P' Rᵀ row-wise, so dL/dR = d_outᵀ P'.
  const Matrix d_r = d_out.transpose() * f.p_prime;
  Mat3 d_rot;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) d_rot(a, b) = d_r(a, b);
  const auto dq = rotation_backward(f.q_raw, d_rot);

  Matrix g(1, 4);
  g << dq[0], dq[1], dq[2], dq[3];
  for (std::size_t i = params.decoder.size(); i-- > 0;) {
    g = nn::dense_backward(params.decoder[i], f.decoder[i], g, grad.decoder[i]);
  }
  Matrix h = nn::max_pool_backward(g, f.argmax, f.p_prime.rows());
  for (std::size_t i = params.encoder.size(); i-- > 0;) {
    h = nn::dense_backward(params.encoder[i], f.encoder[i], h, grad.encoder[i]);
  }
  // P'_a = P' + P'_c; P' is an input, so only the softmax branch carries on.
  const Matrix d_z = softmax_over_points_backward(f.softmax, h);
  const Matrix d_fc = nn::dense_backward(params.contour_enc2, f.enc2, d_z, grad.contour_enc2);
  nn::dense_backward(params.contour_enc1, f.enc1, d_fc, grad.contour_enc1);
}

PointCloud contour_encode(const PointCloud& p_prime, const FaParams& params) {
  params.validate();
  const Matrix x = nn::to_matrix(p_prime);
  const Matrix fc = nn::dense_forward(params.contour_enc1, x);
  const Matrix z = nn::dense_forward(params.contour_enc2, fc);
  return nn::to_cloud(x + softmax_over_points(z));
}

std::vector<double> global_descriptor(const PointCloud& p_a, const FaParams& params) {
  params.validate();
  Matrix h = nn::to_matrix(p_a);
  for (const auto& l : params.encoder) h = nn::dense_forward(l, h);
  std::vector<Eigen::Index> argmax;
  const Matrix pooled = nn::max_pool(h, argmax);
  return {pooled.data(), pooled.data() + pooled.size()};
}

Quaternion regress_frame(const PointCloud& p_a, const FaParams& params) {
  const auto f = global_descriptor(p_a, params);
  Matrix g = Eigen::Map<const Matrix>(f.data(), 1, static_cast<Eigen::Index>(f.size()));
  for (const auto& l : params.decoder) g = nn::dense_forward(l, g);
  return {g(0, 0), g(0, 1), g(0, 2), g(0, 3)};
}

PointCloud fa_transform(const PointCloud& p_prime, const FaParams& params) {
  const Quaternion q = regress_frame(contour_encode(p_prime, params), params);
  return apply_rigid(p_prime, RigidMotion{quat_to_rotation(q), {}});
}

double probe_loss(const Matrix& p_out) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p_out.rows(); ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) s += static_cast<double>(k + 1) * p_out(i, k) * p_out(i, k);
  }
  return s;
}

Matrix probe_loss_grad(const Matrix& p_out) {
  Matrix g(p_out.rows(), 3);
  for (Eigen::Index i = 0; i < p_out.rows(); ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) g(i, k) = 2.0 * static_cast<double>(k + 1) * p_out(i, k);
  }
  return g;
}

GradCheckResult grad_check(const FaParams& params, const PointCloud& cloud, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-4)) throw Error(ErrorCode::ConfigError, "eps must lie in [1e-7, 1e-4]");
  const Matrix x = nn::to_matrix(cloud);
  const FaForward base = fa_forward(x, params);
  FaParams analytic = params.zeros_like();
  fa_backward(base, params, probe_loss_grad(base.p_out), analytic);

  std::vector<double> flat_analytic;
  analytic.visit([&](const std::string&, std::span<double> v) { flat_analytic.insert(flat_analytic.end(), v.begin(), v.end()); });

  GradCheckResult result;
  FaParams probe = params;
  std::size_t k = 0;
  probe.visit([&](const std::string&, std::span<double> values) {
    for (double& v : values) {
      const double saved = v;
      v = saved + eps;
      const FaForward plus = fa_forward(x, probe);
      v = saved - eps;
      const FaForward minus = fa_forward(x, probe);
      v = saved;
      const double a = flat_analytic[k++];
      if (plus.argmax != base.argmax || minus.argmax != base.argmax) {
        ++result.skipped;
        continue;
      }
      const double numeric = (probe_loss(plus.p_out) - probe_loss(minus.p_out)) / (2.0 * eps);
      const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-6});
      result.max_relative_error = std::max(result.max_relative_error, std::fabs(a - numeric) / denom);
      ++result.compared;
    }
  });
  return result;
}

}  // namespace sct::fa
