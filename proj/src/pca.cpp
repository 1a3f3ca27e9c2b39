// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include "sct/pca.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "sct/cat.hpp"
#include "sct/error.hpp"

namespace sct::pca {
namespace {

constexpr std::size_t kBlock = 4096;

Mat3 outer_sum_to_cov(const std::array<double, 6>& s, double n) {
  // s = xx, xy, xz, yy, yz, zz
  return {{s[0] / n, s[1] / n, s[2] / n, s[1] / n, s[3] / n, s[4] / n, s[2] / n, s[4] / n, s[5] / n}};
}

void accumulate(std::array<double, 6>& s, const Vec3& d) {
  s[0] += d.x * d.x;
  s[1] += d.x * d.y;
  s[2] += d.x * d.z;
  s[3] += d.y * d.y;
  s[4] += d.y * d.z;
  s[5] += d.z * d.z;
}

void apply_sign_rule(Vec3& v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < 3; ++k) {
    if (std::fabs(v[k]) > std::fabs(v[best])) best = k;
  }
  if (v[best] < 0.0) v = -v;
}

}  // namespace

namespace serial {

Mat3 covariance(const PointCloud& p) {
  const Vec3 mean = cat::serial::barycenter(p);
  std::array<double, 6> s{};
  for (const Vec3& v : p) accumulate(s, v - mean);
  return outer_sum_to_cov(s, static_cast<double>(p.size()));
}

}  // namespace serial

Mat3 covariance(const PointCloud& p) {
  const Vec3 mean = cat::barycenter(p);
  const std::size_t n = p.size();
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  const auto pts = p.points();
  std::vector<std::array<double, 6>> partial(nb);
#pragma omp parallel for schedule(static) if (nb > 1)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nb); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    std::array<double, 6> s{};
    for (std::size_t i = lo; i < hi; ++i) accumulate(s, pts[i] - mean);
    partial[blk] = s;
  }
  std::array<double, 6> total{};
  for (const auto& s : partial) {
    for (std::size_t k = 0; k < 6; ++k) total[k] += s[k];
  }
  return outer_sum_to_cov(total, static_cast<double>(n));
}

PcaResult pca_normalize(const PointCloud& p) {
  if (p.size() < 4) throw Error(ErrorCode::InvalidCount, "PCA normalization needs at least 4 points");
  const Mat3 c = covariance(p);
  for (double v : c.m) {
    if (!std::isfinite(v)) throw Error(ErrorCode::EigenFailure, "covariance has non-finite entries");
  }

  Eigen::Matrix3d cm;
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) cm(r, k) = c(r, k);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cm);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigen decomposition did not converge");

  PcaFrame frame;
  frame.mean = cat::barycenter(p);
  std::array<Vec3, 3> axes;
  for (int k = 0; k < 3; ++k) {
    const int src = 2 - k;  // Eigen sorts ascending
    frame.eigenvalues[k] = solver.eigenvalues()(src);
    const auto v = solver.eigenvectors().col(src);
    axes[k] = {v(0), v(1), v(2)};
    apply_sign_rule(axes[k]);
  }
  if (determinant(Mat3::from_cols(axes[0], axes[1], axes[2])) < 0.0) axes[2] = -axes[2];
  frame.basis = Mat3::from_cols(axes[0], axes[1], axes[2]);

  const double lmax = std::max(std::fabs(frame.eigenvalues[0]), 1e-300);
  frame.near_degenerate = (frame.eigenvalues[0] - frame.eigenvalues[1] < 1e-8 * lmax) ||
                          (frame.eigenvalues[1] - frame.eigenvalues[2] < 1e-8 * lmax);

  const Mat3 bt = transpose(frame.basis);
  std::vector<Vec3> out(p.size());
  const auto src = p.points();
  const auto n = static_cast<std::ptrdiff_t>(p.size());
#pragma omp parallel for schedule(static) if (n > static_cast<std::ptrdiff_t>(kBlock))
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = bt * (src[i] - frame.mean);
  return {PointCloud(std::move(out)), frame};
}

}  // namespace sct::pca
