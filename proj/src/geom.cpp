// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include "sct/geom.hpp"

#include <algorithm>
#include <string>

#include "sct/error.hpp"

namespace sct {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidQuaternion: return "InvalidQuaternion";
    case ErrorCode::AllPointsCoincident: return "AllPointsCoincident";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::TrainingDiverged: return "TrainingDiverged";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::NonNumericToken: return "NonNumericToken";
    case ErrorCode::ZeroAreaMesh: return "ZeroAreaMesh";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

double max_abs(const Mat3& a) {
  double out = 0.0;
  for (double v : a.m) out = std::max(out, std::fabs(v));
  return out;
}

Quaternion Quaternion::unit() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::InvalidQuaternion, "quaternion norm must be positive and finite");
  }
  return {q0 / n, q1 / n, q2 / n, q3 / n};
}

Rotation Rotation::from_matrix(const Mat3& m, double tol) {
  const double ortho = max_abs(transpose(m) * m - Mat3::identity());
  const double det = determinant(m);
  if (!(ortho <= tol) || !(std::fabs(det - 1.0) <= tol)) {
    throw Error(ErrorCode::ConfigError, "matrix is not a proper rotation (orthogonality error " +
                                            std::to_string(ortho) + ", det " + std::to_string(det) + ")");
  }
  return Rotation(m);
}

Rotation Rotation::about_axis(const Vec3& axis, double angle) {
  const Vec3 u = axis / norm(axis);
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  return quat_to_rotation({std::cos(h), u.x * s, u.y * s, u.z * s});
}

Rotation quat_to_rotation(const Quaternion& raw) {
  const Quaternion q = raw.unit();
  const double q0 = q.q0, q1 = q.q1, q2 = q.q2, q3 = q.q3;
  Mat3 m{{1.0 - 2.0 * q2 * q2 - 2.0 * q3 * q3, 2.0 * q1 * q2 - 2.0 * q3 * q0, 2.0 * q1 * q3 + 2.0 * q2 * q0,
          2.0 * q1 * q2 + 2.0 * q3 * q0, 1.0 - 2.0 * q1 * q1 - 2.0 * q3 * q3, 2.0 * q2 * q3 - 2.0 * q1 * q0,
          2.0 * q1 * q3 - 2.0 * q2 * q0, 2.0 * q2 * q3 + 2.0 * q1 * q0, 1.0 - 2.0 * q1 * q1 - 2.0 * q2 * q2}};
  return Rotation(m);
}

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Quaternion q;
  do {
    q = {gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
  } while (q.norm() < 1e-12);
  return quat_to_rotation(q);
}

Rotation random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_rotation(rng);
}

RigidMotion compose(const RigidMotion& second, const RigidMotion& first) {
  return {second.r * first.r, second.r * first.t + second.t};
}

PointCloud::PointCloud(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) {
    throw Error(ErrorCode::InvalidCount, "point cloud must contain at least one point");
  }
  for (const Vec3& p : points_) {
    if (!is_finite(p)) throw Error(ErrorCode::ConfigError, "point cloud contains a non-finite coordinate");
  }
}

PointCloud::PointCloud(std::initializer_list<Vec3> points) : PointCloud(std::vector<Vec3>(points)) {}

namespace serial {

PointCloud apply_rigid(const PointCloud& p, const RigidMotion& m) {
  std::vector<Vec3> out;
  out.reserve(p.size());
  for (const Vec3& v : p) out.push_back(m(v));
  return PointCloud(std::move(out));
}

}  // namespace serial

PointCloud apply_rigid(const PointCloud& p, const RigidMotion& m) {
  const auto n = static_cast<std::ptrdiff_t>(p.size());
  std::vector<Vec3> out(p.size());
  const auto src = p.points();
#pragma omp parallel for schedule(static) if (n > 8192)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = m(src[i]);
  return PointCloud(std::move(out));
}

double max_pointwise_deviation(const PointCloud& a, const PointCloud& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidCount, "clouds differ in size");
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, max_abs(a[i] - b[i]));
  return out;
}

}  // namespace sct
