// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

// Core 3D types: vectors, matrices, rotations, quaternions, rigid motions and
// point clouds. Everything is double precision and value-semantic.

#ifndef SCT_GEOM_HPP
#define SCT_GEOM_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace sct {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double max_abs(const Vec3& a) {
  return std::fmax(std::fabs(a.x), std::fmax(std::fabs(a.y), std::fabs(a.z)));
}
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// 3x3 matrix, row-major storage.
struct Mat3 {
  std::array<double, 9> m{};

  static constexpr Mat3 zero() { return {}; }
  static constexpr Mat3 identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
  static constexpr Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    return {{r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z}};
  }
  static constexpr Mat3 from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    return {{c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z}};
  }

  constexpr double operator()(std::size_t r, std::size_t c) const { return m[3 * r + c]; }
  constexpr double& operator()(std::size_t r, std::size_t c) { return m[3 * r + c]; }

  constexpr Vec3 row(std::size_t r) const { return {m[3 * r], m[3 * r + 1], m[3 * r + 2]}; }
  constexpr Vec3 col(std::size_t c) const { return {m[c], m[3 + c], m[6 + c]}; }

  friend constexpr bool operator==(const Mat3&, const Mat3&) = default;
};

constexpr Mat3 transpose(const Mat3& a) {
  return {{a.m[0], a.m[3], a.m[6], a.m[1], a.m[4], a.m[7], a.m[2], a.m[5], a.m[8]}};
}

constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 out;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      out(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c) + a(r, 2) * b(2, c);
    }
  }
  return out;
}

constexpr Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {a.m[0] * v.x + a.m[1] * v.y + a.m[2] * v.z, a.m[3] * v.x + a.m[4] * v.y + a.m[5] * v.z,
          a.m[6] * v.x + a.m[7] * v.y + a.m[8] * v.z};
}

constexpr Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 out;
  for (std::size_t i = 0; i < 9; ++i) out.m[i] = a.m[i] - b.m[i];
  return out;
}

constexpr double determinant(const Mat3& a) {
  return a.m[0] * (a.m[4] * a.m[8] - a.m[5] * a.m[7]) - a.m[1] * (a.m[3] * a.m[8] - a.m[5] * a.m[6]) +
         a.m[2] * (a.m[3] * a.m[7] - a.m[4] * a.m[6]);
}

/// Adjugate of M = [a b c] (columns): rows are (b×c)ᵀ, (c×a)ᵀ, (a×b)ᵀ.
constexpr Mat3 adjugate(const Mat3& a) {
  const Vec3 c0 = a.col(0), c1 = a.col(1), c2 = a.col(2);
  return Mat3::from_rows(cross(c1, c2), cross(c2, c0), cross(c0, c1));
}

/// Infinity norm over entries (largest absolute entry).
double max_abs(const Mat3& a);

/// Skew-symmetric [x×] with [x×]y = x × y.
constexpr Mat3 cross_matrix(const Vec3& x) { return {{0.0, -x.z, x.y, x.z, 0.0, -x.x, -x.y, x.x, 0.0}}; }

struct Quaternion {
  double q0 = 1.0;  // scalar part
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;

  double norm() const { return std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3); }
  Quaternion operator-() const { return {-q0, -q1, -q2, -q3}; }

  /// Normalized copy; throws InvalidQuaternion on zero or non-finite norm.
  Quaternion unit() const;

  friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

/// Element of SO(3). Only constructible through checked factories.
class Rotation {
 public:
  Rotation() = default;

  /// Accepts m when ‖mᵀm − I‖∞ and |det m − 1| are both within tol.
  static Rotation from_matrix(const Mat3& m, double tol = 1e-9);
  static Rotation about_axis(const Vec3& axis, double angle);

  const Mat3& matrix() const { return m_; }
  Rotation inverse() const { return Rotation(transpose(m_)); }

  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }

  friend bool operator==(const Rotation&, const Rotation&) = default;

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  friend Rotation quat_to_rotation(const Quaternion& q);

  Mat3 m_ = Mat3::identity();
};

/// Rotation matrix of the unit quaternion q/‖q‖ (scalar-first convention).
Rotation quat_to_rotation(const Quaternion& q);

/// Haar-uniform rotation from a normalized 4D Gaussian quaternion.
Rotation random_rotation(std::uint64_t seed);
Rotation random_rotation(std::mt19937_64& rng);

/// x ↦ r·x + t.
struct RigidMotion {
  Rotation r;
  Vec3 t;

  static RigidMotion identity() { return {}; }
  Vec3 operator()(const Vec3& p) const { return r * p + t; }
};

/// Motion equivalent to applying `first`, then `second`.
RigidMotion compose(const RigidMotion& second, const RigidMotion& first);

/// Ordered, non-empty set of finite 3D points.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Vec3> points);
  PointCloud(std::initializer_list<Vec3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }
  Vec3& operator[](std::size_t i) { return points_[i]; }

  std::span<const Vec3> points() const { return points_; }
  std::span<Vec3> points() { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::vector<Vec3> points_;
};

PointCloud apply_rigid(const PointCloud& p, const RigidMotion& m);

namespace serial {
PointCloud apply_rigid(const PointCloud& p, const RigidMotion& m);
}  // namespace serial

/// max_i ‖a_i − b_i‖∞; clouds must have equal size.
double max_pointwise_deviation(const PointCloud& a, const PointCloud& b);

}  // namespace sct

#endif  // SCT_GEOM_HPP
