// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <omp.h>

#include <algorithm>
#include <numeric>

#include "sct/cat.hpp"
#include "test_util.hpp"

namespace sct::cat {
namespace {

using testing::gaussian_cloud;
using testing::throws_code;

const PointCloud kTriangle{{0, 0, 0}, {2, 0, 0}, {0, 1, 0}};

PointCloud unit_cube_corners() {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  return PointCloud(std::move(pts));
}

// Brute-force extremal oracle: full scan with strict comparisons.
std::pair<std::size_t, std::size_t> brute_extremes(const PointCloud& p) {
  Vec3 b;
  for (const Vec3& v : p) b += v;
  b = b / double(p.size());
  std::size_t far = 0, near = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (norm(p[i] - b) > norm(p[far] - b)) far = i;
    if (norm(p[i] - b) < norm(p[near] - b)) near = i;
  }
  return {far, near};
}

TEST(Barycenter, Examples) {
  EXPECT_EQ(barycenter(PointCloud{{1, 2, 3}}), (Vec3{1, 2, 3}));
  EXPECT_EQ(barycenter(PointCloud{{1, 0, 0}, {-1, 0, 0}}), (Vec3{0, 0, 0}));
  const Vec3 b = barycenter(kTriangle);
  EXPECT_DOUBLE_EQ(b.x, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(b.y, 1.0 / 3.0);
  EXPECT_EQ(b.z, 0.0);
}

TEST(ExtremalPoints, Triangle) {
  const Extremal e = extremal_points(kTriangle);
  EXPECT_EQ(e.farthest_index, 1u);
  EXPECT_EQ(e.closest_index, 0u);
  EXPECT_EQ(e.farthest, (Vec3{2, 0, 0}));
  EXPECT_EQ(e.closest, (Vec3{0, 0, 0}));
  EXPECT_NEAR(e.farthest_distance, std::sqrt(17.0) / 3.0, 1e-15);
  EXPECT_NEAR(e.closest_distance, std::sqrt(5.0) / 3.0, 1e-15);
  EXPECT_TRUE(e.ties.empty());
}

TEST(ExtremalPoints, CubeCornersTieToIndexZero) {
  const Extremal e = extremal_points(unit_cube_corners());
  EXPECT_EQ(e.farthest_index, 0u);
  EXPECT_EQ(e.closest_index, 0u);
  ASSERT_EQ(e.ties.size(), 14u);
  for (std::size_t k = 0; k < 7; ++k) {
    EXPECT_EQ(e.ties[k], (Tie{Extreme::Farthest, 0, k + 1}));
    EXPECT_EQ(e.ties[7 + k], (Tie{Extreme::Closest, 0, k + 1}));
  }
}

TEST(ExtremalPoints, PermutationInvariantWithoutTies) {
  const std::vector<Vec3> base = {{0.3, -1.2, 0.5}, {2.1, 0.4, -0.7}, {-0.9, 0.8, 1.6}, {0.1, 0.2, 0.05}, {-1.4, -0.6, -0.2}};
  const auto [far0, near0] = brute_extremes(PointCloud(base));
  std::vector<std::size_t> perm(base.size());
  std::iota(perm.begin(), perm.end(), 0);
  int count = 0;
  do {
    std::vector<Vec3> pts;
    for (std::size_t i : perm) pts.push_back(base[i]);
    const Extremal e = extremal_points(PointCloud(pts));
    EXPECT_EQ(e.farthest, base[far0]);
    EXPECT_EQ(e.closest, base[near0]);
    EXPECT_TRUE(e.ties.empty());
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(count, 120);
}

TEST(ExtremalPoints, Errors) {
  EXPECT_TRUE(throws_code([] { extremal_points(PointCloud{{0, 0, 0}, {1, 0, 0}}); }, ErrorCode::InvalidCount));
  EXPECT_TRUE(throws_code([] { extremal_points(PointCloud{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}); },
                          ErrorCode::AllPointsCoincident));
}

TEST(ContourFrame, TriangleBasis) {
  const ContourFrame f = contour_frame(kTriangle);
  const double s17 = std::sqrt(17.0);
  const Mat3 expected = Mat3::from_cols({4 / s17, -1 / s17, 0}, {0, 0, 1}, {-1 / s17, -4 / s17, 0});
  EXPECT_LE(max_abs(f.basis - expected), 1e-15);
  EXPECT_EQ(f.closest_rank, 0u);
  EXPECT_NEAR(determinant(f.basis), 1.0, 1e-15);
}

TEST(ContourFrame, RotatedCloudRotatesBasis) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const PointCloud p = gaussian_cloud(64, s);
    const RigidMotion m = testing::random_motion(1000 + s, 10.0);
    const ContourFrame f = contour_frame(p);
    const ContourFrame g = contour_frame(apply_rigid(p, m));
    EXPECT_LE(max_abs(g.basis - m.r.matrix() * f.basis), 1e-9);
  }
}

TEST(ContourFrame, InvariantsOnRandomClouds) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const PointCloud p = gaussian_cloud(3 + s % 40, s);
    const ContourFrame f = contour_frame(p);
    EXPECT_LE(max_abs(transpose(f.basis) * f.basis - Mat3::identity()), 1e-12);
    EXPECT_NEAR(determinant(f.basis), 1.0, 1e-12);
    EXPECT_EQ(f.beta_f, f.farthest - f.barycenter);
    EXPECT_EQ(f.beta_n, cross(f.closest - f.barycenter, f.beta_f));
    EXPECT_EQ(f.beta_c, cross(f.beta_f, f.beta_n));
    EXPECT_LE(max_abs(cross(f.basis.col(0), f.basis.col(1)) - f.basis.col(2)), 1e-12);
  }
}

TEST(ContourFrame, CollinearClosestFallsBackToNextClosest) {
  // Closest point (index 1) sits on the line through the barycenter and the farthest point.
  const PointCloud p{{4, 0, 0}, {-2, 0, 0}, {-1, 2, 0}, {-1, -2, 0}};
  const CatResult r = cat_transform(p);
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(r.degenerate_reason.empty());
  EXPECT_EQ(r.frame.farthest_index, 0u);
  EXPECT_EQ(r.frame.closest_rank, 1u);
  EXPECT_EQ(r.frame.closest_index, 2u);
  EXPECT_LE(max_abs(transpose(r.frame.basis) * r.frame.basis - Mat3::identity()), 1e-12);
}

TEST(ContourFrame, AllCollinearIsDegenerate) {
  const PointCloud line{{0, 0, 0}, {1, 1, 1}, {3, 3, 3}, {-2, -2, -2}};
  EXPECT_TRUE(throws_code([&] { contour_frame(line); }, ErrorCode::DegenerateFrame));
  EXPECT_TRUE(throws_code([&] { serial::contour_frame(line); }, ErrorCode::DegenerateFrame));
}

TEST(CatTransform, TriangleImages) {
  const CatResult r = cat_transform(kTriangle);
  const double s17 = std::sqrt(17.0);
  EXPECT_LE(max_abs(r.transformed[1] - Vec3{s17 / 3, 0, 0}), 1e-15);
  EXPECT_LE(max_abs(r.transformed[0] - Vec3{-7, 0, 6} / (3 * s17)), 1e-15);
  EXPECT_NEAR(norm(r.transformed[0]), std::sqrt(5.0) / 3, 1e-15);
  EXPECT_FALSE(r.degenerate);
}

TEST(CatTransform, CanonicalPositionsOfExtremalPoints) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const PointCloud p = gaussian_cloud(3 + s % 50, 500 + s);
    const CatResult r = cat_transform(p);
    ASSERT_EQ(r.transformed.size(), p.size());
    const Vec3 f = r.transformed[r.frame.farthest_index];
    const Vec3 c = r.transformed[r.frame.closest_index];
    EXPECT_GT(f.x, 0.0);
    EXPECT_LE(std::fabs(f.y), 1e-9);
    EXPECT_LE(std::fabs(f.z), 1e-9);
    EXPECT_LE(std::fabs(c.y), 1e-9);
    EXPECT_GE(c.z, -1e-9);
    EXPECT_LE(max_abs(barycenter(r.transformed)), 1e-12);
  }
}

TEST(CatTransform, RigidInvariance) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const PointCloud p = gaussian_cloud(128, 900 + s);
    const CatResult base = cat_transform(p);
    ASSERT_TRUE(base.frame.ties.empty());
    for (std::uint64_t k = 0; k < 10; ++k) {
      const CatResult moved = cat_transform(apply_rigid(p, testing::random_motion(s * 100 + k, 10.0)));
      EXPECT_LE(max_pointwise_deviation(moved.transformed, base.transformed), 1e-9);
    }
  }
}

TEST(CatTransform, PreservesPairwiseDistances) {
  const PointCloud p = gaussian_cloud(64, 77);
  const PointCloud q = cat_transform(p).transformed;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      EXPECT_NEAR(norm(q[i] - q[j]), norm(p[i] - p[j]), 1e-12);
    }
  }
}

TEST(CatTransform, ReportsTiesButStillProducesFrame) {
  const CatResult r = cat_transform(unit_cube_corners());
  EXPECT_FALSE(r.frame.ties.empty());
  EXPECT_LE(max_abs(transpose(r.frame.basis) * r.frame.basis - Mat3::identity()), 1e-12);
}

TEST(CatTransform, TieToleranceIsRelative) {
  // Two candidates for farthest differ by 1e-7 relative.
  const PointCloud p{{10, 0, 0}, {-10 * (1 - 1e-7), 0.0, 0}, {0, 1, 0}, {0, -1, 0.5}};
  EXPECT_TRUE(extremal_points(p, 1e-9).ties.empty());
  EXPECT_FALSE(extremal_points(p, 1e-6).ties.empty());
}

TEST(Serial, AgreesWithParallel) {
  for (std::size_t n : {3u, 100u, 4096u, 4097u, 30000u}) {
    const PointCloud p = gaussian_cloud(n, n);
    const CatResult par = cat_transform(p);
    const CatResult ser = serial::cat_transform(p);
    EXPECT_EQ(par.frame.farthest_index, ser.frame.farthest_index);
    EXPECT_EQ(par.frame.closest_index, ser.frame.closest_index);
    EXPECT_LE(max_pointwise_deviation(par.transformed, ser.transformed), 1e-12);
    if (n <= 4096) EXPECT_EQ(par.transformed, ser.transformed);
  }
}

TEST(Serial, ParallelResultIndependentOfThreadCount) {
  const PointCloud p = gaussian_cloud(100000, 3);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const CatResult one = cat_transform(p);
  omp_set_num_threads(4);
  const CatResult four = cat_transform(p);
  omp_set_num_threads(saved);
  EXPECT_EQ(one.transformed, four.transformed);
  EXPECT_EQ(one.frame.basis, four.frame.basis);
}

}  // namespace
}  // namespace sct::cat
