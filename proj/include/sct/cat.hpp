// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

// Contour-aware transformation (CAT).
//
// A cloud is re-expressed in a frame built from three of its own points: the
// barycenter p_b, the point farthest from it (p_f) and the point closest to
// it (p_c). With β_f = p_f − p_b and β_c = p_c − p_b the axes are
//
//   X' = β_f,  Y' = β_c × β_f,  Z' = X' × Y'   (each normalized)
//
// and the output is Bᵀ(p_i − p_b) with B = [X' Y' Z']. Rotating or
// translating the input rotates the frame with it, so the output is unchanged
// as long as p_f and p_c are unambiguous. Near-ties are reported instead of
// resolved silently.
//
// The default entry points run OpenMP kernels with a fixed block decomposition
// (results do not depend on the thread count). The `serial` namespace keeps a
// plain single-loop reference used by tests and the benchmark.

#ifndef SCT_CAT_HPP
#define SCT_CAT_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "sct/geom.hpp"

namespace sct::cat {

struct Options {
  /// Candidates within tie_tol · max-distance of an extremum count as tied.
  double tie_tol = 1e-9;
  /// β_f and β_c are collinear when ‖β_c × β_f‖ ≤ collinear_tol · ‖β_f‖ · ‖β_c‖.
  double collinear_tol = 1e-10;
};

enum class Extreme { Farthest, Closest };

struct Tie {
  Extreme kind;
  std::size_t winner;
  std::size_t other;

  friend bool operator==(const Tie&, const Tie&) = default;
};

struct Extremal {
  std::size_t farthest_index = 0;
  std::size_t closest_index = 0;
  Vec3 farthest;
  Vec3 closest;
  double farthest_distance = 0.0;
  double closest_distance = 0.0;
  std::vector<Tie> ties;
};

struct ContourFrame {
  Vec3 barycenter;
  Vec3 farthest;
  Vec3 closest;
  std::size_t farthest_index = 0;
  std::size_t closest_index = 0;
  /// 0 when the true closest point was usable; k when the k-th next closest
  /// point replaced it because it was collinear with β_f.
  std::size_t closest_rank = 0;
  Vec3 beta_f;
  Vec3 beta_n;
  Vec3 beta_c;  // β_f × β_n
  Mat3 basis;   // columns X', Y', Z'
  std::vector<Tie> ties;
};

struct CatResult {
  PointCloud transformed;
  ContourFrame frame;
  bool degenerate = false;
  std::string degenerate_reason;
};

Vec3 barycenter(const PointCloud& p);

/// Throws InvalidCount when N < 3 and AllPointsCoincident when every point
/// sits within 1e-12 of the barycenter.
Extremal extremal_points(const PointCloud& p, double tie_tol = Options{}.tie_tol);

/// Throws DegenerateFrame when every candidate for p_c is collinear with β_f.
ContourFrame contour_frame(const PointCloud& p, const Options& options = {});

CatResult cat_transform(const PointCloud& p, const Options& options = {});

/// Applies Bᵀ(p_i − p_b) for an existing frame.
PointCloud express_in_frame(const PointCloud& p, const ContourFrame& frame);

namespace serial {
Vec3 barycenter(const PointCloud& p);
Extremal extremal_points(const PointCloud& p, double tie_tol = Options{}.tie_tol);
ContourFrame contour_frame(const PointCloud& p, const Options& options = {});
CatResult cat_transform(const PointCloud& p, const Options& options = {});
}  // namespace serial

}  // namespace sct::cat

#endif  // SCT_CAT_HPP
