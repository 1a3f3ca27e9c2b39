// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

// PCA pose normalization. Used as the rotation-sensitive baseline next to CAT:
// the eigenbasis is only fixed up to per-axis sign, and whichever sign rule
// is chosen flips discontinuously under some rotations.

#ifndef SCT_PCA_HPP
#define SCT_PCA_HPP

#include <array>

#include "sct/geom.hpp"

namespace sct::pca {

struct PcaFrame {
  Vec3 mean;
  std::array<double, 3> eigenvalues{};  // descending
  Mat3 basis;                            // eigenvector columns after the sign rule
  bool near_degenerate = false;          // adjacent eigenvalue gap < 1e-8 · λ_max
};

struct PcaResult {
  PointCloud transformed;
  PcaFrame frame;
};

/// (1/N) Σ (p_i − mean)(p_i − mean)ᵀ.
Mat3 covariance(const PointCloud& p);

/// Each eigenvector is flipped so its largest-magnitude component is positive
/// (first axis wins on equal magnitude); the third column is negated if that
/// leaves a reflection. Output is basisᵀ(p_i − mean).
PcaResult pca_normalize(const PointCloud& p);

namespace serial {
Mat3 covariance(const PointCloud& p);
}  // namespace serial

}  // namespace sct::pca

#endif  // SCT_PCA_HPP
