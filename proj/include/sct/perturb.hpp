// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded perturbations of a point cloud: rigid motions, Gaussian jitter,
// density subsampling and half-space partial crops. Every generator is a pure
// function of its inputs and never reorders the points it keeps.

#ifndef SCT_PERTURB_HPP
#define SCT_PERTURB_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sct/geom.hpp"

namespace sct::perturb {

enum class Kind { Rotation, Translation, Noise, Subsample, Partial };

std::string_view to_string(Kind kind);
Kind kind_from_string(std::string_view name);

struct PerturbSpec {
  Kind kind = Kind::Noise;
  double level = 0.0;  // noise std, point count, keep ratio or translation scale
  std::uint64_t seed = 0;
};

/// Cloud plus the source index of every retained point.
struct Perturbed {
  PointCloud cloud;
  std::vector<std::size_t> source_index;
};

/// Haar rotation plus a translation uniform in [−s, s]³.
RigidMotion random_rigid(std::uint64_t seed, double translation_scale);

PointCloud add_noise(const PointCloud& p, double stddev, std::uint64_t seed);

/// Uniform selection of n of the N points without replacement; requires 3 ≤ n ≤ N.
Perturbed subsample(const PointCloud& p, std::size_t n, std::uint64_t seed);

/// Keeps the ceil(keep_ratio · N) points with the largest projection onto a
/// random unit direction; requires 0 < keep_ratio ≤ 1.
Perturbed crop_partial(const PointCloud& p, double keep_ratio, std::uint64_t seed);

/// Number of points crop_partial keeps.
std::size_t partial_count(std::size_t n, double keep_ratio);

/// Dispatches on spec.kind. Rotation applies a pure Haar rotation;
/// Translation applies random_rigid with scale = level.
Perturbed apply(const PointCloud& p, const PerturbSpec& spec);

}  // namespace sct::perturb

#endif  // SCT_PERTURB_HPP
