// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include "sct/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sct/error.hpp"

namespace sct::perturb {
namespace {

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

Perturbed gather(const PointCloud& p, std::vector<std::size_t> idx) {
  std::vector<Vec3> pts;
  pts.reserve(idx.size());
  for (std::size_t i : idx) pts.push_back(p[i]);
  return {PointCloud(std::move(pts)), std::move(idx)};
}

}  // namespace

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::Rotation: return "rotation";
    case Kind::Translation: return "translation";
    case Kind::Noise: return "noise";
    case Kind::Subsample: return "subsample";
    case Kind::Partial: return "partial";
  }
  return "unknown";
}

Kind kind_from_string(std::string_view name) {
  for (Kind k : {Kind::Rotation, Kind::Translation, Kind::Noise, Kind::Subsample, Kind::Partial}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::ConfigError, "unknown perturbation kind '" + std::string(name) + "'");
}

RigidMotion random_rigid(std::uint64_t seed, double translation_scale) {
  if (!(translation_scale >= 0.0)) throw Error(ErrorCode::ConfigError, "translation scale must be >= 0");
  std::mt19937_64 rng(seed);
  RigidMotion m;
  m.r = random_rotation(rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double tx = u(rng), ty = u(rng), tz = u(rng);
  m.t = Vec3{tx, ty, tz} * translation_scale;
  return m;
}

PointCloud add_noise(const PointCloud& p, double stddev, std::uint64_t seed) {
  if (!(stddev >= 0.0)) throw Error(ErrorCode::ConfigError, "noise std must be >= 0");
  if (stddev == 0.0) return p;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, stddev);
  std::vector<Vec3> out;
  out.reserve(p.size());
  for (const Vec3& v : p) {
    const double dx = g(rng), dy = g(rng), dz = g(rng);
    out.push_back(v + Vec3{dx, dy, dz});
  }
  return PointCloud(std::move(out));
}

Perturbed subsample(const PointCloud& p, std::size_t n, std::uint64_t seed) {
  if (n < 3 || n > p.size()) {
    throw Error(ErrorCode::InvalidCount,
                "subsample count " + std::to_string(n) + " outside [3, " + std::to_string(p.size()) + "]");
  }
  auto idx = iota_indices(p.size());
  if (n == p.size()) return {p, std::move(idx)};
  // Partial Fisher-Yates: the first n slots become a uniform n-subset.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return gather(p, std::move(idx));
}

std::size_t partial_count(std::size_t n, double keep_ratio) {
  // The small slack keeps e.g. 0.7 · 1000 at 700 despite binary rounding.
  const double raw = keep_ratio * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<std::size_t>(k, 1, n);
}

Perturbed crop_partial(const PointCloud& p, double keep_ratio, std::uint64_t seed) {
  if (!(keep_ratio > 0.0 && keep_ratio <= 1.0)) throw Error(ErrorCode::ConfigError, "keep ratio must be in (0, 1]");
  auto idx = iota_indices(p.size());
  if (keep_ratio == 1.0) return {p, std::move(idx)};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 d;
  do {
    const double x = g(rng), y = g(rng), z = g(rng);
    d = {x, y, z};
  } while (norm(d) < 1e-12);
  d = d / norm(d);

  const std::size_t keep = partial_count(p.size(), keep_ratio);
  std::vector<double> proj(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) proj[i] = dot(p[i], d);
  // Rank by projection, ties by index, then restore original order.
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return proj[a] > proj[b]; });
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  return gather(p, std::move(idx));
}

Perturbed apply(const PointCloud& p, const PerturbSpec& spec) {
  switch (spec.kind) {
    case Kind::Rotation: {
      RigidMotion m{random_rotation(spec.seed), {}};
      return {apply_rigid(p, m), iota_indices(p.size())};
    }
    case Kind::Translation:
      return {apply_rigid(p, random_rigid(spec.seed, spec.level)), iota_indices(p.size())};
    case Kind::Noise:
      return {add_noise(p, spec.level, spec.seed), iota_indices(p.size())};
    case Kind::Subsample: {
      if (!(spec.level >= 0.0) || spec.level != std::floor(spec.level)) {
        throw Error(ErrorCode::InvalidCount, "subsample level must be a whole point count");
      }
      return subsample(p, static_cast<std::size_t>(spec.level), spec.seed);
    }
    case Kind::Partial:
      return crop_partial(p, spec.level, spec.seed);
  }
  throw Error(ErrorCode::ConfigError, "unknown perturbation kind");
}

}  // namespace sct::perturb
