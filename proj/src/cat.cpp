// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include "sct/cat.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sct/error.hpp"

namespace sct::cat {
namespace {

// Fixed work split for the OpenMP kernels. Partial results are combined in
// block order, so output is independent of the number of threads.
constexpr std::size_t kBlock = 4096;

constexpr double kCoincident = 1e-12;

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

void require_frame_size(const PointCloud& p) {
  if (p.size() < 3) {
    throw Error(ErrorCode::InvalidCount, "contour frame needs at least 3 points, got " + std::to_string(p.size()));
  }
}

// Shared tail of both extremal searches: given all distances and the two
// extrema, pick the lowest-index winner within the tie window and list the rest.
Extremal resolve_extremes(const PointCloud& p, std::span<const double> dist, double dmax,
                          const std::vector<std::size_t>& far_candidates,
                          const std::vector<std::size_t>& near_candidates) {
  if (!(dmax >= kCoincident)) {
    throw Error(ErrorCode::AllPointsCoincident, "all points lie within 1e-12 of the barycenter");
  }
  Extremal out;
  out.farthest_index = far_candidates.front();
  out.closest_index = near_candidates.front();
  for (std::size_t k = 1; k < far_candidates.size(); ++k) {
    out.ties.push_back({Extreme::Farthest, out.farthest_index, far_candidates[k]});
  }
  for (std::size_t k = 1; k < near_candidates.size(); ++k) {
    out.ties.push_back({Extreme::Closest, out.closest_index, near_candidates[k]});
  }
  out.farthest = p[out.farthest_index];
  out.closest = p[out.closest_index];
  out.farthest_distance = dist[out.farthest_index];
  out.closest_distance = dist[out.closest_index];
  return out;
}

struct Axes {
  Vec3 beta_f, beta_n, beta_c;
  Mat3 basis;
};

bool try_axes(const Vec3& b, const Vec3& pf, const Vec3& pc, double collinear_tol, Axes& out) {
  const Vec3 beta_f = pf - b;
  const Vec3 beta_c_raw = pc - b;
  const Vec3 beta_n = cross(beta_c_raw, beta_f);
  const double nf = norm(beta_f);
  const double nn = norm(beta_n);
  if (nn <= collinear_tol * nf * norm(beta_c_raw)) return false;
  const Vec3 beta_c = cross(beta_f, beta_n);
  out.beta_f = beta_f;
  out.beta_n = beta_n;
  out.beta_c = beta_c;
  out.basis = Mat3::from_cols(beta_f / nf, beta_n / nn, beta_c / norm(beta_c));
  return true;
}

ContourFrame build_frame(const PointCloud& p, const Vec3& b, Extremal ext, const Options& options,
                         const std::vector<double>& dist) {
  ContourFrame f;
  f.barycenter = b;
  f.farthest = ext.farthest;
  f.farthest_index = ext.farthest_index;
  f.ties = std::move(ext.ties);

  Axes axes;
  if (try_axes(b, ext.farthest, ext.closest, options.collinear_tol, axes)) {
    f.closest = ext.closest;
    f.closest_index = ext.closest_index;
  } else {
    // Walk outwards through the remaining points by (distance, index).
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) { return dist[a] < dist[c]; });
    bool found = false;
    std::size_t rank = 0;
    for (std::size_t idx : order) {
      if (idx == ext.closest_index) continue;
      ++rank;
      if (try_axes(b, ext.farthest, p[idx], options.collinear_tol, axes)) {
        f.closest = p[idx];
        f.closest_index = idx;
        f.closest_rank = rank;
        found = true;
        break;
      }
    }
    if (!found) {
      throw Error(ErrorCode::DegenerateFrame, "all points are collinear with the barycenter and farthest point");
    }
  }
  f.beta_f = axes.beta_f;
  f.beta_n = axes.beta_n;
  f.beta_c = axes.beta_c;
  f.basis = axes.basis;
  return f;
}

CatResult finish(PointCloud transformed, ContourFrame frame) {
  CatResult r{std::move(transformed), std::move(frame), false, {}};
  if (r.frame.closest_rank > 0) {
    r.degenerate = true;
    r.degenerate_reason = "closest point collinear with farthest axis; used candidate of rank " +
                          std::to_string(r.frame.closest_rank) + " (index " +
                          std::to_string(r.frame.closest_index) + ")";
  }
  return r;
}

std::vector<double> distances_serial(const PointCloud& p, const Vec3& b) {
  std::vector<double> d(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) d[i] = norm(p[i] - b);
  return d;
}

}  // namespace

// --- serial reference -------------------------------------------------------

namespace serial {

Vec3 barycenter(const PointCloud& p) {
  Vec3 sum;
  for (const Vec3& v : p) sum += v;
  return sum / static_cast<double>(p.size());
}

Extremal extremal_points(const PointCloud& p, double tie_tol) {
  require_frame_size(p);
  const Vec3 b = barycenter(p);
  const std::vector<double> d = distances_serial(p, b);
  double dmax = d[0], dmin = d[0];
  for (double v : d) {
    dmax = std::max(dmax, v);
    dmin = std::min(dmin, v);
  }
  const double window = tie_tol * dmax;
  std::vector<std::size_t> far, near;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] >= dmax - window) far.push_back(i);
    if (d[i] <= dmin + window) near.push_back(i);
  }
  return resolve_extremes(p, d, dmax, far, near);
}

ContourFrame contour_frame(const PointCloud& p, const Options& options) {
  Extremal ext = serial::extremal_points(p, options.tie_tol);
  const Vec3 b = serial::barycenter(p);
  return build_frame(p, b, std::move(ext), options, distances_serial(p, b));
}

CatResult cat_transform(const PointCloud& p, const Options& options) {
  ContourFrame frame = serial::contour_frame(p, options);
  const Mat3 bt = transpose(frame.basis);
  std::vector<Vec3> out;
  out.reserve(p.size());
  for (const Vec3& v : p) out.push_back(bt * (v - frame.barycenter));
  return finish(PointCloud(std::move(out)), std::move(frame));
}

}  // namespace serial

// --- OpenMP kernels ---------------------------------------------------------

Vec3 barycenter(const PointCloud& p) {
  const std::size_t n = p.size();
  const std::size_t nb = block_count(n);
  const auto pts = p.points();
  std::vector<Vec3> partial(nb);
#pragma omp parallel for schedule(static) if (nb > 1)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nb); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    Vec3 s;
    for (std::size_t i = lo; i < hi; ++i) s += pts[i];
    partial[blk] = s;
  }
  Vec3 sum;
  for (const Vec3& s : partial) sum += s;
  return sum / static_cast<double>(n);
}

namespace {

struct ExtremalScan {
  Vec3 b;
  std::vector<double> dist;
  Extremal ext;
};

ExtremalScan scan_extremes(const PointCloud& p, double tie_tol) {
  require_frame_size(p);
  const std::size_t n = p.size();
  const std::size_t nb = block_count(n);
  const auto pts = p.points();
  ExtremalScan s;
  s.b = barycenter(p);
  s.dist.resize(n);
  std::vector<double> bmax(nb), bmin(nb);
  const Vec3 b = s.b;
  double* d = s.dist.data();
#pragma omp parallel for schedule(static) if (nb > 1)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nb); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double hi_d = 0.0, lo_d = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = norm(pts[i] - b);
      d[i] = v;
      if (i == lo || v > hi_d) hi_d = v;
      if (i == lo || v < lo_d) lo_d = v;
    }
    bmax[blk] = hi_d;
    bmin[blk] = lo_d;
  }
  const double dmax = *std::max_element(bmax.begin(), bmax.end());
  const double dmin = *std::min_element(bmin.begin(), bmin.end());
  const double window = tie_tol * dmax;

  std::vector<std::vector<std::size_t>> bfar(nb), bnear(nb);
#pragma omp parallel for schedule(static) if (nb > 1)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nb); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    if (bmax[blk] >= dmax - window) {
      for (std::size_t i = lo; i < hi; ++i)
        if (d[i] >= dmax - window) bfar[blk].push_back(i);
    }
    if (bmin[blk] <= dmin + window) {
      for (std::size_t i = lo; i < hi; ++i)
        if (d[i] <= dmin + window) bnear[blk].push_back(i);
    }
  }
  std::vector<std::size_t> far, near;
  for (std::size_t blk = 0; blk < nb; ++blk) {
    far.insert(far.end(), bfar[blk].begin(), bfar[blk].end());
    near.insert(near.end(), bnear[blk].begin(), bnear[blk].end());
  }
  s.ext = resolve_extremes(p, s.dist, dmax, far, near);
  return s;
}

}  // namespace

Extremal extremal_points(const PointCloud& p, double tie_tol) { return scan_extremes(p, tie_tol).ext; }

ContourFrame contour_frame(const PointCloud& p, const Options& options) {
  ExtremalScan s = scan_extremes(p, options.tie_tol);
  return build_frame(p, s.b, std::move(s.ext), options, s.dist);
}

PointCloud express_in_frame(const PointCloud& p, const ContourFrame& frame) {
  const Mat3 bt = transpose(frame.basis);
  const Vec3 b = frame.barycenter;
  const auto n = static_cast<std::ptrdiff_t>(p.size());
  const auto src = p.points();
  std::vector<Vec3> out(p.size());
#pragma omp parallel for schedule(static) if (n > static_cast<std::ptrdiff_t>(kBlock))
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = bt * (src[i] - b);
  return PointCloud(std::move(out));
}

CatResult cat_transform(const PointCloud& p, const Options& options) {
  ContourFrame frame = cat::contour_frame(p, options);
  PointCloud out = express_in_frame(p, frame);
  return finish(std::move(out), std::move(frame));
}

}  // namespace sct::cat
