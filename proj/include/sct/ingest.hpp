// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

// Mesh and point-cloud input: ASCII OFF and XYZ parsing, area-weighted
// surface sampling, unit-sphere normalization and a small generator of
// synthetic shapes (boxes, cylinders, ellipsoids) used for toy training.

#ifndef SCT_INGEST_HPP
#define SCT_INGEST_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sct/geom.hpp"

namespace sct::ingest {

using Face = std::array<std::size_t, 3>;

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  friend bool operator==(const TriMesh&, const TriMesh&) = default;
};

/// ASCII OFF. The "OFF" keyword is optional and may share a line with the
/// counts ("OFF 8 6 0" or "OFF8 6 0"). Polygons are fan-triangulated.
/// Errors (ParseError): MalformedHeader, NonNumericToken, IndexOutOfRange,
/// TruncatedFile, InvalidCount.
TriMesh parse_off(std::string_view text);

/// Canonical OFF: shortest round-trip decimal for every coordinate, so
/// parse_off(write_off(m)) == m bit for bit.
std::string write_off(const TriMesh& mesh);

/// Whitespace-separated rows with at least three numeric columns; extra
/// columns are ignored and '#' starts a comment.
PointCloud parse_xyz(std::string_view text);

struct XyzFormat {
  /// Significant digits; 0 selects the shortest round-trip representation.
  int digits = 0;
  /// When positive, values are first rounded to the nearest multiple of this
  /// step, so small coordinates carry no more absolute precision than large ones.
  double quantum = 0.0;
};

std::string write_xyz(const PointCloud& cloud, const XyzFormat& format = {});

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// n points, triangles picked proportionally to area, uniform inside each.
PointCloud sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed);

/// Centers on the barycenter and scales the largest radius to 1.
PointCloud normalize_unit_sphere(const PointCloud& p);

enum class ShapeKind { Box = 0, Cylinder = 1, Ellipsoid = 2 };
inline constexpr std::array<ShapeKind, 3> kShapeKinds = {ShapeKind::Box, ShapeKind::Cylinder, ShapeKind::Ellipsoid};
std::string_view to_string(ShapeKind kind);

TriMesh make_box(const Vec3& extents);
TriMesh make_cylinder(double radius, double height, std::size_t segments = 32);
TriMesh make_ellipsoid(const Vec3& radii, std::size_t stacks = 16, std::size_t slices = 32);

/// Axis-aligned shape of the given kind with seeded dimensions:
/// box extents in [0.5, 1.5]³, cylinder radius in [0.3, 0.7] and height in
/// [0.8, 2.0], ellipsoid radii in [0.5, 1.5]³.
TriMesh random_shape(ShapeKind kind, std::mt19937_64& rng);

}  // namespace sct::ingest

#endif  // SCT_INGEST_HPP
