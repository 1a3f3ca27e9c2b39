// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include "sct/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "sct/cat.hpp"
#include "sct/error.hpp"

namespace sct::ingest {
namespace {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::vector<std::string_view> tokenize(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Splits into physical lines, strips '#' comments, drops blank lines.
std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view line = text.substr(pos, end - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = tokenize(line);
    if (!tokens.empty()) out.push_back({number, std::move(tokens)});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

std::size_t physical_line_count(std::string_view text) {
  if (text.empty()) return 1;
  const auto newlines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  return text.back() == '\n' ? newlines + 1 : newlines + 2;
}

std::optional<double> to_real(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::size_t> to_index(std::string_view tok) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

double real_or_throw(std::string_view tok, std::size_t line) {
  if (auto v = to_real(tok)) return *v;
  throw ParseError(ErrorCode::NonNumericToken, line, "expected a number, found '" + std::string(tok) + "'");
}

std::size_t index_or_throw(std::string_view tok, std::size_t line, ErrorCode code) {
  if (auto v = to_index(tok)) return *v;
  throw ParseError(code, line, "expected a non-negative integer, found '" + std::string(tok) + "'");
}

std::string format_real(double v, int digits) {
  char buf[64];
  if (digits <= 0) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  }
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, ptr);
}

}  // namespace

TriMesh parse_off(std::string_view text) {
  const auto lines = content_lines(text);
  const std::size_t eof_line = physical_line_count(text);
  std::size_t cursor = 0;
  if (lines.empty()) throw ParseError(ErrorCode::TruncatedFile, eof_line, "empty OFF file");

  // Header: optional OFF keyword, possibly fused with the counts.
  std::vector<std::string_view> counts;
  std::size_t header_line = lines[0].number;
  std::string_view first = lines[0].tokens[0];
  if (first.substr(0, 3) == "OFF") {
    first.remove_prefix(3);
    if (!first.empty()) counts.push_back(first);
    counts.insert(counts.end(), lines[0].tokens.begin() + 1, lines[0].tokens.end());
    cursor = 1;
    if (counts.empty()) {
      if (cursor >= lines.size()) throw ParseError(ErrorCode::TruncatedFile, eof_line, "missing counts line");
      counts = lines[cursor].tokens;
      header_line = lines[cursor].number;
      ++cursor;
    }
  } else {
    counts = lines[0].tokens;
    cursor = 1;
  }
  if (counts.size() < 2 || counts.size() > 3) {
    throw ParseError(ErrorCode::MalformedHeader, header_line, "expected 'V F E' counts");
  }
  std::array<std::size_t, 3> vfe{0, 0, 0};
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const auto v = to_index(counts[k]);
    if (!v) throw ParseError(ErrorCode::MalformedHeader, header_line, "bad count '" + std::string(counts[k]) + "'");
    vfe[k] = *v;
  }

  TriMesh mesh;
  mesh.vertices.reserve(vfe[0]);
  for (std::size_t i = 0; i < vfe[0]; ++i, ++cursor) {
    if (cursor >= lines.size()) {
      throw ParseError(ErrorCode::TruncatedFile, eof_line,
                       "expected " + std::to_string(vfe[0]) + " vertices, found " + std::to_string(i));
    }
    const Line& l = lines[cursor];
    if (l.tokens.size() < 3) throw ParseError(ErrorCode::TruncatedFile, l.number, "vertex needs 3 coordinates");
    mesh.vertices.push_back(
        {real_or_throw(l.tokens[0], l.number), real_or_throw(l.tokens[1], l.number), real_or_throw(l.tokens[2], l.number)});
  }
  for (std::size_t f = 0; f < vfe[1]; ++f, ++cursor) {
    if (cursor >= lines.size()) {
      throw ParseError(ErrorCode::TruncatedFile, eof_line,
                       "expected " + std::to_string(vfe[1]) + " faces, found " + std::to_string(f));
    }
    const Line& l = lines[cursor];
    const std::size_t k = index_or_throw(l.tokens[0], l.number, ErrorCode::NonNumericToken);
    if (k < 3) throw ParseError(ErrorCode::InvalidCount, l.number, "face needs at least 3 vertices");
    if (l.tokens.size() < k + 1) throw ParseError(ErrorCode::TruncatedFile, l.number, "face lists fewer indices than declared");
    std::vector<std::size_t> idx(k);
    for (std::size_t j = 0; j < k; ++j) {
      idx[j] = index_or_throw(l.tokens[j + 1], l.number, ErrorCode::NonNumericToken);
      if (idx[j] >= vfe[0]) {
        throw ParseError(ErrorCode::IndexOutOfRange, l.number,
                         "vertex index " + std::to_string(idx[j]) + " >= vertex count " + std::to_string(vfe[0]));
      }
    }
    for (std::size_t j = 1; j + 1 < k; ++j) mesh.faces.push_back({idx[0], idx[j], idx[j + 1]});
  }
  return mesh;
}

std::string write_off(const TriMesh& mesh) {
  std::string out = "OFF\n" + std::to_string(mesh.vertices.size()) + " " + std::to_string(mesh.faces.size()) + " 0\n";
  for (const Vec3& v : mesh.vertices) {
    out += format_real(v.x, 0) + " " + format_real(v.y, 0) + " " + format_real(v.z, 0) + "\n";
  }
  for (const Face& f : mesh.faces) {
    out += "3 " + std::to_string(f[0]) + " " + std::to_string(f[1]) + " " + std::to_string(f[2]) + "\n";
  }
  return out;
}

PointCloud parse_xyz(std::string_view text) {
  std::vector<Vec3> pts;
  for (const Line& l : content_lines(text)) {
    for (std::size_t k = 0; k < std::min<std::size_t>(3, l.tokens.size()); ++k) real_or_throw(l.tokens[k], l.number);
    // Non-numeric tokens are reported before a short row.
    if (l.tokens.size() < 3) throw ParseError(ErrorCode::TruncatedFile, l.number, "row needs 3 columns");
    pts.push_back(
        {real_or_throw(l.tokens[0], l.number), real_or_throw(l.tokens[1], l.number), real_or_throw(l.tokens[2], l.number)});
  }
  if (pts.empty()) throw ParseError(ErrorCode::TruncatedFile, physical_line_count(text), "no points");
  return PointCloud(std::move(pts));
}

std::string write_xyz(const PointCloud& cloud, const XyzFormat& format) {
  std::string out;
  out.reserve(cloud.size() * 48);
  auto put = [&](double v) {
    if (format.quantum > 0.0) v = std::nearbyint(v / format.quantum) * format.quantum;
    if (v == 0.0) v = 0.0;  // folds -0
    return format_real(v, format.digits);
  };
  for (const Vec3& p : cloud) out += put(p.x) + " " + put(p.y) + " " + put(p.z) + "\n";
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) { return 0.5 * norm(cross(b - a, c - a)); }

PointCloud sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidCount, "sample count must be positive");
  std::vector<double> cumulative;
  cumulative.reserve(mesh.faces.size());
  double total = 0.0;
  for (const Face& f : mesh.faces) {
    total += triangle_area(mesh.vertices.at(f[0]), mesh.vertices.at(f[1]), mesh.vertices.at(f[2]));
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroAreaMesh, "mesh has no surface area to sample");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const Face& f = mesh.faces[static_cast<std::size_t>(it - cumulative.begin())];
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    const double wa = 1.0 - r1, wb = r1 * (1.0 - r2), wc = r1 * r2;
    out.push_back(wa * mesh.vertices[f[0]] + wb * mesh.vertices[f[1]] + wc * mesh.vertices[f[2]]);
  }
  return PointCloud(std::move(out));
}

PointCloud normalize_unit_sphere(const PointCloud& p) {
  const Vec3 b = cat::barycenter(p);
  double r = 0.0;
  for (const Vec3& v : p) r = std::max(r, norm(v - b));
  if (!(r >= 1e-12)) throw Error(ErrorCode::AllPointsCoincident, "cannot normalize a cloud with zero radius");
  std::vector<Vec3> out;
  out.reserve(p.size());
  for (const Vec3& v : p) out.push_back((v - b) / r);
  return PointCloud(std::move(out));
}

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Box: return "box";
    case ShapeKind::Cylinder: return "cylinder";
    case ShapeKind::Ellipsoid: return "ellipsoid";
  }
  return "unknown";
}

TriMesh make_box(const Vec3& e) {
  TriMesh m;
  const Vec3 h = 0.5 * e;
  for (int i = 0; i < 8; ++i) {
    m.vertices.push_back({(i & 1) ? h.x : -h.x, (i & 2) ? h.y : -h.y, (i & 4) ? h.z : -h.z});
  }
  // Two triangles per face, outward winding.
  const std::array<std::array<std::size_t, 4>, 6> quads = {{
      {0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}}};
  for (const auto& q : quads) {
    m.faces.push_back({q[0], q[1], q[2]});
    m.faces.push_back({q[0], q[2], q[3]});
  }
  return m;
}

TriMesh make_cylinder(double radius, double height, std::size_t segments) {
  TriMesh m;
  const double h = 0.5 * height;
  for (std::size_t s = 0; s < segments; ++s) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(segments);
    m.vertices.push_back({radius * std::cos(a), radius * std::sin(a), -h});
    m.vertices.push_back({radius * std::cos(a), radius * std::sin(a), h});
  }
  const std::size_t bottom = m.vertices.size();
  m.vertices.push_back({0, 0, -h});
  const std::size_t top = m.vertices.size();
  m.vertices.push_back({0, 0, h});
  for (std::size_t s = 0; s < segments; ++s) {
    const std::size_t b0 = 2 * s, t0 = 2 * s + 1;
    const std::size_t b1 = 2 * ((s + 1) % segments), t1 = b1 + 1;
    m.faces.push_back({b0, b1, t1});
    m.faces.push_back({b0, t1, t0});
    m.faces.push_back({bottom, b1, b0});
    m.faces.push_back({top, t0, t1});
  }
  return m;
}

TriMesh make_ellipsoid(const Vec3& radii, std::size_t stacks, std::size_t slices) {
  TriMesh m;
  m.vertices.push_back({0, 0, -radii.z});
  for (std::size_t i = 1; i < stacks; ++i) {
    const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(stacks);
    for (std::size_t j = 0; j < slices; ++j) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(slices);
      m.vertices.push_back({radii.x * std::sin(theta) * std::cos(phi), radii.y * std::sin(theta) * std::sin(phi),
                            -radii.z * std::cos(theta)});
    }
  }
  const std::size_t north = m.vertices.size();
  m.vertices.push_back({0, 0, radii.z});
  auto ring = [&](std::size_t i, std::size_t j) { return 1 + (i - 1) * slices + (j % slices); };
  for (std::size_t j = 0; j < slices; ++j) m.faces.push_back({0, ring(1, j + 1), ring(1, j)});
  for (std::size_t i = 1; i + 1 < stacks; ++i) {
    for (std::size_t j = 0; j < slices; ++j) {
      m.faces.push_back({ring(i, j), ring(i, j + 1), ring(i + 1, j + 1)});
      m.faces.push_back({ring(i, j), ring(i + 1, j + 1), ring(i + 1, j)});
    }
  }
  for (std::size_t j = 0; j < slices; ++j) m.faces.push_back({north, ring(stacks - 1, j), ring(stacks - 1, j + 1)});
  return m;
}

TriMesh random_shape(ShapeKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  switch (kind) {
    case ShapeKind::Box: {
      const double x = in(0.5, 1.5), y = in(0.5, 1.5), z = in(0.5, 1.5);
      return make_box({x, y, z});
    }
    case ShapeKind::Cylinder: {
      const double r = in(0.3, 0.7), h = in(0.8, 2.0);
      return make_cylinder(r, h);
    }
    case ShapeKind::Ellipsoid: {
      const double x = in(0.5, 1.5), y = in(0.5, 1.5), z = in(0.5, 1.5);
      return make_ellipsoid({x, y, z});
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown shape kind");
}

}  // namespace sct::ingest
