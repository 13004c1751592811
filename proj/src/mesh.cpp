// Copyright 2026 The Recompose Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "recompose/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace recompose {

void TriMesh::validate() const {
  if (!colors.empty() && colors.size() != vertices.size())
    throw InvalidArgument("color count does not match vertex count");
  if (mask.size() != vertices.size()) throw InvalidArgument("mask length does not match vertex count");
  for (const Vec3& v : vertices)
    if (!is_finite(v)) throw InvalidArgument("non-finite vertex coordinate");
  std::vector<std::size_t> degenerate;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& t = faces[f];
    for (auto i : t)
      if (i >= vertices.size())
        throw InvalidArgument("face " + std::to_string(f) + " references vertex " + std::to_string(i) +
                              " out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) degenerate.push_back(f);
  }
  if (!degenerate.empty()) throw DegenerateFaceError(std::move(degenerate));
}

AABB bounds_of(const TriMesh& mesh) { return bounds_of(std::span<const Vec3>(mesh.vertices)); }

double triangle_area(Vec3 a, Vec3 b, Vec3 c) { return 0.5 * length(cross(b - a, c - a)); }

double surface_area(const TriMesh& mesh) {
  double total = 0;
  for (const Face& f : mesh.faces)
    total += triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
  return total;
}

Vec3 face_normal(const TriMesh& mesh, std::size_t face) {
  const Face& f = mesh.faces[face];
  const Vec3& a = mesh.vertices[f[0]];
  return normalize(cross(mesh.vertices[f[1]] - a, mesh.vertices[f[2]] - a));
}

namespace {

std::vector<std::uint64_t> sorted_edges(const TriMesh& mesh) {
  std::vector<std::uint64_t> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const Face& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      std::uint64_t a = f[k], b = f[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.push_back(a << 32 | b);
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

bool is_watertight(const TriMesh& mesh) {
  if (mesh.faces.empty()) return false;
  auto edges = sorted_edges(mesh);
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    if (j - i != 2) return false;
    i = j;
  }
  return true;
}

long euler_characteristic(const TriMesh& mesh) {
  auto edges = sorted_edges(mesh);
  long e = static_cast<long>(std::unique(edges.begin(), edges.end()) - edges.begin());
  return static_cast<long>(mesh.vertices.size()) - e + static_cast<long>(mesh.faces.size());
}

// ---------------------------------------------------------------------------
// OBJ subset
// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, std::size_t line) {
  double v = 0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, "invalid number '" + std::string(tok) + "'");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite number '" + std::string(tok) + "'");
  return v;
}

long parse_index(std::string_view tok, std::size_t line) {
  // Accept "a", "a/t", "a//n", "a/t/n"; only the position index matters.
  tok = tok.substr(0, tok.find('/'));
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
    throw ParseError(line, "invalid face index '" + std::string(tok) + "'");
  return v;
}

}  // namespace

TriMesh parse_obj(std::string_view text) {
  std::vector<Vec3> vertices;
  std::vector<Vec3> colors;
  std::vector<Face> faces;
  bool any_color = false, any_plain = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto tok = split_ws(line);
    const std::string_view kw = tok[0];
    if (kw == "v") {
      if (tok.size() != 4 && tok.size() != 7)
        throw ParseError(line_no, "vertex needs 3 coordinates or 3 coordinates plus RGB");
      vertices.push_back({parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                          parse_double(tok[3], line_no)});
      if (tok.size() == 7) {
        Vec3 c{parse_double(tok[4], line_no), parse_double(tok[5], line_no), parse_double(tok[6], line_no)};
        for (int k = 0; k < 3; ++k)
          if (c[k] < 0 || c[k] > 1) throw ParseError(line_no, "vertex color outside [0,1]");
        colors.push_back(c);
        any_color = true;
      } else {
        any_plain = true;
      }
      if (any_color && any_plain) throw ParseError(line_no, "vertex colors must be given for all vertices or none");
    } else if (kw == "f") {
      if (tok.size() != 4) throw ParseError(line_no, "only triangular faces are supported");
      Face f{};
      for (int k = 0; k < 3; ++k) {
        long idx = parse_index(tok[k + 1], line_no);
        long n = static_cast<long>(vertices.size());
        if (idx == 0) throw ParseError(line_no, "face index 0 (OBJ indices are 1-based)");
        long resolved = idx > 0 ? idx - 1 : n + idx;
        if (resolved < 0 || resolved >= n)
          throw ParseError(line_no, "face index " + std::to_string(idx) + " out of range");
        f[k] = static_cast<std::uint32_t>(resolved);
      }
      faces.push_back(f);
    } else if (kw == "vt" || kw == "vn" || kw == "o" || kw == "g" || kw == "s" || kw == "usemtl" ||
               kw == "mtllib" || kw == "l" || kw == "vp") {
      continue;
    } else {
      throw ParseError(line_no, "unsupported statement '" + std::string(kw) + "'");
    }
  }
  TriMesh mesh(std::move(vertices), std::move(faces), std::move(colors));
  mesh.validate();
  return mesh;
}

TriMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_obj(buf.str());
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

std::string format_obj(const TriMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 64 + mesh.faces.size() * 24);
  char buf[96];
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    out += "v ";
    append_double(out, v.x);
    out += ' ';
    append_double(out, v.y);
    out += ' ';
    append_double(out, v.z);
    if (mesh.has_colors()) {
      const Vec3& c = mesh.colors[i];
      std::snprintf(buf, sizeof buf, " %.6f %.6f %.6f", c.x, c.y, c.z);
      out += buf;
    }
    out += '\n';
  }
  for (const Face& f : mesh.faces) {
    std::snprintf(buf, sizeof buf, "f %u %u %u\n", f[0] + 1, f[1] + 1, f[2] + 1);
    out += buf;
  }
  return out;
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path) {
  mesh.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  std::string text = format_obj(mesh);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::pair<TriMesh, Transform3> normalize_unit_bbox(const TriMesh& mesh) {
  if (mesh.vertices.empty()) throw InvalidArgument("cannot normalize an empty mesh");
  AABB box = bounds_of(mesh);
  double side = box.longest_side();
  if (!(side > 0)) throw InvalidArgument("cannot normalize a zero-extent mesh");
  Vec3 c = box.center();
  TriMesh out = mesh;
  for (Vec3& v : out.vertices) v = (v - c) / side;
  Transform3 back = Transform3::translation(c) * Transform3::scaling(side);
  return {std::move(out), back};
}

TriMesh apply_transform(const TriMesh& mesh, const Transform3& t) {
  require_invertible(t, "apply_transform");
  TriMesh out = mesh;
  if (t == Transform3::identity()) return out;
  for (Vec3& v : out.vertices) v = t.apply_point(v);
  return out;
}

TriMesh merge_meshes(std::span<const TriMesh> parts) {
  TriMesh out;
  bool colors = !parts.empty();
  for (const TriMesh& p : parts) colors = colors && p.has_colors();
  for (const TriMesh& p : parts) {
    auto base = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), p.vertices.begin(), p.vertices.end());
    if (colors) out.colors.insert(out.colors.end(), p.colors.begin(), p.colors.end());
    for (Face f : p.faces) out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  }
  out.mask = SelectionMask(out.vertices.size());
  return out;
}

TriMesh extract_submesh(const TriMesh& mesh) {
  if (mesh.mask.size() != mesh.vertices.size()) throw InvalidArgument("mask length does not match vertex count");
  constexpr auto kDropped = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> remap(mesh.vertices.size(), kDropped);
  std::vector<Vec3> vertices, colors;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!mesh.mask.kept(i)) continue;
    remap[i] = static_cast<std::uint32_t>(vertices.size());
    vertices.push_back(mesh.vertices[i]);
    if (mesh.has_colors()) colors.push_back(mesh.colors[i]);
  }
  if (vertices.empty()) throw EmptyResult("selection is empty: no vertices are kept");
  std::vector<Face> faces;
  for (const Face& f : mesh.faces) {
    if (remap[f[0]] == kDropped || remap[f[1]] == kDropped || remap[f[2]] == kDropped) continue;
    faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
  }
  return TriMesh(std::move(vertices), std::move(faces), std::move(colors));
}

}  // namespace recompose
