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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "recompose/geometry.hpp"
#include "recompose/selection_mask.hpp"

namespace recompose {

using Face = std::array<std::uint32_t, 3>;

// Indexed triangle mesh. colors is either empty or one RGB triple in [0,1]
// per vertex; mask always has one entry per vertex.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> colors;
  SelectionMask mask;

  TriMesh() = default;
  TriMesh(std::vector<Vec3> v, std::vector<Face> f, std::vector<Vec3> c = {})
      : vertices(std::move(v)), faces(std::move(f)), colors(std::move(c)), mask(vertices.size()) {}

  bool has_colors() const { return !colors.empty(); }
  bool empty() const { return faces.empty(); }

  // Throws InvalidArgument / DegenerateFaceError when an invariant fails.
  void validate() const;
};

AABB bounds_of(const TriMesh& mesh);
double triangle_area(Vec3 a, Vec3 b, Vec3 c);
double surface_area(const TriMesh& mesh);
Vec3 face_normal(const TriMesh& mesh, std::size_t face);

// Every undirected edge is used by exactly two faces.
bool is_watertight(const TriMesh& mesh);
// V - E + F.
long euler_characteristic(const TriMesh& mesh);

// Reads the OBJ subset: `v x y z [r g b]`, `f a b c` (1-based, `a/t/n`
// forms accepted, negative indices relative), `vt`/`vn`/`o`/`g`/`s`/
// `usemtl`/`mtllib` and comments ignored. The mask starts all kept.
TriMesh load_mesh(const std::filesystem::path& path);
TriMesh parse_obj(std::string_view text);

// Writes vertices with 17 significant digits, colors with 6 decimals, LF
// line endings.
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path);
std::string format_obj(const TriMesh& mesh);

// Scales uniformly so the longest bbox side is 1 and centers the bbox at the
// origin. The returned transform maps normalized coordinates back.
std::pair<TriMesh, Transform3> normalize_unit_bbox(const TriMesh& mesh);

TriMesh apply_transform(const TriMesh& mesh, const Transform3& t);

// Concatenates meshes; colors are kept only if every part has them.
TriMesh merge_meshes(std::span<const TriMesh> parts);

// Keeps the kept vertices and the faces whose three corners are kept.
// Throws EmptyResult when nothing is kept.
TriMesh extract_submesh(const TriMesh& mesh);

}  // namespace recompose
