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

#include "recompose/segmentation.hpp"

#include <algorithm>
#include <numeric>

namespace recompose {

std::size_t SelectionMask::kept_count() const {
  return static_cast<std::size_t>(std::count(kept_.begin(), kept_.end(), std::uint8_t{1}));
}

double point_segment_distance_sq(Vec3 p, Vec3 a, Vec3 b) {
  Vec3 ab = b - a;
  double len_sq = length_sq(ab);
  double t = len_sq > 0 ? std::clamp(dot(p - a, ab) / len_sq, 0.0, 1.0) : 0.0;
  return distance_sq(p, a + ab * t);
}

SelectionMask apply_stroke(const TriMesh& mesh, const BrushStroke& stroke, const Transform3& world_transform) {
  if (stroke.path.empty()) throw InvalidArgument("stroke path is empty");
  if (!(stroke.radius_world > 0)) throw InvalidArgument("stroke radius must be positive");
  if (mesh.mask.size() != mesh.vertices.size()) throw InvalidArgument("mask length does not match vertex count");
  Transform3 to_local = world_transform.inverse();
  auto sv = world_transform.singular_values();
  if (sv[0] > kMaxBrushAnisotropy * sv[2])
    throw InvalidArgument("non-uniform world scale beyond 1.2:1 is not supported by the brush");

  double radius = stroke.radius_world / world_transform.uniform_scale();
  double radius_sq = radius * radius;
  std::vector<Vec3> path(stroke.path.size());
  std::transform(stroke.path.begin(), stroke.path.end(), path.begin(),
                 [&](Vec3 p) { return to_local.apply_point(p); });

  AABB reach = bounds_of(std::span<const Vec3>(path));
  reach.min -= Vec3{radius, radius, radius};
  reach.max += Vec3{radius, radius, radius};

  SelectionMask out = mesh.mask;
  const std::uint8_t flag = stroke.mode == BrushMode::Keep ? 1 : 0;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    if (v.x < reach.min.x || v.y < reach.min.y || v.z < reach.min.z || v.x > reach.max.x || v.y > reach.max.y ||
        v.z > reach.max.z)
      continue;
    double best = path.size() == 1 ? distance_sq(v, path[0]) : std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < path.size() && best > radius_sq; ++k)
      best = std::min(best, point_segment_distance_sq(v, path[k], path[k + 1]));
    if (best <= radius_sq) out.kept_[i] = flag;
  }
  return out;
}

SelectionMask set_all(const TriMesh& mesh, bool kept) { return SelectionMask(mesh.vertices.size(), kept); }

void clear(SelectionMask& mask) { std::fill(mask.kept_.begin(), mask.kept_.end(), std::uint8_t{0}); }

std::pair<std::size_t, std::size_t> mask_stats(const SelectionMask& mask) { return {mask.kept_count(), mask.size()}; }

}  // namespace recompose
