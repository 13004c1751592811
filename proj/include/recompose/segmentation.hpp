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

#include <utility>
#include <vector>

#include "recompose/mesh.hpp"

namespace recompose {

enum class BrushMode { Keep, Drop };

// A painted stroke in world space.
struct BrushStroke {
  std::vector<Vec3> path;
  double radius_world = 0;
  BrushMode mode = BrushMode::Keep;

  friend bool operator==(const BrushStroke&, const BrushStroke&) = default;
};

// Largest accepted ratio between the singular values of a placement's linear
// block; beyond it a spherical brush is ill-defined.
inline constexpr double kMaxBrushAnisotropy = 1.2;

// Returns mesh.mask updated by one stroke. The path is mapped into mesh-local
// space through inverse(world_transform) and the radius divided by the
// placement's uniform scale (cube root of |det|). Every vertex within that
// radius of the polyline takes the stroke's mode; the rest keep their flag.
SelectionMask apply_stroke(const TriMesh& mesh, const BrushStroke& stroke, const Transform3& world_transform);

SelectionMask set_all(const TriMesh& mesh, bool kept);
// Marks every vertex dropped.
void clear(SelectionMask& mask);

// (kept_count, total_count)
std::pair<std::size_t, std::size_t> mask_stats(const SelectionMask& mask);

// Squared distance from p to segment [a, b].
double point_segment_distance_sq(Vec3 p, Vec3 a, Vec3 b);

}  // namespace recompose
