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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "recompose/mesh.hpp"

namespace recompose {

// Procedural stand-ins for the benchmark categories: elongated capsule
// (antenna), bent tube (banana), torus (doughnut), thin ring (ring),
// icosphere (ball), plus box and stud block for scene building.
enum class ShapeKind { Elongated, BentTube, Torus, ThinRing, Sphere, Box, Block };

std::string_view to_string(ShapeKind kind);
// Throws InvalidArgument for unknown names.
ShapeKind shape_kind_from_string(std::string_view name);

// Unset fields take the per-kind defaults listed in shapes.cpp.
struct ShapeParams {
  std::optional<double> radius;         // sphere, capsule and tube radius
  std::optional<double> length;         // capsule end-to-end length
  std::optional<double> major_radius;   // torus / ring
  std::optional<double> minor_radius;   // torus / ring
  std::optional<double> bend_degrees;   // bent tube arc angle
  std::optional<Vec3> size;             // box / block body size
  std::optional<int> studs_x, studs_z;  // block stud grid
  std::optional<int> subdivisions;      // icosphere levels, box cells per side
  std::optional<int> segments;          // around the main axis
  std::optional<int> rings;             // along the main axis / around the tube
  std::optional<Vec3> color;            // uniform vertex color

  friend bool operator==(const ShapeParams&, const ShapeParams&) = default;
};

// Watertight, consistently outward-oriented mesh. The seed only rotates the
// tessellation about the shape's symmetry axis; geometry is otherwise fixed.
TriMesh gen_shape(ShapeKind kind, const ShapeParams& params = {}, std::uint64_t seed = 0);

// Signed volume by the divergence theorem; positive for outward winding.
double signed_volume(const TriMesh& mesh);

}  // namespace recompose
