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
#include <span>
#include <utility>
#include <vector>

#include "recompose/decoder.hpp"
#include "recompose/mesh.hpp"

namespace recompose {

struct MetricRecord {
  double chamfer_sq = 0;
  double iou = 0;
};

// Mean squared nearest-neighbor distance from a to b plus the same from b to
// a. Uses a k-d tree when the target set has more than kChamferBruteForceMax
// points and an exhaustive scan otherwise. Throws InvalidArgument if either
// set is empty.
inline constexpr std::size_t kChamferBruteForceMax = 256;
double chamfer_sq(std::span<const Vec3> a, std::span<const Vec3> b);

// Cubic grid fitted around boxes: side = longest joint extent widened by one
// voxel on each side, centered on the joint box.
OccupancyGrid fit_grid(std::span<const AABB> boxes, int resolution);

// Solid occupancy of a watertight mesh on grid's frame, sampled at voxel
// centers. Voxels touched by a triangle form the shell; the exterior is the
// flood fill from the boundary through the rest; shell voxels are resolved by
// ray parity along +x. Throws InvalidArgument if the mesh is not watertight.
OccupancyGrid voxelize_solid(const TriMesh& mesh, const OccupancyGrid& frame);

// |A and B| / |A or B| on grids of equal resolution and frame. Throws
// EmptyResult when the union is empty.
double occupancy_iou(const OccupancyGrid& a, const OccupancyGrid& b);

// Both meshes voxelized on their joint bounding cube.
double mesh_iou(const TriMesh& a, const TriMesh& b, int resolution = 128);

struct PlacedMesh {
  const TriMesh* mesh = nullptr;
  Transform3 transform;
};

// Ground truth for a composition: the transformed meshes with no decoding.
struct ReferenceComposite {
  std::vector<TriMesh> parts;  // transformed copies
  std::vector<Vec3> samples;   // total budget split across parts by area
  AABB bounds;
};

ReferenceComposite reference_composite(std::span<const PlacedMesh> instances, std::size_t samples,
                                       std::uint64_t seed);

// Voxel union of each part's solid occupancy on frame.
OccupancyGrid composite_occupancy(const ReferenceComposite& ref, const OccupancyGrid& frame);

// IoU between a decoded mesh and a reference composite on their joint cube.
double composite_iou(const TriMesh& decoded, const ReferenceComposite& ref, int resolution = 128);

// Splits total into counts proportional to weights by largest remainder
// (ties to the lower index). Sum of the result equals total.
std::vector<std::size_t> apportion(std::span<const double> weights, std::size_t total);

// (mean, t-distribution 95% half-width). Throws InvalidArgument for n < 2.
std::pair<double, double> confidence_interval_95(std::span<const double> values);

}  // namespace recompose
