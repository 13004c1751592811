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
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "recompose/mesh.hpp"
#include "recompose/slat.hpp"

namespace recompose {

// Dense R^3 occupancy on the same lattice convention as SparseLatentVolume.
struct OccupancyGrid {
  int resolution = 0;
  std::vector<std::uint8_t> occupied;  // index (i * R + j) * R + k
  Transform3 grid_to_world;

  OccupancyGrid() = default;
  OccupancyGrid(int r, const Transform3& g2w)
      : resolution(r), occupied(static_cast<std::size_t>(r) * r * r, 0), grid_to_world(g2w) {}

  std::size_t index(int i, int j, int k) const { return (static_cast<std::size_t>(i) * resolution + j) * resolution + k; }
  bool at(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= resolution || j >= resolution || k >= resolution) return false;
    return occupied[index(i, j, k)] != 0;
  }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
};

// Shell voxels, flood fill of the exterior from the grid boundary through
// inactive voxels (6-connected), everything not reached is occupied; then
// closing_passes rounds of 6-neighborhood dilation followed by as many
// erosions. Throws EmptyResult for an empty volume.
OccupancyGrid solidify(const SparseLatentVolume& vol, int closing_passes = 1);

// Watertight surface at the 0.5 level of the occupancy after one separable
// [1/4 1/2 1/4] smoothing pass, extracted by marching tetrahedra over voxel
// centers. Smoothing moves crossings but never flips a voxel's side. Vertex
// colors copy the color part of the nearest voxel feature in vol.
TriMesh decode_surface(const OccupancyGrid& grid, const SparseLatentVolume& vol);

struct ComposeParams {
  int resolution = 64;
  double selection_threshold_voxels = 1.0;
  int closing_passes = 1;
  EncodeOptions encode{};

  friend bool operator==(const ComposeParams&, const ComposeParams&) = default;
};

// One placed segment. volume, if set, must be encode_mesh(*mesh) at
// params.encode; it lets callers reuse encodings across compositions.
struct ComposeItem {
  const TriMesh* mesh = nullptr;
  SelectionMask mask;
  Transform3 transform;
  std::shared_ptr<const SparseLatentVolume> volume;
};

enum class ComposeStage { Encode, Select, Transform, Union, Solidify, Decode };
std::string_view to_string(ComposeStage stage);

using ComposeProgress = std::function<void(ComposeStage)>;

// Per item: encode, filter_by_mask, transform_volume; then latent_union,
// solidify and decode_surface. Items whose selection leaves no voxels are
// skipped; if every item is empty, throws EmptyResult.
TriMesh compose(std::span<const ComposeItem> items, const ComposeParams& params,
                const ComposeProgress& progress = {});

// The composed volume alone (everything before solidify).
SparseLatentVolume compose_volume(std::span<const ComposeItem> items, const ComposeParams& params,
                                  const ComposeProgress& progress = {});

}  // namespace recompose
