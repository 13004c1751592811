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
#include <vector>

#include "recompose/mesh.hpp"

namespace recompose {

using VoxelCoord = std::array<std::int32_t, 3>;

// Feature layout of the encoder: mean RGB followed by mean unit normal.
inline constexpr int kDefaultFeatureDim = 6;
inline constexpr int kColorOffset = 0;
inline constexpr int kNormalOffset = 3;

// Active voxels on an R^3 lattice, one feature vector each. Grid coordinate
// (i, j, k) covers [i, i+1) x [j, j+1) x [k, k+1); grid_to_world maps grid
// coordinates to world space, so voxel centers sit at (i+0.5, j+0.5, k+0.5).
struct SparseLatentVolume {
  int resolution = 64;
  int feature_dim = kDefaultFeatureDim;
  std::vector<VoxelCoord> voxels;
  std::vector<double> features;  // voxels.size() * feature_dim, row-major
  Transform3 grid_to_world;

  std::size_t size() const { return voxels.size(); }
  bool empty() const { return voxels.empty(); }
  std::span<const double> feature(std::size_t i) const {
    return {features.data() + i * feature_dim, static_cast<std::size_t>(feature_dim)};
  }
  Vec3 voxel_center(std::size_t i) const;
  // World-space edge length of one voxel (uniform scale of grid_to_world).
  double voxel_edge() const { return grid_to_world.uniform_scale(); }

  void validate() const;
  friend bool operator==(const SparseLatentVolume&, const SparseLatentVolume&) = default;
};

struct EncodeOptions {
  int resolution = 64;
  // Surface samples per voxel-face area of surface; the total sample count is
  // ceil(density * area / edge^2).
  double samples_per_voxel = 12.0;
  std::uint64_t seed = 0;

  friend bool operator==(const EncodeOptions&, const EncodeOptions&) = default;
};

// Voxelizes area-weighted surface samples. The grid is the mesh's bounding
// cube widened by one voxel on each side, so a mesh of longest side L gets
// voxels of edge L / (R - 2). Throws EmptyResult for a zero-area mesh.
SparseLatentVolume encode_mesh(const TriMesh& mesh, const EncodeOptions& options = {});

// Keeps the voxels whose center lies within threshold_voxels voxel edges of a
// kept vertex or of a face whose three vertices are kept.
SparseLatentVolume filter_by_mask(const SparseLatentVolume& vol, const TriMesh& mesh, const SelectionMask& mask,
                                  double threshold_voxels = 1.0);

// Prepends t to grid_to_world and rotates the normal part of each feature.
SparseLatentVolume transform_volume(const SparseLatentVolume& vol, const Transform3& t);

// Fits all source voxel cells into one cubic grid of output_resolution
// (bounding box padded by one output voxel, anchored at its min corner). An
// output voxel is active if it holds a source voxel center or its own center
// lies inside a source cell. Each active voxel copies the feature of the
// nearest source voxel center verbatim. Empty inputs are ignored; throws
// EmptyResult if all are empty.
SparseLatentVolume latent_union(std::span<const SparseLatentVolume> vols, int output_resolution = 64);

// World-space voxel centers of every volume, concatenated in input order.
std::vector<Vec3> voxel_centers(const SparseLatentVolume& vol);

// Writes <stem>.csv (i,j,k,f0..) and <stem>.json (resolution, grid_to_world).
void dump_volume(const SparseLatentVolume& vol, const std::filesystem::path& stem);

}  // namespace recompose
