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

#include "recompose/slat.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "json.hpp"

#include "recompose/kdtree.hpp"
#include "recompose/sampling.hpp"

namespace recompose {

namespace {

std::uint64_t linear_key(const VoxelCoord& c, int r) {
  return (static_cast<std::uint64_t>(c[0]) * r + c[1]) * r + c[2];
}

Vec3 grid_center(const VoxelCoord& c) { return {c[0] + 0.5, c[1] + 0.5, c[2] + 0.5}; }

// Index from grid coordinates into an active-voxel table.
class VoxelLookup {
 public:
  explicit VoxelLookup(const SparseLatentVolume& vol) : r_(vol.resolution) {
    map_.reserve(vol.size() * 2);
    for (std::size_t i = 0; i < vol.size(); ++i) map_.emplace(linear_key(vol.voxels[i], r_), i);
  }
  // Returns -1 if inactive or out of range.
  long find(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= r_ || j >= r_ || k >= r_) return -1;
    auto it = map_.find(linear_key({i, j, k}, r_));
    return it == map_.end() ? -1 : static_cast<long>(it->second);
  }

 private:
  int r_;
  std::unordered_map<std::uint64_t, std::size_t> map_;
};

}  // namespace

Vec3 SparseLatentVolume::voxel_center(std::size_t i) const { return grid_to_world.apply_point(grid_center(voxels[i])); }

void SparseLatentVolume::validate() const {
  if (resolution < 1) throw InvalidArgument("volume resolution must be positive");
  if (feature_dim < 0) throw InvalidArgument("feature dimension must be non-negative");
  if (features.size() != voxels.size() * static_cast<std::size_t>(feature_dim))
    throw InvalidArgument("feature count does not match voxel count");
  require_invertible(grid_to_world, "volume grid_to_world");
  std::vector<std::uint64_t> keys;
  keys.reserve(voxels.size());
  for (const VoxelCoord& c : voxels) {
    for (int a = 0; a < 3; ++a)
      if (c[a] < 0 || c[a] >= resolution) throw InvalidArgument("voxel coordinate out of range");
    keys.push_back(linear_key(c, resolution));
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) throw InvalidArgument("duplicate voxel coordinate");
}

std::vector<Vec3> voxel_centers(const SparseLatentVolume& vol) {
  std::vector<Vec3> out(vol.size());
  for (std::size_t i = 0; i < vol.size(); ++i) out[i] = vol.voxel_center(i);
  return out;
}

SparseLatentVolume encode_mesh(const TriMesh& mesh, const EncodeOptions& options) {
  const int r = options.resolution;
  if (r < 8) throw InvalidArgument("encode resolution must be at least 8");
  if (!(options.samples_per_voxel > 0)) throw InvalidArgument("sample density must be positive");
  if (mesh.faces.empty()) throw EmptyResult("cannot encode a mesh without faces");
  double area = surface_area(mesh);
  if (!(area > 0)) throw EmptyResult("cannot encode a mesh with zero surface area");

  AABB box = bounds_of(mesh);
  double longest = box.longest_side();
  if (!(longest > 0)) throw EmptyResult("cannot encode a zero-extent mesh");
  double edge = longest / (r - 2);
  Vec3 origin = box.center() - Vec3{1, 1, 1} * (0.5 * edge * r);

  auto count = static_cast<std::size_t>(std::ceil(options.samples_per_voxel * area / (edge * edge)));
  count = std::clamp<std::size_t>(count, 1, 20'000'000);
  auto samples = sample_surface_with_faces(mesh, count, options.seed);

  std::vector<Vec3> normals(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) normals[f] = face_normal(mesh, f);

  struct Accum {
    Vec3 color, normal;
    std::size_t n = 0;
  };
  std::unordered_map<std::uint64_t, Accum> cells;
  for (const SurfaceSample& s : samples) {
    VoxelCoord c;
    Vec3 g = (s.point - origin) / edge;
    // The mesh spans [1, R-1] in grid units; faces lying on that boundary
    // belong to the inner cell, never the margin.
    for (int a = 0; a < 3; ++a) c[a] = std::clamp(static_cast<int>(std::floor(g[a])), 1, r - 2);
    Accum& acc = cells[linear_key(c, r)];
    const Face& f = mesh.faces[s.face];
    if (mesh.has_colors()) {
      // Face color is the mean of its corner colors.
      acc.color += (mesh.colors[f[0]] + mesh.colors[f[1]] + mesh.colors[f[2]]) / 3.0;
    } else {
      acc.color += Vec3{1, 1, 1};
    }
    acc.normal += normals[s.face];
    ++acc.n;
  }

  std::vector<std::uint64_t> keys;
  keys.reserve(cells.size());
  for (const auto& [k, _] : cells) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  SparseLatentVolume vol;
  vol.resolution = r;
  vol.feature_dim = kDefaultFeatureDim;
  vol.grid_to_world = Transform3::translation(origin) * Transform3::scaling(edge);
  vol.voxels.reserve(keys.size());
  vol.features.reserve(keys.size() * kDefaultFeatureDim);
  const auto ur = static_cast<std::uint64_t>(r);
  for (std::uint64_t k : keys) {
    const Accum& acc = cells[k];
    vol.voxels.push_back({static_cast<std::int32_t>(k / (ur * ur)), static_cast<std::int32_t>((k / ur) % ur),
                          static_cast<std::int32_t>(k % ur)});
    Vec3 color = acc.color / static_cast<double>(acc.n);
    Vec3 normal = acc.normal / static_cast<double>(acc.n);
    for (int a = 0; a < 3; ++a) color[a] = std::clamp(color[a], 0.0, 1.0);
    if (length(normal) > 1) normal = normalize(normal);
    vol.features.insert(vol.features.end(), {color.x, color.y, color.z, normal.x, normal.y, normal.z});
  }
  return vol;
}

SparseLatentVolume filter_by_mask(const SparseLatentVolume& vol, const TriMesh& mesh, const SelectionMask& mask,
                                  double threshold_voxels) {
  if (mask.size() != mesh.vertices.size()) throw InvalidArgument("mask length does not match vertex count");
  if (!(threshold_voxels > 0)) throw InvalidArgument("selection threshold must be positive");
  if (mask.all_kept()) return vol;
  SparseLatentVolume out;
  out.resolution = vol.resolution;
  out.feature_dim = vol.feature_dim;
  out.grid_to_world = vol.grid_to_world;
  if (mask.none_kept() || vol.empty()) return out;

  // Work in grid units, where the threshold is threshold_voxels.
  Transform3 to_grid = vol.grid_to_world.inverse();
  std::vector<Vec3> g(mesh.vertices.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = to_grid.apply_point(mesh.vertices[i]);

  VoxelLookup lookup(vol);
  std::vector<std::uint8_t> keep(vol.size(), 0);
  const double tau = threshold_voxels, tau_sq = tau * tau;

  auto visit = [&](const AABB& reach, auto&& within) {
    int lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max(0, static_cast<int>(std::floor(reach.min[a] - tau - 0.5)));
      hi[a] = std::min(vol.resolution - 1, static_cast<int>(std::ceil(reach.max[a] + tau - 0.5)));
    }
    for (int i = lo[0]; i <= hi[0]; ++i)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int k = lo[2]; k <= hi[2]; ++k) {
          long idx = lookup.find(i, j, k);
          if (idx < 0 || keep[idx]) continue;
          if (within(Vec3{i + 0.5, j + 0.5, k + 0.5})) keep[idx] = 1;
        }
  };

  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!mask.kept(v)) continue;
    AABB reach;
    reach.extend(g[v]);
    visit(reach, [&](Vec3 c) { return distance_sq(c, g[v]) <= tau_sq; });
  }
  for (const Face& f : mesh.faces) {
    if (!mask.kept(f[0]) || !mask.kept(f[1]) || !mask.kept(f[2])) continue;
    AABB reach;
    for (auto v : f) reach.extend(g[v]);
    visit(reach, [&](Vec3 c) {
      return distance_sq(c, closest_point_on_triangle(c, g[f[0]], g[f[1]], g[f[2]])) <= tau_sq;
    });
  }

  for (std::size_t i = 0; i < vol.size(); ++i) {
    if (!keep[i]) continue;
    out.voxels.push_back(vol.voxels[i]);
    auto feat = vol.feature(i);
    out.features.insert(out.features.end(), feat.begin(), feat.end());
  }
  return out;
}

SparseLatentVolume transform_volume(const SparseLatentVolume& vol, const Transform3& t) {
  require_invertible(t, "transform_volume");
  SparseLatentVolume out = vol;
  if (t == Transform3::identity()) return out;
  out.grid_to_world = t * vol.grid_to_world;
  if (vol.feature_dim >= kNormalOffset + 3) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      double* f = out.features.data() + i * out.feature_dim + kNormalOffset;
      Vec3 n{f[0], f[1], f[2]};
      double len = length(n);
      if (len == 0) continue;
      Vec3 rotated = normalize(t.apply_normal(n)) * len;
      f[0] = rotated.x;
      f[1] = rotated.y;
      f[2] = rotated.z;
    }
  }
  return out;
}

SparseLatentVolume latent_union(std::span<const SparseLatentVolume> vols, int output_resolution) {
  const int r = output_resolution;
  if (r < 4) throw InvalidArgument("union resolution must be at least 4");
  int dim = -1;
  std::vector<Vec3> centers;
  std::vector<const double*> source_features;
  std::vector<const SparseLatentVolume*> sources;
  AABB cells;
  for (const SparseLatentVolume& v : vols) {
    if (v.empty()) continue;
    if (dim >= 0 && v.feature_dim != dim) throw InvalidArgument("volumes have different feature dimensions");
    dim = v.feature_dim;
    sources.push_back(&v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      centers.push_back(v.voxel_center(i));
      source_features.push_back(v.features.data() + i * v.feature_dim);
      const VoxelCoord& c = v.voxels[i];
      for (int corner = 0; corner < 8; ++corner)
        cells.extend(v.grid_to_world.apply_point(
            {double(c[0] + (corner & 1)), double(c[1] + ((corner >> 1) & 1)), double(c[2] + ((corner >> 2) & 1))}));
    }
  }
  if (centers.empty()) throw EmptyResult("latent union of empty volumes");

  // Cube side L = E + 2h with h = L / R, anchored one voxel below the cells.
  double edge = cells.longest_side() / (r - 2);
  Vec3 origin = cells.min - Vec3{edge, edge, edge};
  const Transform3 out_to_world = Transform3::translation(origin) * Transform3::scaling(edge);

  const auto n3 = static_cast<std::size_t>(r) * r * r;
  std::vector<std::uint8_t> active(n3, 0);
  auto at = [&](int i, int j, int k) -> std::uint8_t& {
    return active[(static_cast<std::size_t>(i) * r + j) * r + k];
  };
  for (const SparseLatentVolume* v : sources) {
    // Output grid coordinates to this source's grid coordinates.
    const Transform3 out_to_src = v->grid_to_world.inverse() * out_to_world;
    const Transform3 src_to_out = out_to_world.inverse() * v->grid_to_world;
    for (const VoxelCoord& c : v->voxels) {
      // The output voxel holding the source center.
      Vec3 g = src_to_out.apply_point({c[0] + 0.5, c[1] + 0.5, c[2] + 0.5});
      int idx[3];
      for (int a = 0; a < 3; ++a) idx[a] = std::clamp(static_cast<int>(std::floor(g[a])), 0, r - 1);
      at(idx[0], idx[1], idx[2]) = 1;
      // Output voxels whose center lies inside the source cell, that is
      // within half a source edge of its center along each source axis.
      AABB reach;
      for (int corner = 0; corner < 8; ++corner)
        reach.extend(src_to_out.apply_point(
            {double(c[0] + (corner & 1)), double(c[1] + ((corner >> 1) & 1)), double(c[2] + ((corner >> 2) & 1))}));
      int lo[3], hi[3];
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::max(0, static_cast<int>(std::ceil(reach.min[a] - 0.5 - 1e-9)));
        hi[a] = std::min(r - 1, static_cast<int>(std::floor(reach.max[a] - 0.5 + 1e-9)));
      }
      for (int i = lo[0]; i <= hi[0]; ++i)
        for (int j = lo[1]; j <= hi[1]; ++j)
          for (int k = lo[2]; k <= hi[2]; ++k) {
            Vec3 q = out_to_src.apply_point({i + 0.5, j + 0.5, k + 0.5});
            bool inside = true;
            for (int a = 0; a < 3; ++a) inside = inside && q[a] >= c[a] - 1e-9 && q[a] <= c[a] + 1 + 1e-9;
            if (inside) at(i, j, k) = 1;
          }
    }
  }

  SparseLatentVolume out;
  out.resolution = r;
  out.feature_dim = dim;
  out.grid_to_world = out_to_world;
  KdTree tree(centers);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) {
        if (!at(i, j, k)) continue;
        out.voxels.push_back({i, j, k});
        Vec3 c = origin + Vec3{i + 0.5, j + 0.5, k + 0.5} * edge;
        const double* f = source_features[tree.nearest(c).index];
        out.features.insert(out.features.end(), f, f + dim);
      }
  return out;
}

void dump_volume(const SparseLatentVolume& vol, const std::filesystem::path& stem) {
  std::filesystem::path csv_path = stem, json_path = stem;
  csv_path += ".csv";
  json_path += ".json";
  std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  csv << "i,j,k";
  for (int d = 0; d < vol.feature_dim; ++d) csv << ",f" << d;
  csv << '\n';
  char buf[40];
  for (std::size_t i = 0; i < vol.size(); ++i) {
    csv << vol.voxels[i][0] << ',' << vol.voxels[i][1] << ',' << vol.voxels[i][2];
    for (double f : vol.feature(i)) {
      std::snprintf(buf, sizeof buf, ",%.17g", f);
      csv << buf;
    }
    csv << '\n';
  }
  nlohmann::json header = {{"resolution", vol.resolution},
                           {"feature_dim", vol.feature_dim},
                           {"voxel_count", vol.size()},
                           {"grid_to_world", vol.grid_to_world.matrix()}};
  std::ofstream js(json_path, std::ios::binary | std::ios::trunc);
  if (!js) throw IoError("cannot write " + json_path.string());
  js << header.dump(2) << '\n';
  if (!csv || !js) throw IoError("write failed for volume dump " + stem.string());
}

}  // namespace recompose
