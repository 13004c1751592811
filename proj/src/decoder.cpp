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

#include "recompose/decoder.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <unordered_map>

#include "recompose/kdtree.hpp"

namespace recompose {

std::size_t OccupancyGrid::count() const {
  return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), std::uint8_t{1}));
}

namespace {

constexpr int kNeighbors[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

std::size_t at(int i, int j, int k, int n) { return (static_cast<std::size_t>(i) * n + j) * n + k; }

// One 6-neighborhood dilation (grow) or erosion (shrink) on an n^3 lattice;
// outside the lattice counts as empty.
std::vector<std::uint8_t> morph(const std::vector<std::uint8_t>& in, int n, bool grow) {
  std::vector<std::uint8_t> out = in;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (in[at(i, j, k, n)] == (grow ? 1 : 0)) continue;
        for (const auto& d : kNeighbors) {
          int a = i + d[0], b = j + d[1], c = k + d[2];
          bool inside = a >= 0 && b >= 0 && c >= 0 && a < n && b < n && c < n;
          bool neighbor = inside && in[at(a, b, c, n)];
          if (neighbor == grow) {
            out[at(i, j, k, n)] = grow ? 1 : 0;
            break;
          }
        }
      }
  return out;
}

// Closing on a lattice padded by `passes` empty voxels per side, so the
// result matches closing on an unbounded grid; then cropped back.
std::vector<std::uint8_t> close(const std::vector<std::uint8_t>& occ, int r, int passes) {
  const int n = r + 2 * passes;
  std::vector<std::uint8_t> work(static_cast<std::size_t>(n) * n * n, 0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) work[at(i + passes, j + passes, k + passes, n)] = occ[at(i, j, k, r)];
  for (int p = 0; p < passes; ++p) work = morph(work, n, true);
  for (int p = 0; p < passes; ++p) work = morph(work, n, false);
  std::vector<std::uint8_t> out(occ.size());
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) out[at(i, j, k, r)] = work[at(i + passes, j + passes, k + passes, n)];
  return out;
}

}  // namespace

OccupancyGrid solidify(const SparseLatentVolume& vol, int closing_passes) {
  if (vol.empty()) throw EmptyResult("cannot solidify an empty volume");
  if (closing_passes < 0 || closing_passes > 3) throw InvalidArgument("closing passes must be in 0..3");
  const int r = vol.resolution;
  OccupancyGrid grid(r, vol.grid_to_world);
  std::vector<std::uint8_t> shell(grid.occupied.size(), 0);
  for (const VoxelCoord& c : vol.voxels) shell[grid.index(c[0], c[1], c[2])] = 1;

  // Exterior: reachable from the boundary through non-shell voxels.
  std::vector<std::uint8_t> exterior(shell.size(), 0);
  std::deque<std::array<int, 3>> queue;
  auto seed = [&](int i, int j, int k) {
    std::size_t id = grid.index(i, j, k);
    if (shell[id] || exterior[id]) return;
    exterior[id] = 1;
    queue.push_back({i, j, k});
  };
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      seed(0, a, b);
      seed(r - 1, a, b);
      seed(a, 0, b);
      seed(a, r - 1, b);
      seed(a, b, 0);
      seed(a, b, r - 1);
    }
  while (!queue.empty()) {
    auto [i, j, k] = queue.front();
    queue.pop_front();
    for (const auto& d : kNeighbors) {
      int a = i + d[0], b = j + d[1], c = k + d[2];
      if (a < 0 || b < 0 || c < 0 || a >= r || b >= r || c >= r) continue;
      seed(a, b, c);
    }
  }
  for (std::size_t id = 0; id < shell.size(); ++id) grid.occupied[id] = exterior[id] ? 0 : 1;

  if (closing_passes > 0) grid.occupied = close(grid.occupied, r, closing_passes);
  return grid;
}

namespace {

// Keeps every voxel center strictly on its own side of the iso-level.
constexpr double kIsoMargin = 0.02;

}  // namespace

TriMesh decode_surface(const OccupancyGrid& grid, const SparseLatentVolume& vol) {
  const int r = grid.resolution;
  if (r <= 0 || grid.empty()) throw EmptyResult("cannot decode an empty occupancy grid");
  // Field on voxel centers, padded by one empty layer on every side.
  const int p = r + 2;
  auto pid = [p](int a, int b, int c) { return (static_cast<std::size_t>(a) * p + b) * p + c; };
  std::vector<double> field(static_cast<std::size_t>(p) * p * p, 0.0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        if (grid.at(i, j, k)) field[pid(i + 1, j + 1, k + 1)] = 1.0;

  std::vector<double> smooth = field, tmp(field.size(), 0.0);
  for (int axis = 0; axis < 3; ++axis) {
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        for (int c = 0; c < p; ++c) {
          int idx[3] = {a, b, c};
          double center = smooth[pid(a, b, c)];
          double lo = 0, hi = 0;
          if (idx[axis] > 0) {
            idx[axis] -= 1;
            lo = smooth[pid(idx[0], idx[1], idx[2])];
            idx[axis] += 1;
          }
          if (idx[axis] < p - 1) {
            idx[axis] += 1;
            hi = smooth[pid(idx[0], idx[1], idx[2])];
          }
          tmp[pid(a, b, c)] = 0.25 * lo + 0.5 * center + 0.25 * hi;
        }
    std::swap(smooth, tmp);
  }
  for (std::size_t id = 0; id < field.size(); ++id)
    smooth[id] = field[id] > 0 ? std::clamp(smooth[id], 0.5 + kIsoMargin, 1.0)
                               : std::clamp(smooth[id], 0.0, 0.5 - kIsoMargin);

  TriMesh mesh;
  std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
  auto lattice_pos = [&](std::size_t id) {
    int c = static_cast<int>(id % p), b = static_cast<int>((id / p) % p), a = static_cast<int>(id / (static_cast<std::size_t>(p) * p));
    return Vec3{a - 0.5, b - 0.5, c - 0.5};  // grid coordinates of the voxel center
  };
  auto crossing = [&](std::size_t u, std::size_t v) {
    if (u > v) std::swap(u, v);
    std::uint64_t key = static_cast<std::uint64_t>(u) << 32 | v;
    auto [it, inserted] = edge_vertex.try_emplace(key, 0);
    if (inserted) {
      double t = (0.5 - smooth[u]) / (smooth[v] - smooth[u]);
      Vec3 pu = lattice_pos(u), pv = lattice_pos(v);
      it->second = static_cast<std::uint32_t>(mesh.vertices.size());
      mesh.vertices.push_back(grid.grid_to_world.apply_point(pu + (pv - pu) * t));
    }
    return it->second;
  };

  static constexpr int kTets[6][4] = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
                                      {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};
  std::array<std::size_t, 8> corner;
  for (int a = 0; a + 1 < p; ++a)
    for (int b = 0; b + 1 < p; ++b)
      for (int c = 0; c + 1 < p; ++c) {
        int inside = 0;
        for (int n = 0; n < 8; ++n) {
          corner[n] = pid(a + (n & 1), b + ((n >> 1) & 1), c + ((n >> 2) & 1));
          inside += smooth[corner[n]] > 0.5;
        }
        if (inside == 0 || inside == 8) continue;
        for (const auto& tet : kTets) {
          std::array<std::size_t, 4> in{}, out{};
          int ni = 0, no = 0;
          for (int n : tet) (smooth[corner[n]] > 0.5 ? in[ni++] : out[no++]) = corner[n];
          if (ni == 0 || no == 0) continue;
          Vec3 in_c, out_c;
          for (int n = 0; n < ni; ++n) in_c += lattice_pos(in[n]);
          for (int n = 0; n < no; ++n) out_c += lattice_pos(out[n]);
          Vec3 outward = out_c / no - in_c / ni;
          std::vector<std::array<std::size_t, 2>> ring;
          if (ni == 1) {
            ring = {{in[0], out[0]}, {in[0], out[1]}, {in[0], out[2]}};
          } else if (no == 1) {
            ring = {{in[0], out[0]}, {in[1], out[0]}, {in[2], out[0]}};
          } else {
            ring = {{in[0], out[0]}, {in[0], out[1]}, {in[1], out[1]}, {in[1], out[0]}};
          }
          // Orient in grid space; a mirroring grid_to_world is handled below.
          std::vector<Vec3> gp;
          std::vector<std::uint32_t> ids;
          for (auto [u, v] : ring) {
            double t = (0.5 - smooth[u]) / (smooth[v] - smooth[u]);
            Vec3 pu = lattice_pos(u), pv = lattice_pos(v);
            gp.push_back(pu + (pv - pu) * t);
            ids.push_back(crossing(u, v));
          }
          Vec3 n = cross(gp[1] - gp[0], gp[2] - gp[0]);
          bool flip = dot(n, outward) < 0;
          auto tri = [&](int x, int y, int z) {
            if (flip)
              mesh.faces.push_back({ids[x], ids[z], ids[y]});
            else
              mesh.faces.push_back({ids[x], ids[y], ids[z]});
          };
          tri(0, 1, 2);
          if (ring.size() == 4) tri(0, 2, 3);
        }
      }
  if (mesh.faces.empty()) throw EmptyResult("decoded surface is empty");

  if (vol.feature_dim >= kColorOffset + 3 && !vol.empty()) {
    KdTree tree(voxel_centers(vol));
    mesh.colors.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      auto f = vol.feature(tree.nearest(mesh.vertices[i]).index);
      mesh.colors[i] = {f[kColorOffset], f[kColorOffset + 1], f[kColorOffset + 2]};
    }
  }
  mesh.mask = SelectionMask(mesh.vertices.size());
  if (grid.grid_to_world.linear_determinant() < 0)
    for (Face& f : mesh.faces) std::swap(f[1], f[2]);
  return mesh;
}

std::string_view to_string(ComposeStage stage) {
  switch (stage) {
    case ComposeStage::Encode: return "encode";
    case ComposeStage::Select: return "select";
    case ComposeStage::Transform: return "transform";
    case ComposeStage::Union: return "union";
    case ComposeStage::Solidify: return "solidify";
    case ComposeStage::Decode: return "decode";
  }
  return "unknown";
}

SparseLatentVolume compose_volume(std::span<const ComposeItem> items, const ComposeParams& params,
                                  const ComposeProgress& progress) {
  auto report = [&](ComposeStage s) {
    if (progress) progress(s);
  };
  if (items.empty()) throw EmptyResult("nothing to compose: the scene has no instances");
  EncodeOptions encode = params.encode;
  encode.resolution = params.resolution;
  std::vector<SparseLatentVolume> placed;
  placed.reserve(items.size());
  for (const ComposeItem& item : items) {
    if (item.mesh == nullptr) throw InvalidArgument("compose item without a mesh");
    report(ComposeStage::Encode);
    std::shared_ptr<const SparseLatentVolume> source = item.volume;
    if (!source) source = std::make_shared<SparseLatentVolume>(encode_mesh(*item.mesh, encode));
    report(ComposeStage::Select);
    SparseLatentVolume selected = filter_by_mask(*source, *item.mesh, item.mask, params.selection_threshold_voxels);
    if (selected.empty()) continue;
    report(ComposeStage::Transform);
    placed.push_back(transform_volume(selected, item.transform));
  }
  if (placed.empty()) throw EmptyResult("every instance has an empty selection");
  report(ComposeStage::Union);
  return latent_union(placed, params.resolution);
}

TriMesh compose(std::span<const ComposeItem> items, const ComposeParams& params, const ComposeProgress& progress) {
  SparseLatentVolume composed = compose_volume(items, params, progress);
  if (progress) progress(ComposeStage::Solidify);
  OccupancyGrid grid = solidify(composed, params.closing_passes);
  if (progress) progress(ComposeStage::Decode);
  return decode_surface(grid, composed);
}

}  // namespace recompose
