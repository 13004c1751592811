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

#include "recompose/metrics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <deque>
#include <numeric>

#include "recompose/kdtree.hpp"
#include "recompose/sampling.hpp"

namespace recompose {

namespace {

double directional_mean(std::span<const Vec3> from, std::span<const Vec3> to) {
  double sum = 0;
  if (to.size() > kChamferBruteForceMax) {
    KdTree tree(to);
    for (const Vec3& p : from) sum += tree.nearest(p).distance_sq;
  } else {
    for (const Vec3& p : from) sum += brute_force_nearest(to, p).distance_sq;
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace

double chamfer_sq(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("chamfer distance of an empty point set");
  return directional_mean(a, b) + directional_mean(b, a);
}

OccupancyGrid fit_grid(std::span<const AABB> boxes, int resolution) {
  if (resolution < 4) throw InvalidArgument("grid resolution must be at least 4");
  AABB joint;
  for (const AABB& b : boxes) joint.extend(b);
  if (joint.empty()) throw EmptyResult("cannot fit a grid around nothing");
  double side = joint.longest_side();
  if (!(side > 0)) throw InvalidArgument("cannot fit a grid around a zero-extent box");
  double edge = side / (resolution - 2);
  Vec3 origin = joint.center() - Vec3{1, 1, 1} * (0.5 * edge * resolution);
  return OccupancyGrid(resolution, Transform3::translation(origin) * Transform3::scaling(edge));
}

namespace {

bool separated_on(Vec3 axis, Vec3 v0, Vec3 v1, Vec3 v2, double h) {
  double p0 = dot(v0, axis), p1 = dot(v1, axis), p2 = dot(v2, axis);
  double r = h * (std::abs(axis.x) + std::abs(axis.y) + std::abs(axis.z));
  return std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r;
}

// Separating-axis test of a triangle against the cube of half-size h
// centered at the origin.
bool triangle_overlaps_cube(Vec3 v0, Vec3 v1, Vec3 v2, double h) {
  const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (const Vec3& a : axes)
    if (separated_on(a, v0, v1, v2, h)) return false;
  Vec3 e[3] = {v1 - v0, v2 - v1, v0 - v2};
  if (separated_on(cross(e[0], e[1]), v0, v1, v2, h)) return false;
  for (const Vec3& edge : e)
    for (const Vec3& a : axes) {
      Vec3 axis = cross(edge, a);
      if (length_sq(axis) < 1e-24) continue;
      if (separated_on(axis, v0, v1, v2, h)) return false;
    }
  return true;
}

// Sign of orient2d(u, v, q) in the (y, z) plane, with q perturbed by
// (eps, eps^2) so exact zeros resolve consistently for every triangle sharing
// the edge.
int edge_sign(Vec3 u, Vec3 v, double qy, double qz) {
  double w = (v.y - u.y) * (qz - u.z) - (v.z - u.z) * (qy - u.y);
  if (w > 0) return 1;
  if (w < 0) return -1;
  double d = -(v.z - u.z);
  if (d != 0) return d > 0 ? 1 : -1;
  d = v.y - u.y;
  if (d != 0) return d > 0 ? 1 : -1;
  return 0;
}

double edge_value(Vec3 u, Vec3 v, double qy, double qz) {
  return (v.y - u.y) * (qz - u.z) - (v.z - u.z) * (qy - u.y);
}

}  // namespace

OccupancyGrid voxelize_solid(const TriMesh& mesh, const OccupancyGrid& frame) {
  if (!is_watertight(mesh)) throw InvalidArgument("solid voxelization needs a watertight mesh");
  const int r = frame.resolution;
  OccupancyGrid out(r, frame.grid_to_world);
  Transform3 to_grid = frame.grid_to_world.inverse();
  std::vector<Vec3> p(mesh.vertices.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = to_grid.apply_point(mesh.vertices[i]);

  auto clamp_lo = [r](double v) { return std::clamp(static_cast<int>(std::floor(v)), 0, r - 1); };
  std::vector<std::uint8_t> shell(out.occupied.size(), 0);
  // (row, x) pairs where row = j * r + k and x is the crossing along +x.
  std::vector<std::pair<std::uint32_t, double>> crossings;

  for (const Face& f : mesh.faces) {
    Vec3 a = p[f[0]], b = p[f[1]], c = p[f[2]];
    Vec3 lo = min(min(a, b), c), hi = max(max(a, b), c);
    if (hi.x < 0 || hi.y < 0 || hi.z < 0 || lo.x > r || lo.y > r || lo.z > r) continue;
    int i0 = clamp_lo(lo.x), i1 = clamp_lo(hi.x), j0 = clamp_lo(lo.y), j1 = clamp_lo(hi.y);
    int k0 = clamp_lo(lo.z), k1 = clamp_lo(hi.z);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j)
        for (int k = k0; k <= k1; ++k) {
          std::size_t id = out.index(i, j, k);
          if (shell[id]) continue;
          Vec3 center{i + 0.5, j + 0.5, k + 0.5};
          if (triangle_overlaps_cube(a - center, b - center, c - center, 0.5)) shell[id] = 1;
        }

    // Edges are evaluated in ascending vertex-index order and the sign
    // flipped for the reversed direction, so neighbors agree bit for bit.
    double area2 = (b.y - a.y) * (c.z - a.z) - (b.z - a.z) * (c.y - a.y);
    if (area2 == 0) continue;
    std::uint32_t ids[3] = {f[0], f[1], f[2]};
    int jy0 = std::max(0, static_cast<int>(std::ceil(lo.y - 0.5))), jy1 = std::min(r - 1, static_cast<int>(std::floor(hi.y - 0.5)));
    int kz0 = std::max(0, static_cast<int>(std::ceil(lo.z - 0.5))), kz1 = std::min(r - 1, static_cast<int>(std::floor(hi.z - 0.5)));
    for (int j = jy0; j <= jy1; ++j)
      for (int k = kz0; k <= kz1; ++k) {
        double qy = j + 0.5, qz = k + 0.5;
        int signs[3];
        double w[3];
        for (int e = 0; e < 3; ++e) {
          std::uint32_t u = ids[(e + 1) % 3], v = ids[(e + 2) % 3];
          bool flip = u > v;
          if (flip) std::swap(u, v);
          signs[e] = edge_sign(p[u], p[v], qy, qz) * (flip ? -1 : 1);
          w[e] = edge_value(p[u], p[v], qy, qz) * (flip ? -1 : 1);
        }
        if (signs[0] == 0 || signs[0] != signs[1] || signs[1] != signs[2]) continue;
        double x = (w[0] * a.x + w[1] * b.x + w[2] * c.x) / (w[0] + w[1] + w[2]);
        crossings.emplace_back(static_cast<std::uint32_t>(j * r + k), x);
      }
  }

  // Exterior: reachable from the boundary without entering the shell.
  std::vector<std::uint8_t> exterior(shell.size(), 0);
  std::deque<std::size_t> queue;
  auto seed = [&](std::size_t id) {
    if (shell[id] || exterior[id]) return;
    exterior[id] = 1;
    queue.push_back(id);
  };
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      seed(out.index(0, a, b));
      seed(out.index(r - 1, a, b));
      seed(out.index(a, 0, b));
      seed(out.index(a, r - 1, b));
      seed(out.index(a, b, 0));
      seed(out.index(a, b, r - 1));
    }
  const std::size_t stride[3] = {static_cast<std::size_t>(r) * r, static_cast<std::size_t>(r), 1};
  while (!queue.empty()) {
    std::size_t id = queue.front();
    queue.pop_front();
    std::size_t coord[3] = {id / stride[0], (id / stride[1]) % r, id % r};
    for (int axis = 0; axis < 3; ++axis) {
      if (coord[axis] > 0) seed(id - stride[axis]);
      if (coord[axis] + 1 < static_cast<std::size_t>(r)) seed(id + stride[axis]);
    }
  }

  std::sort(crossings.begin(), crossings.end());
  std::size_t cursor = 0;
  for (int j = 0; j < r; ++j)
    for (int k = 0; k < r; ++k) {
      std::uint32_t row = static_cast<std::uint32_t>(j * r + k);
      std::size_t begin = cursor;
      while (cursor < crossings.size() && crossings[cursor].first == row) ++cursor;
      std::size_t passed = begin;
      for (int i = 0; i < r; ++i) {
        double xc = i + 0.5;
        while (passed < cursor && crossings[passed].second < xc) ++passed;
        std::size_t id = out.index(i, j, k);
        if (exterior[id]) continue;
        out.occupied[id] = shell[id] ? static_cast<std::uint8_t>((passed - begin) & 1) : 1;
      }
    }
  return out;
}

double occupancy_iou(const OccupancyGrid& a, const OccupancyGrid& b) {
  if (a.resolution != b.resolution || !(a.grid_to_world == b.grid_to_world))
    throw InvalidArgument("occupancy grids do not share a frame");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.occupied.size(); ++i) {
    inter += a.occupied[i] & b.occupied[i];
    uni += a.occupied[i] | b.occupied[i];
  }
  if (uni == 0) throw EmptyResult("IoU of two empty occupancies");
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double mesh_iou(const TriMesh& a, const TriMesh& b, int resolution) {
  if (resolution < 32) throw InvalidArgument("IoU resolution must be at least 32");
  AABB boxes[2] = {bounds_of(a), bounds_of(b)};
  OccupancyGrid frame = fit_grid(boxes, resolution);
  return occupancy_iou(voxelize_solid(a, frame), voxelize_solid(b, frame));
}

std::vector<std::size_t> apportion(std::span<const double> weights, std::size_t total) {
  double sum = 0;
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw InvalidArgument("apportion weights must be finite and non-negative");
    sum += w;
  }
  std::vector<std::size_t> counts(weights.size(), 0);
  if (weights.empty() || total == 0) return counts;
  if (!(sum > 0)) throw InvalidArgument("apportion weights sum to zero");
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double exact = static_cast<double>(total) * weights[i] / sum;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t n = 0; assigned < total; ++n, ++assigned) ++counts[remainders[n % remainders.size()].second];
  return counts;
}

ReferenceComposite reference_composite(std::span<const PlacedMesh> instances, std::size_t samples,
                                       std::uint64_t seed) {
  if (instances.empty()) throw InvalidArgument("reference composite needs at least one instance");
  ReferenceComposite ref;
  std::vector<double> areas;
  for (const PlacedMesh& inst : instances) {
    if (inst.mesh == nullptr) throw InvalidArgument("reference composite instance without a mesh");
    ref.parts.push_back(apply_transform(*inst.mesh, inst.transform));
    areas.push_back(surface_area(ref.parts.back()));
    ref.bounds.extend(bounds_of(ref.parts.back()));
  }
  std::vector<std::size_t> counts = apportion(areas, samples);
  for (std::size_t i = 0; i < ref.parts.size(); ++i) {
    if (counts[i] == 0) continue;
    auto pts = sample_surface(ref.parts[i], counts[i], seed + 0x9E3779B97F4A7C15ULL * i);
    ref.samples.insert(ref.samples.end(), pts.begin(), pts.end());
  }
  return ref;
}

OccupancyGrid composite_occupancy(const ReferenceComposite& ref, const OccupancyGrid& frame) {
  OccupancyGrid out(frame.resolution, frame.grid_to_world);
  for (const TriMesh& part : ref.parts) {
    OccupancyGrid g = voxelize_solid(part, frame);
    for (std::size_t i = 0; i < out.occupied.size(); ++i) out.occupied[i] |= g.occupied[i];
  }
  return out;
}

double composite_iou(const TriMesh& decoded, const ReferenceComposite& ref, int resolution) {
  if (resolution < 32) throw InvalidArgument("IoU resolution must be at least 32");
  AABB boxes[2] = {bounds_of(decoded), ref.bounds};
  OccupancyGrid frame = fit_grid(boxes, resolution);
  return occupancy_iou(voxelize_solid(decoded, frame), composite_occupancy(ref, frame));
}

std::pair<double, double> confidence_interval_95(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw InvalidArgument("a confidence interval needs at least two values");
  double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  boost::math::students_t dist(static_cast<double>(n - 1));
  double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  return {mean, t * sd / std::sqrt(static_cast<double>(n))};
}

}  // namespace recompose
