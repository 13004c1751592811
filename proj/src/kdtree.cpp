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

#include "recompose/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace recompose {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

KdTree::KdTree(std::span<const Vec3> points) {
  if (points.empty()) return;
  ids_.resize(points.size());
  std::iota(ids_.begin(), ids_.end(), 0u);
  points_.assign(points.begin(), points.end());
  nodes_.reserve(2 * points.size() / kLeafSize + 1);
  build(0, static_cast<std::uint32_t>(points.size()), 0);
  // Reorder points to match ids_ for locality in leaf scans.
  std::vector<Vec3> ordered(points.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) ordered[i] = points[ids_[i]];
  points_ = std::move(ordered);
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end, int depth) {
  auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({0, begin, end, -1, -1, 0});
  if (end - begin <= kLeafSize) return id;

  AABB box;
  for (std::uint32_t i = begin; i < end; ++i) box.extend(points_[ids_[i]]);
  Vec3 e = box.extent();
  int axis = (e.x >= e.y && e.x >= e.z) ? 0 : (e.y >= e.z ? 1 : 2);
  std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(ids_.begin() + begin, ids_.begin() + mid, ids_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });
  double split = points_[ids_[mid]][axis];
  std::int32_t left = build(begin, mid, depth + 1);
  std::int32_t right = build(mid, end, depth + 1);
  Node& n = nodes_[id];
  n.split = split;
  n.axis = static_cast<std::uint8_t>(axis);
  n.left = left;
  n.right = right;
  return id;
}

Neighbor KdTree::nearest(Vec3 q) const {
  Neighbor best{std::numeric_limits<std::uint32_t>::max(), std::numeric_limits<double>::infinity()};
  search(0, q, best);
  return best;
}

void KdTree::search(std::int32_t node, Vec3 q, Neighbor& best) const {
  const Node& n = nodes_[node];
  if (n.left < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) {
      double d = distance_sq(points_[i], q);
      if (d < best.distance_sq || (d == best.distance_sq && ids_[i] < best.index)) best = {ids_[i], d};
    }
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  double delta = q[n.axis] - n.split;
  std::int32_t first = delta < 0 ? n.left : n.right;
  std::int32_t second = delta < 0 ? n.right : n.left;
  search(first, q, best);
  // <= keeps equal-distance candidates reachable for the index tie rule.
  if (delta * delta <= best.distance_sq) search(second, q, best);
}

Neighbor brute_force_nearest(std::span<const Vec3> points, Vec3 q) {
  Neighbor best{std::numeric_limits<std::uint32_t>::max(), std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < points.size(); ++i) {
    double d = distance_sq(points[i], q);
    if (d < best.distance_sq) best = {static_cast<std::uint32_t>(i), d};
  }
  return best;
}

}  // namespace recompose
