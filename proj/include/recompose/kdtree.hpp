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
#include <vector>

#include "recompose/geometry.hpp"

namespace recompose {

struct Neighbor {
  std::uint32_t index = 0;
  double distance_sq = 0;
};

// Static 3-d tree for exact nearest-neighbor queries. Among points at the
// same squared distance the lowest index wins, so results are independent of
// tree layout.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::span<const Vec3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  // Precondition: !empty().
  Neighbor nearest(Vec3 q) const;

 private:
  struct Node {
    double split = 0;
    std::uint32_t begin = 0, end = 0;  // range in points_ / ids_
    std::int32_t left = -1, right = -1;
    std::uint8_t axis = 0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, int depth);
  void search(std::int32_t node, Vec3 q, Neighbor& best) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> ids_;
  std::vector<Node> nodes_;
};

// Exhaustive scan with the same tie rule as KdTree.
Neighbor brute_force_nearest(std::span<const Vec3> points, Vec3 q);

}  // namespace recompose
