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
#include <vector>

#include "recompose/mesh.hpp"

namespace recompose {

// Counter-based generator: the i-th draw for a seed is a pure function of
// (seed, stream, i), so results do not depend on platform, library or the
// order in which draws are taken.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;
  // Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

struct SurfaceSample {
  Vec3 point;
  std::uint32_t face;
};

// n points distributed uniformly by area. Throws EmptyResult for zero area.
std::vector<Vec3> sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed);
std::vector<SurfaceSample> sample_surface_with_faces(const TriMesh& mesh, std::size_t n,
                                                     std::uint64_t seed);

}  // namespace recompose
