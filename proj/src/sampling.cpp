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

#include "recompose/sampling.hpp"

#include <algorithm>

namespace recompose {

namespace {

constexpr std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return splitmix(splitmix(seed_ ^ splitmix(stream_)) ^ counter);
}

std::vector<SurfaceSample> sample_surface_with_faces(const TriMesh& mesh, std::size_t n,
                                                     std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("sample count must be at least 1");
  std::vector<double> cdf(mesh.faces.size());
  double total = 0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    total += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    cdf[f] = total;
  }
  if (!(total > 0)) throw EmptyResult("cannot sample a mesh with zero surface area");

  CounterRng rng(seed);
  std::vector<SurfaceSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double pick = rng.uniform(3 * i) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), pick);
    std::size_t f = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
    // Skip zero-area faces that upper_bound can land on only at the end.
    while (f > 0 && cdf[f] == cdf[f - 1]) --f;
    const Face& t = mesh.faces[f];
    double r1 = std::sqrt(rng.uniform(3 * i + 1));
    double r2 = rng.uniform(3 * i + 2);
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    out[i] = {a * (1 - r1) + b * (r1 * (1 - r2)) + c * (r1 * r2), static_cast<std::uint32_t>(f)};
  }
  return out;
}

std::vector<Vec3> sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
  auto samples = sample_surface_with_faces(mesh, n, seed);
  std::vector<Vec3> points(samples.size());
  std::transform(samples.begin(), samples.end(), points.begin(), [](const SurfaceSample& s) { return s.point; });
  return points;
}

}  // namespace recompose
