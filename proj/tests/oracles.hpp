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

// Independent reference computations the tests compare the library against.
// Nothing here calls into the code under test beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "recompose/decoder.hpp"
#include "recompose/mesh.hpp"

namespace oracle {

using recompose::Vec3;

// O(n^2) symmetric Chamfer: sum of the two directional means.
inline double chamfer_sq(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto directional = [](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    double sum = 0;
    for (const Vec3& p : from) {
      double best = INFINITY;
      for (const Vec3& q : to) {
        double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
        best = std::min(best, dx * dx + dy * dy + dz * dz);
      }
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return directional(a, b) + directional(b, a);
}

// Student t CDF by composite Simpson integration of the density from 0.
inline double t_cdf(double t, double nu) {
  const double log_c = std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2) - 0.5 * std::log(nu * M_PI);
  auto pdf = [&](double x) { return std::exp(log_c - (nu + 1) / 2 * std::log1p(x * x / nu)); };
  const int n = 20000;
  double h = std::abs(t) / n, s = pdf(0) + pdf(std::abs(t));
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * pdf(i * h);
  double half = s * h / 3;
  return t >= 0 ? 0.5 + half : 0.5 - half;
}

// Upper 2.5% point by bisection on t_cdf.
inline double t_975(double nu) {
  double lo = 0, hi = 100;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (t_cdf(mid, nu) < 0.975 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline std::pair<double, double> ci95(const std::vector<double>& v, double t) {
  double n = static_cast<double>(v.size());
  long double mean = 0;
  for (double x : v) mean += x;
  mean /= n;
  long double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {static_cast<double>(mean), static_cast<double>(t * std::sqrt(ss / (n - 1)) / std::sqrt(n))};
}

// Connected components of a mesh, faces joined through shared vertices.
inline int mesh_components(const recompose::TriMesh& m) {
  std::vector<std::uint32_t> parent(m.vertices.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<char> used(m.vertices.size(), 0);
  for (const auto& f : m.faces) {
    for (int k = 0; k < 3; ++k) used[f[k]] = 1;
    parent[find(f[0])] = find(f[1]);
    parent[find(f[1])] = find(f[2]);
  }
  int count = 0;
  for (std::uint32_t i = 0; i < parent.size(); ++i) count += used[i] && find(i) == i;
  return count;
}

// 6-connected components of an occupancy grid.
inline int grid_components(const recompose::OccupancyGrid& g) {
  const int r = g.resolution;
  std::vector<int> label(g.occupied.size(), 0);
  int count = 0;
  std::vector<std::array<int, 3>> stack;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) {
        if (!g.at(i, j, k) || label[g.index(i, j, k)]) continue;
        ++count;
        stack.push_back({i, j, k});
        label[g.index(i, j, k)] = count;
        while (!stack.empty()) {
          auto [a, b, c] = stack.back();
          stack.pop_back();
          const int d[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
          for (const auto& o : d) {
            int x = a + o[0], y = b + o[1], z = c + o[2];
            if (!g.at(x, y, z) || label[g.index(x, y, z)]) continue;
            label[g.index(x, y, z)] = count;
            stack.push_back({x, y, z});
          }
        }
      }
  return count;
}

inline std::vector<Vec3> random_points(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Vec3> out(n);
  for (auto& p : out) p = {u(rng), u(rng), u(rng)};
  return out;
}

// Axis-aligned box mesh with outward winding.
inline recompose::TriMesh box(Vec3 lo, Vec3 hi) {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) v.push_back({i & 1 ? hi.x : lo.x, i & 2 ? hi.y : lo.y, i & 4 ? hi.z : lo.z});
  std::vector<recompose::Face> f = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                                    {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return recompose::TriMesh(std::move(v), std::move(f));
}

inline std::pair<Vec3, Vec3> bbox(const std::vector<Vec3>& pts) {
  Vec3 lo{INFINITY, INFINITY, INFINITY}, hi{-INFINITY, -INFINITY, -INFINITY};
  for (const Vec3& p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  return {lo, hi};
}

}  // namespace oracle
