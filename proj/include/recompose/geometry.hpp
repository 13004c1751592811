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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>

#include "recompose/error.hpp"

namespace recompose {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a * s; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  Vec3& operator+=(Vec3 b) { return *this = *this + b; }
  Vec3& operator-=(Vec3 b) { return *this = *this - b; }
  Vec3& operator*=(double s) { return *this = *this * s; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double length_sq(Vec3 a) { return dot(a, a); }
inline double length(Vec3 a) { return std::sqrt(dot(a, a)); }
constexpr double distance_sq(Vec3 a, Vec3 b) { return length_sq(a - b); }
inline double distance(Vec3 a, Vec3 b) { return std::sqrt(distance_sq(a, b)); }
inline Vec3 normalize(Vec3 a) {
  double l = length(a);
  return l > 0 ? a / l : Vec3{};
}
constexpr Vec3 min(Vec3 a, Vec3 b) {
  return {a.x < b.x ? a.x : b.x, a.y < b.y ? a.y : b.y, a.z < b.z ? a.z : b.z};
}
constexpr Vec3 max(Vec3 a, Vec3 b) {
  return {a.x > b.x ? a.x : b.x, a.y > b.y ? a.y : b.y, a.z > b.z ? a.z : b.z};
}
inline bool is_finite(Vec3 a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Axis-aligned box. A default-constructed box is empty (min > max) and grows
// with extend().
struct AABB {
  Vec3 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity()};
  Vec3 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};

  bool empty() const { return min.x > max.x || min.y > max.y || min.z > max.z; }
  void extend(Vec3 p) {
    min = recompose::min(min, p);
    max = recompose::max(max, p);
  }
  void extend(const AABB& b) {
    if (b.empty()) return;
    extend(b.min);
    extend(b.max);
  }
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return (min + max) * 0.5; }
  double longest_side() const {
    Vec3 e = extent();
    return std::max({e.x, e.y, e.z});
  }
};

AABB bounds_of(std::span<const Vec3> points);

// Closest point to p on triangle abc.
Vec3 closest_point_on_triangle(Vec3 p, Vec3 a, Vec3 b, Vec3 c);

// Row-major 4x4 homogeneous matrix whose last row is (0, 0, 0, 1).
class Transform3 {
 public:
  Transform3() = default;  // identity
  // Throws InvalidArgument unless the last row is (0,0,0,1).
  explicit Transform3(const std::array<double, 16>& m);

  static Transform3 identity() { return {}; }
  static Transform3 translation(Vec3 t);
  static Transform3 scaling(double s);
  static Transform3 scaling(Vec3 s);
  // Right-handed rotation about a unit axis through the origin.
  static Transform3 rotation(Vec3 axis, double radians);
  static Transform3 rotation_y(double radians) { return rotation({0, 1, 0}, radians); }

  double operator()(int row, int col) const { return m_[row * 4 + col]; }
  const std::array<double, 16>& matrix() const { return m_; }

  Vec3 apply_point(Vec3 p) const;
  Vec3 apply_vector(Vec3 v) const;
  Vec3 translation_part() const { return {m_[3], m_[7], m_[11]}; }

  double linear_determinant() const;
  bool invertible() const { return std::abs(linear_determinant()) > 1e-12; }
  // Throws SingularTransform when the linear block is not invertible.
  Transform3 inverse() const;
  // Cube root of |det| of the linear block.
  double uniform_scale() const;
  // Singular values of the linear block, descending.
  std::array<double, 3> singular_values() const;
  // Applies the inverse transpose of the linear block (normal transform).
  Vec3 apply_normal(Vec3 n) const;

  friend Transform3 operator*(const Transform3& a, const Transform3& b);
  friend bool operator==(const Transform3&, const Transform3&) = default;

 private:
  std::array<double, 16> m_{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
};

// Throws SingularTransform if t is not invertible.
void require_invertible(const Transform3& t, const char* what);

}  // namespace recompose
