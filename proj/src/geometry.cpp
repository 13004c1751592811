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

#include "recompose/geometry.hpp"

#include <numbers>
#include <string>

namespace recompose {

DegenerateFaceError::DegenerateFaceError(std::vector<std::size_t> faces)
    : Error([&] {
        std::string msg = "degenerate faces:";
        for (std::size_t i = 0; i < faces.size() && i < 32; ++i) msg += " " + std::to_string(faces[i]);
        if (faces.size() > 32) msg += " ... (" + std::to_string(faces.size()) + " total)";
        return msg;
      }()),
      faces_(std::move(faces)) {}

AABB bounds_of(std::span<const Vec3> points) {
  AABB box;
  for (const Vec3& p : points) box.extend(p);
  return box;
}

Vec3 closest_point_on_triangle(Vec3 p, Vec3 a, Vec3 b, Vec3 c) {
  // Voronoi-region walk (Ericson, Real-Time Collision Detection 5.1.5).
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return a;
  Vec3 bp = p - b;
  double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return b;
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
  Vec3 cp = p - c;
  double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return c;
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  double denom = 1 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

Transform3::Transform3(const std::array<double, 16>& m) : m_(m) {
  if (m[12] != 0 || m[13] != 0 || m[14] != 0 || m[15] != 1)
    throw InvalidArgument("transform last row must be (0, 0, 0, 1)");
  for (double v : m)
    if (!std::isfinite(v)) throw InvalidArgument("transform has non-finite entries");
}

Transform3 Transform3::translation(Vec3 t) {
  Transform3 r;
  r.m_[3] = t.x;
  r.m_[7] = t.y;
  r.m_[11] = t.z;
  return r;
}

Transform3 Transform3::scaling(double s) { return scaling(Vec3{s, s, s}); }

Transform3 Transform3::scaling(Vec3 s) {
  Transform3 r;
  r.m_[0] = s.x;
  r.m_[5] = s.y;
  r.m_[10] = s.z;
  return r;
}

Transform3 Transform3::rotation(Vec3 axis, double radians) {
  Vec3 a = normalize(axis);
  double c = std::cos(radians), s = std::sin(radians), t = 1 - c;
  Transform3 r;
  r.m_ = {t * a.x * a.x + c,       t * a.x * a.y - s * a.z, t * a.x * a.z + s * a.y, 0,
          t * a.x * a.y + s * a.z, t * a.y * a.y + c,       t * a.y * a.z - s * a.x, 0,
          t * a.x * a.z - s * a.y, t * a.y * a.z + s * a.x, t * a.z * a.z + c,       0,
          0,                       0,                       0,                       1};
  return r;
}

Vec3 Transform3::apply_point(Vec3 p) const {
  return {m_[0] * p.x + m_[1] * p.y + m_[2] * p.z + m_[3],
          m_[4] * p.x + m_[5] * p.y + m_[6] * p.z + m_[7],
          m_[8] * p.x + m_[9] * p.y + m_[10] * p.z + m_[11]};
}

Vec3 Transform3::apply_vector(Vec3 v) const {
  return {m_[0] * v.x + m_[1] * v.y + m_[2] * v.z, m_[4] * v.x + m_[5] * v.y + m_[6] * v.z,
          m_[8] * v.x + m_[9] * v.y + m_[10] * v.z};
}

double Transform3::linear_determinant() const {
  const auto& m = m_;
  return m[0] * (m[5] * m[10] - m[6] * m[9]) - m[1] * (m[4] * m[10] - m[6] * m[8]) +
         m[2] * (m[4] * m[9] - m[5] * m[8]);
}

Transform3 Transform3::inverse() const {
  double det = linear_determinant();
  if (!(std::abs(det) > 1e-12)) throw SingularTransform("transform is not invertible");
  const auto& m = m_;
  double inv_det = 1.0 / det;
  // Adjugate of the 3x3 block.
  std::array<double, 9> a{
      (m[5] * m[10] - m[6] * m[9]) * inv_det, (m[2] * m[9] - m[1] * m[10]) * inv_det,
      (m[1] * m[6] - m[2] * m[5]) * inv_det,  (m[6] * m[8] - m[4] * m[10]) * inv_det,
      (m[0] * m[10] - m[2] * m[8]) * inv_det, (m[2] * m[4] - m[0] * m[6]) * inv_det,
      (m[4] * m[9] - m[5] * m[8]) * inv_det,  (m[1] * m[8] - m[0] * m[9]) * inv_det,
      (m[0] * m[5] - m[1] * m[4]) * inv_det};
  Vec3 t{m[3], m[7], m[11]};
  Transform3 r;
  r.m_ = {a[0], a[1], a[2], -(a[0] * t.x + a[1] * t.y + a[2] * t.z),
          a[3], a[4], a[5], -(a[3] * t.x + a[4] * t.y + a[5] * t.z),
          a[6], a[7], a[8], -(a[6] * t.x + a[7] * t.y + a[8] * t.z),
          0,    0,    0,    1};
  return r;
}

double Transform3::uniform_scale() const { return std::cbrt(std::abs(linear_determinant())); }

std::array<double, 3> Transform3::singular_values() const {
  // Eigenvalues of A^T A by the closed-form symmetric 3x3 solver.
  const auto& m = m_;
  double b[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      b[i][j] = m[0 * 4 + i] * m[0 * 4 + j] + m[1 * 4 + i] * m[1 * 4 + j] + m[2 * 4 + i] * m[2 * 4 + j];
  double p1 = b[0][1] * b[0][1] + b[0][2] * b[0][2] + b[1][2] * b[1][2];
  std::array<double, 3> eig;
  if (p1 <= 1e-30 * (b[0][0] * b[0][0] + b[1][1] * b[1][1] + b[2][2] * b[2][2])) {
    eig = {b[0][0], b[1][1], b[2][2]};
  } else {
    double q = (b[0][0] + b[1][1] + b[2][2]) / 3;
    double p2 = (b[0][0] - q) * (b[0][0] - q) + (b[1][1] - q) * (b[1][1] - q) +
                (b[2][2] - q) * (b[2][2] - q) + 2 * p1;
    double p = std::sqrt(p2 / 6);
    double c[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c[i][j] = (b[i][j] - (i == j ? q : 0)) / p;
    double r = (c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1]) -
                c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0]) +
                c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0])) /
               2;
    r = std::clamp(r, -1.0, 1.0);
    double phi = std::acos(r) / 3;
    eig[0] = q + 2 * p * std::cos(phi);
    eig[2] = q + 2 * p * std::cos(phi + 2 * std::numbers::pi / 3);
    eig[1] = 3 * q - eig[0] - eig[2];
  }
  std::sort(eig.begin(), eig.end(), std::greater<>());
  for (double& e : eig) e = std::sqrt(std::max(e, 0.0));
  return eig;
}

Vec3 Transform3::apply_normal(Vec3 n) const {
  Transform3 inv = inverse();
  // Multiply by the transpose of inv's linear block.
  return {inv.m_[0] * n.x + inv.m_[4] * n.y + inv.m_[8] * n.z,
          inv.m_[1] * n.x + inv.m_[5] * n.y + inv.m_[9] * n.z,
          inv.m_[2] * n.x + inv.m_[6] * n.y + inv.m_[10] * n.z};
}

Transform3 operator*(const Transform3& a, const Transform3& b) {
  Transform3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      double s = 0;
      for (int k = 0; k < 4; ++k) s += a.m_[i * 4 + k] * b.m_[k * 4 + j];
      r.m_[i * 4 + j] = s;
    }
  }
  return r;
}

void require_invertible(const Transform3& t, const char* what) {
  if (!t.invertible()) throw SingularTransform(std::string(what) + ": transform is not invertible");
}

}  // namespace recompose
