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

#include "recompose/shapes.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <tuple>

#include "recompose/sampling.hpp"

namespace recompose {

namespace {

constexpr double kPi = std::numbers::pi;

double positive(std::optional<double> v, double fallback, const char* name) {
  double x = v.value_or(fallback);
  if (!(x > 0) || !std::isfinite(x)) throw InvalidArgument(std::string(name) + " must be positive");
  return x;
}

int at_least(std::optional<int> v, int fallback, int lo, const char* name) {
  int x = v.value_or(fallback);
  if (x < lo) throw InvalidArgument(std::string(name) + " must be at least " + std::to_string(lo));
  return x;
}

double seed_phase(std::uint64_t seed) { return seed == 0 ? 0.0 : CounterRng(seed, 0x5eed).uniform(0); }

// Tube around a polyline of ring centers, closed by a pole vertex at each end.
// frames[k] = (center, normal, binormal, radius); the ring is
// center + radius * (cos(a) normal + sin(a) binormal).
struct Ring {
  Vec3 center, normal, binormal;
  double radius;
};

TriMesh pole_tube(Vec3 start_pole, Vec3 end_pole, const std::vector<Ring>& rings, int segments,
                  double phase) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  v.push_back(start_pole);
  for (const Ring& r : rings) {
    for (int s = 0; s < segments; ++s) {
      double a = 2 * kPi * (s + phase) / segments;
      v.push_back(r.center + (r.normal * std::cos(a) + r.binormal * std::sin(a)) * r.radius);
    }
  }
  v.push_back(end_pole);
  auto ring_vertex = [&](std::size_t k, int s) {
    return static_cast<std::uint32_t>(1 + k * segments + (s % segments));
  };
  auto last = static_cast<std::uint32_t>(v.size() - 1);
  // Orientation: the tube runs along t = normal x binormal.
  for (int s = 0; s < segments; ++s) f.push_back({0, ring_vertex(0, s + 1), ring_vertex(0, s)});
  for (std::size_t k = 0; k + 1 < rings.size(); ++k) {
    for (int s = 0; s < segments; ++s) {
      std::uint32_t a = ring_vertex(k, s), b = ring_vertex(k, s + 1);
      std::uint32_t c = ring_vertex(k + 1, s), d = ring_vertex(k + 1, s + 1);
      f.push_back({a, b, d});
      f.push_back({a, d, c});
    }
  }
  std::size_t k = rings.size() - 1;
  for (int s = 0; s < segments; ++s) f.push_back({last, ring_vertex(k, s), ring_vertex(k, s + 1)});
  return TriMesh(std::move(v), std::move(f));
}

TriMesh make_capsule(const ShapeParams& p, double phase) {
  double length = positive(p.length, 1.0, "length");
  double radius = positive(p.radius, 0.05, "radius");
  if (2 * radius > length) throw InvalidArgument("capsule radius exceeds half its length");
  int segments = at_least(p.segments, 32, 3, "segments");
  int cap_rings = at_least(p.rings, 8, 2, "rings");
  double half_body = length / 2 - radius;
  int body_rings = std::max(1, static_cast<int>(std::ceil(2 * half_body / (2 * kPi * radius / segments))));
  body_rings = std::min(body_rings, 256);

  // Axis along +x; normal = y, binormal = z so normal x binormal = +x.
  std::vector<Ring> rings;
  const Vec3 n{0, 1, 0}, b{0, 0, 1};
  for (int i = 1; i < cap_rings; ++i) {
    double a = kPi / 2 * i / cap_rings;  // from the -x pole
    rings.push_back({{-half_body - radius * std::cos(a), 0, 0}, n, b, radius * std::sin(a)});
  }
  for (int i = 0; i <= body_rings; ++i)
    rings.push_back({{-half_body + 2 * half_body * i / body_rings, 0, 0}, n, b, radius});
  if (half_body == 0) rings.pop_back();
  for (int i = cap_rings - 1; i >= 1; --i) {
    double a = kPi / 2 * i / cap_rings;
    rings.push_back({{half_body + radius * std::cos(a), 0, 0}, n, b, radius * std::sin(a)});
  }
  return pole_tube({-length / 2, 0, 0}, {length / 2, 0, 0}, rings, segments, phase);
}

TriMesh make_bent_tube(const ShapeParams& p, double phase) {
  double length = positive(p.length, 1.0, "length");
  double radius = positive(p.radius, 0.09, "radius");
  double bend = positive(p.bend_degrees, 100.0, "bend_degrees") * kPi / 180;
  if (bend >= 2 * kPi) throw InvalidArgument("bend_degrees must be below 360");
  int segments = at_least(p.segments, 32, 3, "segments");
  int steps = at_least(p.rings, 64, 4, "rings");
  // Arc of the given angle whose arc length is `length`, bending toward +y.
  double arc_radius = length / bend;
  auto center = [&](double t) {
    double a = (t - 0.5) * bend;
    return Vec3{arc_radius * std::sin(a), arc_radius * (1 - std::cos(a)), 0};
  };
  auto tangent = [&](double t) {
    double a = (t - 0.5) * bend;
    return Vec3{std::cos(a), std::sin(a), 0};
  };
  std::vector<Ring> rings;
  for (int i = 1; i < steps; ++i) {
    double t = static_cast<double>(i) / steps;
    Vec3 tan = tangent(t);
    Vec3 b{0, 0, 1};
    Vec3 n = cross(b, tan);  // n x b = tan
    double r = radius * std::pow(std::sin(kPi * t), 0.5);
    rings.push_back({center(t), n, b, r});
  }
  return pole_tube(center(0), center(1), rings, segments, phase);
}

TriMesh make_torus(double major, double minor, int segments, int rings, double phase) {
  if (!(minor < major)) throw InvalidArgument("torus minor radius must be smaller than the major radius");
  std::vector<Vec3> v;
  std::vector<Face> f;
  // Lies in the xz-plane, symmetric about y.
  for (int i = 0; i < segments; ++i) {
    double u = 2 * kPi * (i + phase) / segments;
    for (int j = 0; j < rings; ++j) {
      double w = 2 * kPi * j / rings;
      double rho = major + minor * std::cos(w);
      v.push_back({rho * std::cos(u), minor * std::sin(w), -rho * std::sin(u)});
    }
  }
  auto id = [&](int i, int j) { return static_cast<std::uint32_t>((i % segments) * rings + (j % rings)); };
  for (int i = 0; i < segments; ++i) {
    for (int j = 0; j < rings; ++j) {
      std::uint32_t a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      f.push_back({a, b, c});
      f.push_back({a, c, d});
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh make_icosphere(double radius, int levels, double phase) {
  const double t = (1 + std::sqrt(5.0)) / 2;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                         {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                         {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                         {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (Vec3& p : v) p = normalize(p);
  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      auto key = std::minmax(a, b);
      auto [it, inserted] = midpoints.try_emplace({key.first, key.second}, 0);
      if (inserted) {
        it->second = static_cast<std::uint32_t>(v.size());
        v.push_back(normalize((v[a] + v[b]) * 0.5));
      }
      return it->second;
    };
    std::vector<Face> next;
    next.reserve(f.size() * 4);
    for (const Face& tri : f) {
      std::uint32_t ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]), ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  Transform3 spin = Transform3::rotation_y(2 * kPi * phase);
  for (Vec3& p : v) p = spin.apply_vector(p) * radius;
  return TriMesh(std::move(v), std::move(f));
}

// Boundary of a union of cells on a rectilinear lattice. Cells sharing only
// an edge or corner would make the surface non-manifold; callers avoid that.
TriMesh make_polycube(const std::vector<double>& xs, const std::vector<double>& ys,
                      const std::vector<double>& zs, const std::vector<std::uint8_t>& filled) {
  const int nx = static_cast<int>(xs.size()) - 1, ny = static_cast<int>(ys.size()) - 1,
            nz = static_cast<int>(zs.size()) - 1;
  auto cell = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) return false;
    return filled[(static_cast<std::size_t>(k) * ny + j) * nx + i] != 0;
  };
  std::map<std::tuple<int, int, int>, std::uint32_t> lattice;
  std::vector<Vec3> v;
  std::vector<Face> f;
  auto vid = [&](int i, int j, int k) {
    auto [it, inserted] = lattice.try_emplace({i, j, k}, 0);
    if (inserted) {
      it->second = static_cast<std::uint32_t>(v.size());
      v.push_back({xs[i], ys[j], zs[k]});
    }
    return it->second;
  };
  auto quad = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    f.push_back({a, b, c});
    f.push_back({a, c, d});
  };
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (!cell(i, j, k)) continue;
        if (!cell(i - 1, j, k)) quad(vid(i, j, k), vid(i, j, k + 1), vid(i, j + 1, k + 1), vid(i, j + 1, k));
        if (!cell(i + 1, j, k))
          quad(vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i + 1, j + 1, k + 1), vid(i + 1, j, k + 1));
        if (!cell(i, j - 1, k)) quad(vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j, k + 1), vid(i, j, k + 1));
        if (!cell(i, j + 1, k))
          quad(vid(i, j + 1, k), vid(i, j + 1, k + 1), vid(i + 1, j + 1, k + 1), vid(i + 1, j + 1, k));
        if (!cell(i, j, k - 1)) quad(vid(i, j, k), vid(i, j + 1, k), vid(i + 1, j + 1, k), vid(i + 1, j, k));
        if (!cell(i, j, k + 1))
          quad(vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j + 1, k + 1), vid(i, j + 1, k + 1));
      }
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

std::vector<double> uniform_breaks(double lo, double hi, int n) {
  std::vector<double> out(n + 1);
  for (int i = 0; i <= n; ++i) out[i] = lo + (hi - lo) * i / n;
  out[n] = hi;
  return out;
}

TriMesh make_box(const ShapeParams& p) {
  Vec3 size = p.size.value_or(Vec3{1, 1, 1});
  for (int a = 0; a < 3; ++a)
    if (!(size[a] > 0)) throw InvalidArgument("box size must be positive");
  int per_side = at_least(p.subdivisions, 8, 1, "subdivisions");
  double longest = std::max({size.x, size.y, size.z});
  auto cells = [&](double s) { return std::max(1, static_cast<int>(std::lround(per_side * s / longest))); };
  int nx = cells(size.x), ny = cells(size.y), nz = cells(size.z);
  std::vector<std::uint8_t> filled(static_cast<std::size_t>(nx) * ny * nz, 1);
  return make_polycube(uniform_breaks(-size.x / 2, size.x / 2, nx), uniform_breaks(-size.y / 2, size.y / 2, ny),
                       uniform_breaks(-size.z / 2, size.z / 2, nz), filled);
}

// Interlocking brick: a body of studs_x x studs_z unit pitches with a square
// stud centered on each pitch.
TriMesh make_block(const ShapeParams& p) {
  int sx = at_least(p.studs_x, 4, 1, "studs_x");
  int sz = at_least(p.studs_z, 2, 1, "studs_z");
  Vec3 size = p.size.value_or(Vec3{sx * 0.25, 0.3, sz * 0.25});
  for (int a = 0; a < 3; ++a)
    if (!(size[a] > 0)) throw InvalidArgument("block size must be positive");
  double pitch_x = size.x / sx, pitch_z = size.z / sz;
  double stud_h = 0.25 * std::min(pitch_x, pitch_z);
  auto breaks = [](double lo, double pitch, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
      double b = lo + i * pitch;
      out.insert(out.end(), {b, b + 0.2 * pitch, b + 0.8 * pitch});
    }
    out.push_back(lo + n * pitch);
    return out;
  };
  std::vector<double> xs = breaks(-size.x / 2, pitch_x, sx);
  std::vector<double> zs = breaks(-size.z / 2, pitch_z, sz);
  std::vector<double> ys = {-size.y / 2, size.y / 2, size.y / 2 + stud_h};
  const int nx = static_cast<int>(xs.size()) - 1, nz = static_cast<int>(zs.size()) - 1;
  std::vector<std::uint8_t> filled(static_cast<std::size_t>(nx) * 2 * nz, 0);
  for (int k = 0; k < nz; ++k) {
    for (int i = 0; i < nx; ++i) {
      filled[(static_cast<std::size_t>(k) * 2 + 0) * nx + i] = 1;
      filled[(static_cast<std::size_t>(k) * 2 + 1) * nx + i] = (i % 3 == 1 && k % 3 == 1) ? 1 : 0;
    }
  }
  return make_polycube(xs, ys, zs, filled);
}

}  // namespace

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Elongated: return "elongated";
    case ShapeKind::BentTube: return "bent_tube";
    case ShapeKind::Torus: return "torus";
    case ShapeKind::ThinRing: return "thin_ring";
    case ShapeKind::Sphere: return "sphere";
    case ShapeKind::Box: return "box";
    case ShapeKind::Block: return "block";
  }
  return "unknown";
}

ShapeKind shape_kind_from_string(std::string_view name) {
  for (ShapeKind k : {ShapeKind::Elongated, ShapeKind::BentTube, ShapeKind::Torus, ShapeKind::ThinRing,
                      ShapeKind::Sphere, ShapeKind::Box, ShapeKind::Block})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown shape kind '" + std::string(name) + "'");
}

TriMesh gen_shape(ShapeKind kind, const ShapeParams& p, std::uint64_t seed) {
  double phase = seed_phase(seed);
  TriMesh mesh;
  switch (kind) {
    case ShapeKind::Elongated: mesh = make_capsule(p, phase); break;
    case ShapeKind::BentTube: mesh = make_bent_tube(p, phase); break;
    case ShapeKind::Torus:
      mesh = make_torus(positive(p.major_radius, 0.4, "major_radius"), positive(p.minor_radius, 0.1, "minor_radius"),
                        at_least(p.segments, 64, 3, "segments"), at_least(p.rings, 24, 3, "rings"), phase);
      break;
    case ShapeKind::ThinRing:
      mesh = make_torus(positive(p.major_radius, 0.45, "major_radius"),
                        positive(p.minor_radius, 0.035, "minor_radius"), at_least(p.segments, 96, 3, "segments"),
                        at_least(p.rings, 12, 3, "rings"), phase);
      break;
    case ShapeKind::Sphere:
      mesh = make_icosphere(positive(p.radius, 0.5, "radius"), at_least(p.subdivisions, 4, 0, "subdivisions"), phase);
      break;
    case ShapeKind::Box: mesh = make_box(p); break;
    case ShapeKind::Block: mesh = make_block(p); break;
  }
  if (p.color) {
    for (int a = 0; a < 3; ++a)
      if ((*p.color)[a] < 0 || (*p.color)[a] > 1) throw InvalidArgument("color components must lie in [0,1]");
    mesh.colors.assign(mesh.vertices.size(), *p.color);
  }
  return mesh;
}

double signed_volume(const TriMesh& mesh) {
  double v = 0;
  for (const Face& f : mesh.faces)
    v += dot(mesh.vertices[f[0]], cross(mesh.vertices[f[1]], mesh.vertices[f[2]]));
  return v / 6;
}

}  // namespace recompose
