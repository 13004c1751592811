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

#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "recompose/mesh.hpp"
#include "recompose/segmentation.hpp"
#include "recompose/shapes.hpp"

using namespace recompose;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "recompose_mesh_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("smallest valid OBJ") {
  TriMesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  CHECK(m.vertices.size() == 3);
  CHECK(m.faces.size() == 1);
  CHECK(m.mask.all_kept());
  CHECK_FALSE(m.has_colors());
}

TEST_CASE("OBJ syntax errors carry the line number") {
  try {
    parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse_obj("v 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n"), ParseError);
  CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n"), ParseError);
  CHECK_THROWS_AS(parse_obj("v 0 0 0 1 1 1\nv 1 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_obj("v nan 0 0\n"), ParseError);
}

TEST_CASE("degenerate faces are listed") {
  try {
    parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\nf 1 1 2\nf 3 2 3\n");
    FAIL("expected a degenerate-face error");
  } catch (const DegenerateFaceError& e) {
    CHECK(e.faces() == std::vector<std::size_t>{1, 2});
  }
}

TEST_CASE("OBJ extras: slashes, negative indices, ignored statements") {
  TriMesh m = parse_obj("# c\no thing\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\nf 1/1/1 2//1 -1\n");
  REQUIRE(m.faces.size() == 1);
  CHECK(m.faces[0] == Face{0, 1, 2});
}

TEST_CASE("unit cube round trip") {
  TriMesh cube = oracle::box({0, 0, 0}, {1, 1, 1});
  fs::path p = scratch("cube.obj");
  save_mesh(cube, p);
  TriMesh back = load_mesh(p);
  CHECK(back.vertices.size() == 8);
  CHECK(back.faces.size() == 12);
  CHECK(back.faces == cube.faces);
  CHECK(back.vertices == cube.vertices);
}

TEST_CASE("saved files use LF line endings") {
  std::string text = format_obj(oracle::box({0, 0, 0}, {1, 1, 1}));
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');
}

TEST_CASE("colors survive within 1/255") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  TriMesh m = oracle::box({0, 0, 0}, {1, 2, 3});
  for (std::size_t i = 0; i < m.vertices.size(); ++i) m.colors.push_back({u(rng), u(rng), u(rng)});
  TriMesh back = parse_obj(format_obj(m));
  REQUIRE(back.colors.size() == m.colors.size());
  for (std::size_t i = 0; i < m.colors.size(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(std::abs(back.colors[i][k] - m.colors[i][k]) <= 1.0 / 255);
}

TEST_CASE("generated torus round trip keeps counts and positions") {
  TriMesh torus = gen_shape(ShapeKind::Torus, {}, 3);
  fs::path p = scratch("torus.obj");
  save_mesh(torus, p);
  TriMesh back = load_mesh(p);
  CHECK(back.vertices.size() == torus.vertices.size());
  CHECK(back.faces == torus.faces);
  double worst = 0;
  for (std::size_t i = 0; i < torus.vertices.size(); ++i)
    worst = std::max(worst, distance(back.vertices[i], torus.vertices[i]));
  CHECK(worst <= 1e-6);
}

TEST_CASE("loading a missing file is an IO error") {
  CHECK_THROWS_AS(load_mesh(scratch("does_not_exist.obj")), IoError);
}

TEST_CASE("normalize a side-2 cube centered at (5,0,0)") {
  TriMesh cube = oracle::box({4, -1, -1}, {6, 1, 1});
  auto [n, back] = normalize_unit_bbox(cube);
  AABB b = bounds_of(n);
  CHECK(b.min == Vec3{-0.5, -0.5, -0.5});
  CHECK(b.max == Vec3{0.5, 0.5, 0.5});
  CHECK(back.uniform_scale() == doctest::Approx(2.0));
  CHECK(back.apply_point({0, 0, 0}) == Vec3{5, 0, 0});
  for (std::size_t i = 0; i < n.vertices.size(); ++i)
    CHECK(distance(back.apply_point(n.vertices[i]), cube.vertices[i]) < 1e-12);
}

TEST_CASE("normalizing a unit mesh only recenters it") {
  TriMesh cube = oracle::box({0, 0, 0}, {1, 1, 1});
  auto [n, back] = normalize_unit_bbox(cube);
  CHECK(back.uniform_scale() == doctest::Approx(1.0));
  CHECK(back.apply_point({0, 0, 0}) == Vec3{0.5, 0.5, 0.5});
}

TEST_CASE("normalization: bent tube has unit longest side and is idempotent") {
  TriMesh tube = gen_shape(ShapeKind::BentTube);
  auto once = normalize_unit_bbox(tube).first;
  auto [lo, hi] = oracle::bbox(once.vertices);
  double longest = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
  CHECK(std::abs(longest - 1.0) <= 1e-9);
  auto twice = normalize_unit_bbox(once).first;
  double worst = 0;
  for (std::size_t i = 0; i < once.vertices.size(); ++i) worst = std::max(worst, distance(once.vertices[i], twice.vertices[i]));
  CHECK(worst <= 1e-9);
}

TEST_CASE("normalizing a point cloud of coincident vertices fails") {
  TriMesh m({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}, {});
  CHECK_THROWS_AS(normalize_unit_bbox(m), InvalidArgument);
}

TEST_CASE("apply_transform") {
  TriMesh cube = oracle::box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
  SUBCASE("identity is bitwise equal") {
    CHECK(apply_transform(cube, Transform3{}).vertices == cube.vertices);
  }
  SUBCASE("translation of the origin") {
    TriMesh one({{0, 0, 0}}, {});
    CHECK(apply_transform(one, Transform3::translation({1, 0, 0})).vertices[0] == Vec3{1, 0, 0});
  }
  SUBCASE("rotating a centered cube by 90 degrees keeps its box") {
    TriMesh r = apply_transform(cube, Transform3::rotation({0, 1, 0}, std::numbers::pi / 2));
    AABB a = bounds_of(cube), b = bounds_of(r);
    CHECK(distance(a.min, b.min) < 1e-9);
    CHECK(distance(a.max, b.max) < 1e-9);
    CHECK(r.faces == cube.faces);
  }
  SUBCASE("singular transform") {
    CHECK_THROWS_AS(apply_transform(cube, Transform3::scaling({0, 1, 1})), SingularTransform);
  }
  SUBCASE("forward then inverse restores positions") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2, 2);
    TriMesh torus = gen_shape(ShapeKind::Torus);
    for (int trial = 0; trial < 10; ++trial) {
      Transform3 t = Transform3::translation({u(rng), u(rng), u(rng)}) *
                     Transform3::rotation({u(rng), u(rng), 1}, u(rng)) *
                     Transform3::scaling({1 + std::abs(u(rng)), 1, 0.5 + std::abs(u(rng))});
      TriMesh back = apply_transform(apply_transform(torus, t), t.inverse());
      for (std::size_t i = 0; i < torus.vertices.size(); ++i) CHECK(distance(back.vertices[i], torus.vertices[i]) < 1e-6);
    }
  }
}

TEST_CASE("extract_submesh") {
  TriMesh sphere = gen_shape(ShapeKind::Sphere, {.subdivisions = 3});
  SUBCASE("all kept gives the same mesh") {
    TriMesh sub = extract_submesh(sphere);
    CHECK(sub.vertices == sphere.vertices);
    CHECK(sub.faces == sphere.faces);
  }
  SUBCASE("nothing kept is an error") {
    TriMesh m = sphere;
    m.mask = set_all(m, false);
    CHECK_THROWS_AS(extract_submesh(m), EmptyResult);
  }
  SUBCASE("upper hemisphere") {
    TriMesh m = sphere;
    BrushStroke keep_top{{{0, 0, 0.5}}, 0.6, BrushMode::Keep};
    m.mask = set_all(m, false);
    m.mask = apply_stroke(m, keep_top, Transform3{});
    TriMesh sub = extract_submesh(m);
    CHECK(sub.faces.size() > 0);
    CHECK(sub.faces.size() < sphere.faces.size());
    // Oracle: faces whose three corners pass the kept predicate.
    std::size_t expected = 0;
    for (const Face& f : sphere.faces) {
      bool all = true;
      for (int k = 0; k < 3; ++k) all = all && distance_sq(sphere.vertices[f[k]], {0, 0, 0.5}) <= 0.6 * 0.6;
      expected += all;
    }
    CHECK(sub.faces.size() == expected);
    for (std::size_t f = 0; f < sub.faces.size(); ++f) {
      const Face& face = sub.faces[f];
      Vec3 c = (sub.vertices[face[0]] + sub.vertices[face[1]] + sub.vertices[face[2]]) / 3.0;
      CHECK(c.z > -1e-6);
    }
  }
  SUBCASE("no face references a dropped vertex") {
    TriMesh m = sphere;
    std::mt19937_64 rng(1);
    BrushStroke drop{{{0.5, 0, 0}, {0, 0.5, 0}}, 0.3, BrushMode::Drop};
    m.mask = apply_stroke(m, drop, Transform3{});
    TriMesh sub = extract_submesh(m);
    for (const Face& f : sub.faces)
      for (int k = 0; k < 3; ++k) CHECK(f[k] < sub.vertices.size());
    // Every surviving vertex was kept in the source.
    std::size_t kept = m.mask.kept_count();
    CHECK(sub.vertices.size() == kept);
  }
}

TEST_CASE("merge keeps colors only when every part has them") {
  TriMesh a = oracle::box({0, 0, 0}, {1, 1, 1}), b = oracle::box({2, 0, 0}, {3, 1, 1});
  std::vector<TriMesh> parts{a, b};
  TriMesh m = merge_meshes(parts);
  CHECK(m.vertices.size() == 16);
  CHECK(m.faces.size() == 24);
  CHECK(is_watertight(m));
  CHECK_FALSE(m.has_colors());
}

TEST_CASE("watertightness and Euler characteristic of a box") {
  TriMesh cube = oracle::box({0, 0, 0}, {1, 1, 1});
  CHECK(is_watertight(cube));
  CHECK(euler_characteristic(cube) == 2);
  TriMesh open = cube;
  open.faces.pop_back();
  CHECK_FALSE(is_watertight(open));
  CHECK(surface_area(cube) == doctest::Approx(6.0));
}
