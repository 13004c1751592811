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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "doctest.h"
#include "recompose/bench.hpp"

using namespace recompose;

namespace {

// Small settings so a whole sweep runs in seconds.
SweepSpec quick_spec(SweepKind kind) {
  SweepSpec s;
  s.kind = kind;
  s.steps = 3;
  s.compose_resolution = 24;
  s.chamfer_samples = 400;
  s.iou_resolution = 96;
  s.workers = 1;
  return s;
}

SweepResult synthetic_result(SweepKind kind, int steps, bool constant) {
  SweepResult r;
  r.kind = kind;
  auto params = sweep_parameters(kind, steps);
  auto pairs = enumerate_pairs(default_categories());
  int n = 0;
  for (auto [a, b] : pairs)
    for (int s = 0; s < steps; ++s, ++n) {
      SweepCell c;
      c.anchor = a;
      c.other = b;
      c.step = s;
      c.param = params[s];
      c.ok = constant || n % 97 != 5;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      c.chamfer_sq = c.ok ? (constant ? 0.25 : 1e-3 * (1 + s) + 1e-5 * n / 3.0) : nan;
      c.iou = c.ok ? (constant ? 0.5 : 1.0 / (2 + s + n % 7)) : nan;
      if (!c.ok) c.error = "synthetic";
      r.cells.push_back(c);
    }
  r.steps = aggregate_steps(r.cells, params);
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("five categories give 25 ordered pairs") {
  auto pairs = enumerate_pairs(default_categories());
  REQUIRE(pairs.size() == 25);
  CHECK(pairs.front() == std::pair{ShapeKind::Elongated, ShapeKind::Elongated});
  CHECK(std::find(pairs.begin(), pairs.end(), std::pair{ShapeKind::Torus, ShapeKind::Torus}) != pairs.end());
  std::set<std::pair<ShapeKind, ShapeKind>> unique(pairs.begin(), pairs.end());
  CHECK(unique.size() == 25);
  std::vector<ShapeKind> four(default_categories().begin(), default_categories().begin() + 4);
  CHECK_THROWS_AS(enumerate_pairs(four), InvalidArgument);
}

TEST_CASE("sweep parameters follow the protocol ranges") {
  auto t = sweep_parameters(SweepKind::Translation, 33);
  REQUIRE(t.size() == 33);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 5.0);
  for (int i = 0; i < 33; ++i) CHECK(t[i] == doctest::Approx(5.0 * i / 32));

  auto r = sweep_parameters(SweepKind::Rotation, 33);
  CHECK(r.front() == -180.0);
  CHECK(r.back() == 180.0);
  CHECK(r[16] == doctest::Approx(0).scale(1));

  auto s = sweep_parameters(SweepKind::Scale, 33);
  CHECK(s.front() == doctest::Approx(0.1));
  CHECK(s.back() == doctest::Approx(10));
  CHECK(s[16] == doctest::Approx(1.0));
  for (int i = 1; i < 33; ++i) CHECK(s[i] / s[i - 1] == doctest::Approx(std::pow(100.0, 1.0 / 32)));

  CHECK_THROWS_AS(sweep_parameters(SweepKind::Translation, 1), InvalidArgument);
}

TEST_CASE("sweep placements") {
  Transform3 t = sweep_transform(SweepKind::Translation, 2.0, 1.8);
  Vec3 p = t.apply_point({0, 0, 0});
  CHECK(p.x == doctest::Approx(3.8));
  Transform3 r = sweep_transform(SweepKind::Rotation, 90, 1.8);
  Vec3 q = r.apply_point({1, 0, 0});
  CHECK(q.x == doctest::Approx(1.8));
  CHECK(q.z == doctest::Approx(-1));
  Transform3 s = sweep_transform(SweepKind::Scale, 10, 1.8);
  CHECK(s.apply_point({0, 0, 0}).x == doctest::Approx(1.8));
  CHECK(s.uniform_scale() == doctest::Approx(10));
}

TEST_CASE("sweep kind names") {
  for (SweepKind k : {SweepKind::Translation, SweepKind::Rotation, SweepKind::Scale})
    CHECK(sweep_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(sweep_kind_from_string("shear"), InvalidArgument);
}

TEST_CASE("aggregation ignores failed cells") {
  std::vector<SweepCell> cells(4);
  for (int i = 0; i < 4; ++i) {
    cells[i].step = i < 3 ? 0 : 1;
    cells[i].ok = i != 2;
    cells[i].chamfer_sq = i + 1;
    cells[i].iou = 0.5;
  }
  std::vector<double> params{0.0, 1.0};
  auto agg = aggregate_steps(cells, params);
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].n_valid == 2);
  CHECK(agg[0].mean_chamfer_sq == 1.5);
  CHECK(agg[0].ci_chamfer_sq == doctest::Approx(12.706204736432095 * std::sqrt(0.5) / std::sqrt(2.0)));
  CHECK(agg[0].ci_iou == 0.0);
  CHECK(agg[1].n_valid == 1);
  CHECK(agg[1].mean_chamfer_sq == 4.0);
  CHECK(std::isnan(agg[1].ci_chamfer_sq));
}

TEST_CASE("CSV has the documented header and row counts and round-trips") {
  SweepResult r = synthetic_result(SweepKind::Scale, 33, false);
  std::string csv = format_csv(r);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "sweep_kind,anchor,other,step,param_value,chamfer_sq,iou,status,"
                  "mean_chamfer_sq,ci_chamfer_sq,mean_iou,ci_iou,n_valid");
  int detail = 0, aggregate = 0, failed = 0;
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("scale,*,*,", 0) == 0) ++aggregate;
    else ++detail;
    if (line.find(",failed,") != std::string::npos) ++failed;
  }
  CHECK(detail == 825);
  CHECK(aggregate == 33);
  CHECK(failed > 0);
  SweepResult back = parse_csv(csv);
  CHECK(back == r);
  CHECK(format_csv(back) == csv);
  CHECK_THROWS_AS(parse_csv("not,a,header\n"), ParseError);
  CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\nscale,sphere\n"), ParseError);
}

TEST_CASE("emit_csv and emit_plot write files") {
  auto dir = std::filesystem::temp_directory_path() / "recompose_bench_test";
  std::filesystem::remove_all(dir);
  SweepResult r = synthetic_result(SweepKind::Translation, 5, false);
  emit_csv(r, dir / "sub" / "t.csv");
  CHECK(parse_csv(slurp(dir / "sub" / "t.csv")) == r);
  auto files = emit_plot(r, dir);
  REQUIRE(files.size() == 2);
  CHECK(files[0].filename() == "translation_chamfer_sq.svg");
  CHECK(files[1].filename() == "translation_iou.svg");
  for (const auto& f : files) {
    std::string svg = slurp(f);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("<polygon") != std::string::npos);
  }
}

TEST_CASE("plot of a constant result is flat with a zero-height band") {
  SweepResult r = synthetic_result(SweepKind::Rotation, 5, true);
  std::string svg = render_plot_svg(r, false);
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex("<polyline[^>]*points=\"([^\"]*)\"")));
  std::set<std::string> ys;
  std::istringstream pts(m[1].str());
  for (std::string xy; pts >> xy;) ys.insert(xy.substr(xy.find(',') + 1));
  CHECK(ys.size() == 1);
  REQUIRE(std::regex_search(svg, m, std::regex("<polygon[^>]*points=\"([^\"]*)\"")));
  std::set<std::string> band_ys;
  std::istringstream band(m[1].str());
  for (std::string xy; band >> xy;) band_ys.insert(xy.substr(xy.find(',') + 1));
  CHECK(band_ys == ys);
}

TEST_CASE("scale plots put ticks at geometric positions") {
  SweepResult r = synthetic_result(SweepKind::Scale, 33, false);
  std::string svg = render_plot_svg(r, true);
  std::vector<double> xs;
  std::regex tick("class=\"xtick\" x1=\"([0-9.]+)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tick); it != std::sregex_iterator(); ++it)
    xs.push_back(std::stod((*it)[1]));
  // 0.1, 0.316, 1, 3.16, 10 on a log axis: equally spaced.
  REQUIRE(xs.size() == 5);
  for (std::size_t i = 2; i < xs.size(); ++i) CHECK(xs[i] - xs[i - 1] == doctest::Approx(xs[1] - xs[0]));
  CHECK(svg.find(">0.1<") != std::string::npos);
  CHECK(svg.find(">10<") != std::string::npos);
}

TEST_CASE("spearman correlation") {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> up{2, 4, 8, 16, 32}, down{5, 4, 3, 2, 1};
  CHECK(spearman_rho(x, up) == doctest::Approx(1.0));
  CHECK(spearman_rho(x, down) == doctest::Approx(-1.0));
  // With ties: ranks (1, 2.5, 2.5, 4); scipy.stats.spearmanr gives 0.9486832980505138.
  std::vector<double> a{1, 2, 3, 4}, b{1, 2, 2, 3};
  CHECK(spearman_rho(a, b) == doctest::Approx(0.9486832980505138));
  std::vector<double> c{1, 2, 4, 3, 5};
  CHECK(spearman_rho(x, c) == doctest::Approx(0.9));
}

TEST_CASE("a small sweep is complete and deterministic across worker counts") {
  SweepSpec spec = quick_spec(SweepKind::Translation);
  std::size_t last = 0;
  SweepResult one = run_sweep(spec, [&](std::size_t done, std::size_t total) {
    CHECK(total == 75);
    last = std::max(last, done);
  });
  CHECK(last == 75);
  REQUIRE(one.cells.size() == 75);
  REQUIRE(one.steps.size() == 3);
  for (const SweepCell& c : one.cells) {
    CHECK(c.ok);
    CHECK(c.chamfer_sq >= 0);
    CHECK(c.iou >= 0);
    CHECK(c.iou <= 1);
  }
  spec.workers = 3;
  SweepResult three = run_sweep(spec);
  CHECK(format_csv(three) == format_csv(one));
}

TEST_CASE("rotating a sphere next to a sphere barely changes the error") {
  SweepSpec spec = quick_spec(SweepKind::Rotation);
  spec.steps = 5;
  spec.compose_resolution = 32;
  spec.chamfer_samples = 2000;
  spec.categories.assign(5, ShapeKind::Sphere);
  SweepResult r = run_sweep(spec);
  double lo = INFINITY, hi = 0;
  for (const StepAggregate& a : r.steps) {
    lo = std::min(lo, a.mean_chamfer_sq);
    hi = std::max(hi, a.mean_chamfer_sq);
  }
  CHECK(hi / lo < 1.25);
}
