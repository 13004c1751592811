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
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "recompose/shapes.hpp"

namespace recompose {

enum class SweepKind { Translation, Rotation, Scale };
std::string_view to_string(SweepKind kind);
SweepKind sweep_kind_from_string(std::string_view name);

inline const std::vector<ShapeKind>& default_categories() {
  static const std::vector<ShapeKind> kinds = {ShapeKind::Elongated, ShapeKind::BentTube, ShapeKind::Torus,
                                               ShapeKind::ThinRing, ShapeKind::Sphere};
  return kinds;
}

struct SweepSpec {
  SweepKind kind = SweepKind::Translation;
  int steps = 33;
  // Separation of the two centers along x at zero translation, in object
  // extents (both shapes are normalized to unit longest side).
  double baseline_offset_extents = 1.8;
  int compose_resolution = 64;
  std::uint64_t seed = 0;
  std::vector<ShapeKind> categories = default_categories();
  std::size_t chamfer_samples = 10000;
  int iou_resolution = 128;
  int closing_passes = 1;
  unsigned workers = 0;  // 0: one per hardware thread
};

// Linear 0..5 extents, linear -180..180 degrees, or geometric 0.1..10.
std::vector<double> sweep_parameters(SweepKind kind, int steps);

// All ordered pairs, anchor-major. Throws InvalidArgument unless there are
// exactly five categories.
std::vector<std::pair<ShapeKind, ShapeKind>> enumerate_pairs(std::span<const ShapeKind> categories);

// Placement of the non-anchor shape for one step: translate to x = baseline
// (+ t for translation sweeps) after rotating about y or scaling about its
// own center.
Transform3 sweep_transform(SweepKind kind, double param, double baseline_offset_extents);

struct SweepCell {
  ShapeKind anchor = ShapeKind::Sphere;
  ShapeKind other = ShapeKind::Sphere;
  int step = 0;
  double param = 0;
  double chamfer_sq = 0;
  double iou = 0;
  bool ok = false;
  std::string error;  // set when !ok; not serialized

  friend bool operator==(const SweepCell& a, const SweepCell& b);
};

struct StepAggregate {
  int step = 0;
  double param = 0;
  double mean_chamfer_sq = 0, ci_chamfer_sq = 0;
  double mean_iou = 0, ci_iou = 0;
  int n_valid = 0;

  friend bool operator==(const StepAggregate& a, const StepAggregate& b);
};

struct SweepResult {
  SweepKind kind = SweepKind::Translation;
  std::vector<SweepCell> cells;  // pair-major, then step
  std::vector<StepAggregate> steps;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

// Called after each finished cell with (done, total); may run on any worker.
using SweepProgress = std::function<void(std::size_t, std::size_t)>;

SweepResult run_sweep(const SweepSpec& spec, const SweepProgress& progress = {});

// Per-step mean and 95% CI over the valid cells of each step. Steps with one
// valid cell get a NaN half-width; steps with none get NaN means.
std::vector<StepAggregate> aggregate_steps(std::span<const SweepCell> cells, std::span<const double> params);

inline constexpr std::string_view kCsvHeader =
    "sweep_kind,anchor,other,step,param_value,chamfer_sq,iou,status,mean_chamfer_sq,ci_chamfer_sq,mean_iou,ci_iou,n_valid";

// Detail rows then aggregate rows (anchor and other "*"). Numbers use the
// shortest representation that parses back to the same double.
std::string format_csv(const SweepResult& result);
SweepResult parse_csv(std::string_view text);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

// Writes <dir>/<kind>_chamfer_sq.svg and <dir>/<kind>_iou.svg; returns both.
std::vector<std::filesystem::path> emit_plot(const SweepResult& result, const std::filesystem::path& dir);
// One chart: mean line over the parameter axis with a shaded 95% band.
std::string render_plot_svg(const SweepResult& result, bool iou);

// Spearman rank correlation with average ranks for ties.
double spearman_rho(std::span<const double> x, std::span<const double> y);

}  // namespace recompose
