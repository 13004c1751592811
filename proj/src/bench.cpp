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

#include "recompose/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "recompose/decoder.hpp"
#include "recompose/metrics.hpp"
#include "recompose/sampling.hpp"

namespace recompose {

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::Translation: return "translation";
    case SweepKind::Rotation: return "rotation";
    case SweepKind::Scale: return "scale";
  }
  return "unknown";
}

SweepKind sweep_kind_from_string(std::string_view name) {
  for (SweepKind k : {SweepKind::Translation, SweepKind::Rotation, SweepKind::Scale})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown sweep kind '" + std::string(name) + "'");
}

std::vector<double> sweep_parameters(SweepKind kind, int steps) {
  if (steps < 2) throw InvalidArgument("a sweep needs at least two steps");
  std::vector<double> out(static_cast<std::size_t>(steps));
  const double last = steps - 1;
  for (int i = 0; i < steps; ++i) {
    switch (kind) {
      case SweepKind::Translation: out[i] = 5.0 * i / last; break;
      case SweepKind::Rotation: out[i] = -180.0 + 360.0 * i / last; break;
      case SweepKind::Scale: out[i] = std::pow(10.0, -1.0 + 2.0 * i / last); break;
    }
  }
  return out;
}

std::vector<std::pair<ShapeKind, ShapeKind>> enumerate_pairs(std::span<const ShapeKind> categories) {
  if (categories.size() != 5) throw InvalidArgument("the pair protocol needs exactly five categories");
  std::vector<std::pair<ShapeKind, ShapeKind>> pairs;
  for (ShapeKind a : categories)
    for (ShapeKind b : categories) pairs.emplace_back(a, b);
  return pairs;
}

Transform3 sweep_transform(SweepKind kind, double param, double baseline_offset_extents) {
  switch (kind) {
    case SweepKind::Translation:
      return Transform3::translation({baseline_offset_extents + param, 0, 0});
    case SweepKind::Rotation:
      return Transform3::translation({baseline_offset_extents, 0, 0}) *
             Transform3::rotation({0, 1, 0}, param * std::numbers::pi / 180.0);
    case SweepKind::Scale:
      if (!(param > 0)) throw InvalidArgument("scale factor must be positive");
      return Transform3::translation({baseline_offset_extents, 0, 0}) * Transform3::scaling(param);
  }
  throw InvalidArgument("unknown sweep kind");
}

namespace {

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

bool operator==(const SweepCell& a, const SweepCell& b) {
  return a.anchor == b.anchor && a.other == b.other && a.step == b.step && same_double(a.param, b.param) &&
         same_double(a.chamfer_sq, b.chamfer_sq) && same_double(a.iou, b.iou) && a.ok == b.ok;
}

bool operator==(const StepAggregate& a, const StepAggregate& b) {
  return a.step == b.step && same_double(a.param, b.param) && same_double(a.mean_chamfer_sq, b.mean_chamfer_sq) &&
         same_double(a.ci_chamfer_sq, b.ci_chamfer_sq) && same_double(a.mean_iou, b.mean_iou) &&
         same_double(a.ci_iou, b.ci_iou) && a.n_valid == b.n_valid;
}

namespace {

struct PreparedShape {
  TriMesh mesh;  // unit-normalized, centered at the origin
  std::shared_ptr<const SparseLatentVolume> volume;
};

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const SweepProgress& progress) {
  const std::vector<double> params = sweep_parameters(spec.kind, spec.steps);
  const auto pairs = enumerate_pairs(spec.categories);

  ComposeParams compose_params;
  compose_params.resolution = spec.compose_resolution;
  compose_params.closing_passes = spec.closing_passes;
  compose_params.encode.seed = spec.seed;
  compose_params.encode.resolution = spec.compose_resolution;

  std::map<ShapeKind, PreparedShape> shapes;
  for (ShapeKind k : spec.categories) {
    if (shapes.contains(k)) continue;
    PreparedShape s;
    s.mesh = normalize_unit_bbox(gen_shape(k, {}, spec.seed)).first;
    s.volume = std::make_shared<SparseLatentVolume>(encode_mesh(s.mesh, compose_params.encode));
    shapes.emplace(k, std::move(s));
  }

  SweepResult result;
  result.kind = spec.kind;
  result.cells.resize(pairs.size() * params.size());
  for (std::size_t p = 0; p < pairs.size(); ++p)
    for (std::size_t s = 0; s < params.size(); ++s) {
      SweepCell& c = result.cells[p * params.size() + s];
      c.anchor = pairs[p].first;
      c.other = pairs[p].second;
      c.step = static_cast<int>(s);
      c.param = params[s];
    }

  auto evaluate = [&](SweepCell& cell) {
    try {
      const PreparedShape& a = shapes.at(cell.anchor);
      const PreparedShape& b = shapes.at(cell.other);
      Transform3 placement = sweep_transform(spec.kind, cell.param, spec.baseline_offset_extents);
      ComposeItem items[2] = {{&a.mesh, a.mesh.mask, Transform3{}, a.volume},
                              {&b.mesh, b.mesh.mask, placement, b.volume}};
      TriMesh decoded = compose(items, compose_params);
      PlacedMesh placed[2] = {{&a.mesh, Transform3{}}, {&b.mesh, placement}};
      ReferenceComposite ref = reference_composite(placed, spec.chamfer_samples, spec.seed + 1);
      std::vector<Vec3> ours = sample_surface(decoded, spec.chamfer_samples, spec.seed + 2);
      cell.chamfer_sq = chamfer_sq(ours, ref.samples);
      cell.iou = composite_iou(decoded, ref, spec.iou_resolution);
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.chamfer_sq = cell.iou = std::numeric_limits<double>::quiet_NaN();
      cell.error = e.what();
    }
  };

  unsigned workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(result.cells.size()));
  std::atomic<std::size_t> next{0}, done{0};
  std::mutex progress_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < result.cells.size(); i = next++) {
      evaluate(result.cells[i]);
      std::size_t d = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(d, result.cells.size());
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  result.steps = aggregate_steps(result.cells, params);
  return result;
}

std::vector<StepAggregate> aggregate_steps(std::span<const SweepCell> cells, std::span<const double> params) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<StepAggregate> out;
  for (std::size_t s = 0; s < params.size(); ++s) {
    std::vector<double> ch, io;
    for (const SweepCell& c : cells)
      if (c.step == static_cast<int>(s) && c.ok) {
        ch.push_back(c.chamfer_sq);
        io.push_back(c.iou);
      }
    StepAggregate agg;
    agg.step = static_cast<int>(s);
    agg.param = params[s];
    agg.n_valid = static_cast<int>(ch.size());
    if (ch.size() >= 2) {
      std::tie(agg.mean_chamfer_sq, agg.ci_chamfer_sq) = confidence_interval_95(ch);
      std::tie(agg.mean_iou, agg.ci_iou) = confidence_interval_95(io);
    } else if (ch.size() == 1) {
      agg.mean_chamfer_sq = ch[0];
      agg.mean_iou = io[0];
      agg.ci_chamfer_sq = agg.ci_iou = nan;
    } else {
      agg.mean_chamfer_sq = agg.ci_chamfer_sq = agg.mean_iou = agg.ci_iou = nan;
    }
    out.push_back(agg);
  }
  return out;
}

namespace {

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw ParseError(line, "bad number '" + std::string(s) + "'");
  return v;
}

int parse_int(std::string_view s, std::size_t line) {
  int v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw ParseError(line, "bad integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string format_csv(const SweepResult& result) {
  std::string out(kCsvHeader);
  out += '\n';
  const std::string kind(to_string(result.kind));
  for (const SweepCell& c : result.cells) {
    out += kind + ',' + std::string(to_string(c.anchor)) + ',' + std::string(to_string(c.other)) + ',' +
           std::to_string(c.step) + ',' + num(c.param) + ',';
    if (c.ok)
      out += num(c.chamfer_sq) + ',' + num(c.iou) + ",ok";
    else
      out += ",,failed";
    out += ",,,,,\n";
  }
  for (const StepAggregate& a : result.steps) {
    out += kind + ",*,*," + std::to_string(a.step) + ',' + num(a.param) + ",,,," + num(a.mean_chamfer_sq) + ',' +
           num(a.ci_chamfer_sq) + ',' + num(a.mean_iou) + ',' + num(a.ci_iou) + ',' + std::to_string(a.n_valid) +
           '\n';
  }
  return out;
}

SweepResult parse_csv(std::string_view text) {
  SweepResult result;
  std::size_t line_no = 0;
  bool kind_set = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kCsvHeader) throw ParseError(1, "unexpected CSV header");
      continue;
    }
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 13) throw ParseError(line_no, "expected 13 columns");
    SweepKind kind = sweep_kind_from_string(f[0]);
    if (kind_set && kind != result.kind) throw ParseError(line_no, "mixed sweep kinds");
    result.kind = kind;
    kind_set = true;
    if (f[1] == "*") {
      StepAggregate a;
      a.step = parse_int(f[3], line_no);
      a.param = parse_double(f[4], line_no);
      a.mean_chamfer_sq = parse_double(f[8], line_no);
      a.ci_chamfer_sq = parse_double(f[9], line_no);
      a.mean_iou = parse_double(f[10], line_no);
      a.ci_iou = parse_double(f[11], line_no);
      a.n_valid = parse_int(f[12], line_no);
      result.steps.push_back(a);
    } else {
      SweepCell c;
      c.anchor = shape_kind_from_string(f[1]);
      c.other = shape_kind_from_string(f[2]);
      c.step = parse_int(f[3], line_no);
      c.param = parse_double(f[4], line_no);
      c.ok = f[7] == "ok";
      if (c.ok) {
        c.chamfer_sq = parse_double(f[5], line_no);
        c.iou = parse_double(f[6], line_no);
      } else if (f[7] == "failed") {
        c.chamfer_sq = c.iou = std::numeric_limits<double>::quiet_NaN();
      } else {
        throw ParseError(line_no, "unknown status '" + std::string(f[7]) + "'");
      }
      result.cells.push_back(c);
    }
  }
  if (line_no == 0 || !kind_set) throw ParseError(1, "empty sweep CSV");
  return result;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << format_csv(result);
  if (!out) throw IoError("failed writing " + path.string());
}

std::string render_plot_svg(const SweepResult& result, bool iou) {
  constexpr double kW = 640, kH = 400, kLeft = 80, kRight = 20, kTop = 40, kBottom = 50;
  const bool log_x = result.kind == SweepKind::Scale;
  auto xval = [&](double p) { return log_x ? std::log10(p) : p; };

  std::vector<double> xs, mean, half;
  for (const StepAggregate& a : result.steps) {
    double m = iou ? a.mean_iou : a.mean_chamfer_sq;
    if (!std::isfinite(m)) continue;
    double h = iou ? a.ci_iou : a.ci_chamfer_sq;
    xs.push_back(xval(a.param));
    mean.push_back(m);
    half.push_back(std::isfinite(h) ? h : 0.0);
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!xs.empty()) {
    x0 = *std::min_element(xs.begin(), xs.end());
    x1 = *std::max_element(xs.begin(), xs.end());
    y0 = y1 = mean[0];
    for (std::size_t i = 0; i < mean.size(); ++i) {
      y0 = std::min(y0, mean[i] - half[i]);
      y1 = std::max(y1, mean[i] + half[i]);
    }
  }
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) {
    double pad = y0 != 0 ? std::abs(y0) * 0.1 : 1.0;
    y0 -= pad;
    y1 += pad;
  } else {
    double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); };
  auto py = [&](double y) { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto label = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };

  const std::string metric = iou ? "Mesh IoU" : "Chamfer distance (squared)";
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
    << kW << ' ' << kH << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << metric << " vs " << to_string(result.kind) << "</text>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight << "\" y2=\""
    << kH - kBottom << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kH - kBottom
    << "\" stroke=\"black\"/>\n";

  std::vector<double> xticks;
  if (log_x) {
    for (double e = std::ceil(x0 * 2 - 1e-9) / 2; e <= x1 + 1e-9; e += 0.5) xticks.push_back(e);
  } else {
    for (int i = 0; i <= 4; ++i) xticks.push_back(x0 + (x1 - x0) * i / 4);
  }
  for (double t : xticks) {
    double shown = log_x ? std::pow(10.0, t) : t;
    s << "<line class=\"xtick\" x1=\"" << fmt(px(t)) << "\" y1=\"" << kH - kBottom << "\" x2=\"" << fmt(px(t))
      << "\" y2=\"" << kH - kBottom + 5 << "\" stroke=\"black\" data-value=\"" << label(shown) << "\"/>\n";
    s << "<text x=\"" << fmt(px(t)) << "\" y=\"" << kH - kBottom + 20
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << label(shown) << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    double v = y0 + (y1 - y0) * i / 4;
    s << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << kLeft << "\" y2=\"" << fmt(py(v))
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(py(v) + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << label(v) << "</text>\n";
  }
  const char* unit = result.kind == SweepKind::Translation ? "translation (object extents)"
                     : result.kind == SweepKind::Rotation  ? "rotation about y (degrees)"
                                                           : "uniform scale (log axis)";
  s << "<text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"" << kH - 10
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << unit << "</text>\n";

  if (!xs.empty()) {
    s << "<polygon class=\"ci-band\" fill=\"#4a7ab5\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) s << fmt(px(xs[i])) << ',' << fmt(py(mean[i] + half[i])) << ' ';
    for (std::size_t i = xs.size(); i-- > 0;) s << fmt(px(xs[i])) << ',' << fmt(py(mean[i] - half[i])) << ' ';
    s << "\"/>\n";
    s << "<polyline class=\"mean\" fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) s << fmt(px(xs[i])) << ',' << fmt(py(mean[i])) << ' ';
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::filesystem::path> emit_plot(const SweepResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (bool iou : {false, true}) {
    auto path = dir / (std::string(to_string(result.kind)) + (iou ? "_iou.svg" : "_chamfer_sq.svg"));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << render_plot_svg(result, iou);
    if (!out) throw IoError("failed writing " + path.string());
    written.push_back(path);
  }
  return written;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("spearman needs two equal-length series of length >= 2");
  auto rx = average_ranks(x), ry = average_ranks(y);
  double n = static_cast<double>(x.size());
  double mx = (n + 1) / 2, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - mx);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - mx) * (ry[i] - mx);
  }
  if (sxx == 0 || syy == 0) throw InvalidArgument("spearman is undefined for a constant series");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace recompose
