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

// Command-line front end: shape generation, scene composition, benchmark
// sweeps and the HTTP service.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "recompose/bench.hpp"
#include "recompose/scene.hpp"
#include "recompose/service.hpp"

namespace {

std::filesystem::path default_asset_root() {
  if (const char* env = std::getenv("RECOMPOSE_ASSETS"); env && *env) return env;
  return "assets";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace recompose;
  CLI::App app{"Part-based mesh composition through a shared sparse voxel volume"};
  app.set_config("--config", "", "Read options from a TOML/INI file; flags override");
  app.require_subcommand(1);

  // gen
  std::string gen_kind, gen_out;
  std::uint64_t gen_seed = 0;
  bool gen_normalize = false;
  auto* gen = app.add_subcommand("gen", "Write a procedural shape as OBJ");
  gen->add_option("--kind", gen_kind, "elongated, bent_tube, torus, thin_ring, sphere, box or block")->required();
  gen->add_option("--out", gen_out, "Output OBJ path")->required();
  gen->add_option("--seed", gen_seed, "Tessellation seed");
  gen->add_flag("--normalize", gen_normalize, "Scale to unit longest side and center at the origin");

  // compose
  std::string scene_path, compose_out, dump_stem;
  std::optional<int> compose_resolution, compose_closing;
  auto* comp = app.add_subcommand("compose", "Compose a scene file into one mesh");
  comp->add_option("--scene", scene_path, "Scene JSON")->required()->check(CLI::ExistingFile);
  comp->add_option("--out", compose_out, "Output OBJ path")->required();
  comp->add_option("--resolution", compose_resolution, "Union grid resolution (overrides the scene)");
  comp->add_option("--closing", compose_closing, "Closing passes, 0-3 (overrides the scene)");
  comp->add_option("--dump-volume", dump_stem, "Also write the composed volume as <stem>.csv and <stem>.json");

  // sweep
  SweepSpec spec;
  std::string sweep_kind, csv_out, plot_dir;
  bool quiet = false;
  auto* sweep = app.add_subcommand("sweep", "Run a transform sweep over all category pairs");
  sweep->add_option("--kind", sweep_kind, "translation, rotation or scale")->required();
  sweep->add_option("--steps", spec.steps, "Steps per sweep")->capture_default_str();
  sweep->add_option("--resolution", spec.compose_resolution, "Union grid resolution")->capture_default_str();
  sweep->add_option("--seed", spec.seed, "Sampling seed")->capture_default_str();
  sweep->add_option("--baseline", spec.baseline_offset_extents, "Separation at zero translation, in extents")
      ->capture_default_str();
  sweep->add_option("--samples", spec.chamfer_samples, "Chamfer samples per mesh")->capture_default_str();
  sweep->add_option("--iou-resolution", spec.iou_resolution, "IoU voxel resolution")->capture_default_str();
  sweep->add_option("--workers", spec.workers, "Worker threads (0: all CPUs)")->capture_default_str();
  sweep->add_option("--out-csv", csv_out, "CSV output path")->required();
  sweep->add_option("--out-plot", plot_dir, "Directory for SVG plots");
  sweep->add_flag("--quiet", quiet, "No progress output");

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string asset_root = default_asset_root().string();
  auto* srv = app.add_subcommand("serve", "Run the session HTTP API");
  srv->add_option("--host", host, "Bind address")->capture_default_str();
  srv->add_option("--port", port, "TCP port")->capture_default_str();
  srv->add_option("--assets", asset_root, "Directory for uploaded assets (env RECOMPOSE_ASSETS)")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      TriMesh mesh = gen_shape(shape_kind_from_string(gen_kind), {}, gen_seed);
      if (gen_normalize) mesh = normalize_unit_bbox(mesh).first;
      save_mesh(mesh, gen_out);
      std::cout << gen_out << ": " << mesh.vertices.size() << " vertices, " << mesh.faces.size() << " faces\n";
    } else if (*comp) {
      Scene scene = load_scene(scene_path);
      if (compose_resolution) scene.params.resolution = *compose_resolution;
      if (compose_closing) scene.params.closing_passes = *compose_closing;
      validate_scene(scene);
      AssetCache cache;
      if (!dump_stem.empty()) dump_volume(compose_scene_volume(scene, &cache), dump_stem);
      TriMesh mesh = compose_scene(scene, &cache);
      save_mesh(mesh, compose_out);
      std::cout << compose_out << ": " << mesh.vertices.size() << " vertices, " << mesh.faces.size() << " faces\n";
    } else if (*sweep) {
      spec.kind = sweep_kind_from_string(sweep_kind);
      SweepProgress progress;
      if (!quiet)
        progress = [](std::size_t done, std::size_t total) {
          if (done % 25 == 0 || done == total) std::fprintf(stderr, "\r%zu/%zu cells", done, total);
          if (done == total) std::fprintf(stderr, "\n");
        };
      SweepResult result = run_sweep(spec, progress);
      emit_csv(result, csv_out);
      std::size_t failed = 0;
      for (const SweepCell& c : result.cells)
        if (!c.ok) {
          ++failed;
          std::fprintf(stderr, "failed %s/%s step %d: %s\n", std::string(to_string(c.anchor)).c_str(),
                       std::string(to_string(c.other)).c_str(), c.step, c.error.c_str());
        }
      if (!plot_dir.empty())
        for (const auto& p : emit_plot(result, plot_dir)) std::cout << p.string() << '\n';
      std::cout << csv_out << ": " << result.cells.size() << " cells, " << failed << " failed\n";
    } else if (*srv) {
      std::cout << "listening on http://" << host << ':' << port << '\n' << std::flush;
      serve(host, port, asset_root);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
