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

#include "recompose/scene.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace recompose {

using nlohmann::json;

const SceneAsset* Scene::find_asset(std::string_view id) const {
  for (const SceneAsset& a : assets)
    if (a.id == id) return &a;
  return nullptr;
}

const SceneInstance* Scene::find_instance(std::string_view id) const {
  for (const SceneInstance& i : instances)
    if (i.id == id) return &i;
  return nullptr;
}

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "/" + key, "missing required field");
  return *it;
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  return j;
}

const json& require_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
  return v;
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<long long>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw SchemaError(path, "expected an array of 3 numbers");
  return {number(j[0], path + "/0"), number(j[1], path + "/1"), number(j[2], path + "/2")};
}

json vec3_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw SchemaError(path + "/" + it.key(), "unknown field");
  }
}

}  // namespace

json transform_to_json(const Transform3& t) {
  json out = json::array();
  for (double v : t.matrix()) out.push_back(v);
  return out;
}

Transform3 transform_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 16) throw SchemaError(path, "expected 16 numbers (row-major 4x4)");
  std::array<double, 16> m{};
  for (std::size_t i = 0; i < 16; ++i) m[i] = number(j[i], path + "/" + std::to_string(i));
  try {
    return Transform3(m);
  } catch (const InvalidArgument& e) {
    throw SchemaError(path, e.what());
  }
}

json stroke_to_json(const StrokeRecord& record) {
  json path = json::array();
  for (const Vec3& p : record.stroke.path) path.push_back(vec3_json(p));
  json out = {{"path", path},
              {"radius", record.stroke.radius_world},
              {"mode", record.stroke.mode == BrushMode::Keep ? "keep" : "drop"}};
  if (!(record.transform == Transform3{})) out["transform"] = transform_to_json(record.transform);
  return out;
}

StrokeRecord stroke_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, {"path", "radius", "mode", "transform"}, path);
  StrokeRecord r;
  const json& pts = require_array(require(j, "path", path), path + "/path");
  if (pts.empty()) throw SchemaError(path + "/path", "stroke path is empty");
  for (std::size_t i = 0; i < pts.size(); ++i) r.stroke.path.push_back(vec3(pts[i], path + "/path/" + std::to_string(i)));
  r.stroke.radius_world = number(require(j, "radius", path), path + "/radius");
  if (!(r.stroke.radius_world > 0)) throw SchemaError(path + "/radius", "radius must be positive");
  std::string mode = string(require(j, "mode", path), path + "/mode");
  if (mode == "keep")
    r.stroke.mode = BrushMode::Keep;
  else if (mode == "drop")
    r.stroke.mode = BrushMode::Drop;
  else
    throw SchemaError(path + "/mode", "expected \"keep\" or \"drop\"");
  if (j.contains("transform")) r.transform = transform_from_json(j["transform"], path + "/transform");
  return r;
}

json generator_to_json(const GeneratorSpec& spec) {
  json params = json::object();
  const ShapeParams& p = spec.params;
  if (p.radius) params["radius"] = *p.radius;
  if (p.length) params["length"] = *p.length;
  if (p.major_radius) params["major_radius"] = *p.major_radius;
  if (p.minor_radius) params["minor_radius"] = *p.minor_radius;
  if (p.bend_degrees) params["bend_degrees"] = *p.bend_degrees;
  if (p.size) params["size"] = vec3_json(*p.size);
  if (p.studs_x) params["studs_x"] = *p.studs_x;
  if (p.studs_z) params["studs_z"] = *p.studs_z;
  if (p.subdivisions) params["subdivisions"] = *p.subdivisions;
  if (p.segments) params["segments"] = *p.segments;
  if (p.rings) params["rings"] = *p.rings;
  if (p.color) params["color"] = vec3_json(*p.color);
  return {{"kind", std::string(to_string(spec.kind))}, {"params", params}, {"seed", spec.seed}};
}

GeneratorSpec generator_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, {"kind", "params", "seed"}, path);
  GeneratorSpec spec;
  try {
    spec.kind = shape_kind_from_string(string(require(j, "kind", path), path + "/kind"));
  } catch (const InvalidArgument& e) {
    throw SchemaError(path + "/kind", e.what());
  }
  if (j.contains("seed")) {
    long long seed = integer(j["seed"], path + "/seed");
    if (seed < 0) throw SchemaError(path + "/seed", "seed must be non-negative");
    spec.seed = static_cast<std::uint64_t>(seed);
  }
  if (j.contains("params")) {
    const std::string pp = path + "/params";
    const json& params = require_object(j["params"], pp);
    reject_unknown(params,
                   {"radius", "length", "major_radius", "minor_radius", "bend_degrees", "size", "studs_x", "studs_z",
                    "subdivisions", "segments", "rings", "color"},
                   pp);
    ShapeParams& p = spec.params;
    auto real = [&](const char* key, std::optional<double>& out) {
      if (params.contains(key)) out = number(params[key], pp + "/" + key);
    };
    auto whole = [&](const char* key, std::optional<int>& out) {
      if (params.contains(key)) out = static_cast<int>(integer(params[key], pp + "/" + key));
    };
    real("radius", p.radius);
    real("length", p.length);
    real("major_radius", p.major_radius);
    real("minor_radius", p.minor_radius);
    real("bend_degrees", p.bend_degrees);
    if (params.contains("size")) p.size = vec3(params["size"], pp + "/size");
    whole("studs_x", p.studs_x);
    whole("studs_z", p.studs_z);
    whole("subdivisions", p.subdivisions);
    whole("segments", p.segments);
    whole("rings", p.rings);
    if (params.contains("color")) p.color = vec3(params["color"], pp + "/color");
  }
  return spec;
}

Scene scene_from_json(const json& doc, const std::filesystem::path& base_dir) {
  require_object(doc, "");
  reject_unknown(doc, {"version", "assets", "instances", "compose_params"}, "");
  Scene scene;
  scene.version = static_cast<int>(integer(require(doc, "version", ""), "/version"));
  if (scene.version != kSceneVersion)
    throw SchemaError("/version", "unsupported scene version " + std::to_string(scene.version));

  const json& assets = require_array(require(doc, "assets", ""), "/assets");
  for (std::size_t i = 0; i < assets.size(); ++i) {
    const std::string path = "/assets/" + std::to_string(i);
    const json& a = require_object(assets[i], path);
    reject_unknown(a, {"id", "mesh_path", "generator", "base_mask", "strokes"}, path);
    SceneAsset asset;
    asset.id = string(require(a, "id", path), path + "/id");
    if (asset.id.empty()) throw SchemaError(path + "/id", "asset id is empty");
    if (a.contains("mesh_path") == a.contains("generator"))
      throw SchemaError(path, "exactly one of mesh_path and generator is required");
    if (a.contains("mesh_path")) {
      std::filesystem::path p = string(a["mesh_path"], path + "/mesh_path");
      if (p.is_relative()) p = base_dir / p;
      asset.mesh_path = std::filesystem::absolute(p).lexically_normal();
    } else {
      asset.generator = generator_from_json(a["generator"], path + "/generator");
    }
    if (a.contains("base_mask")) {
      std::string base = string(a["base_mask"], path + "/base_mask");
      if (base != "keep" && base != "drop") throw SchemaError(path + "/base_mask", "expected \"keep\" or \"drop\"");
      asset.base_kept = base == "keep";
    }
    if (a.contains("strokes")) {
      const json& strokes = require_array(a["strokes"], path + "/strokes");
      for (std::size_t s = 0; s < strokes.size(); ++s)
        asset.strokes.push_back(stroke_from_json(strokes[s], path + "/strokes/" + std::to_string(s)));
    }
    scene.assets.push_back(std::move(asset));
  }

  const json& instances = require_array(require(doc, "instances", ""), "/instances");
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const std::string path = "/instances/" + std::to_string(i);
    const json& in = require_object(instances[i], path);
    reject_unknown(in, {"id", "asset_id", "transform"}, path);
    SceneInstance inst;
    inst.id = in.contains("id") ? string(in["id"], path + "/id") : "inst-" + std::to_string(i);
    inst.asset_id = string(require(in, "asset_id", path), path + "/asset_id");
    if (in.contains("transform")) inst.transform = transform_from_json(in["transform"], path + "/transform");
    scene.instances.push_back(std::move(inst));
  }

  if (doc.contains("compose_params")) {
    const std::string path = "/compose_params";
    const json& cp = require_object(doc["compose_params"], path);
    reject_unknown(cp, {"resolution", "selection_threshold_voxels", "closing_passes", "samples_per_voxel", "seed"},
                   path);
    if (cp.contains("resolution")) scene.params.resolution = static_cast<int>(integer(cp["resolution"], path + "/resolution"));
    if (cp.contains("selection_threshold_voxels"))
      scene.params.selection_threshold_voxels = number(cp["selection_threshold_voxels"], path + "/selection_threshold_voxels");
    if (cp.contains("closing_passes"))
      scene.params.closing_passes = static_cast<int>(integer(cp["closing_passes"], path + "/closing_passes"));
    if (cp.contains("samples_per_voxel"))
      scene.params.encode.samples_per_voxel = number(cp["samples_per_voxel"], path + "/samples_per_voxel");
    if (cp.contains("seed")) {
      long long seed = integer(cp["seed"], path + "/seed");
      if (seed < 0) throw SchemaError(path + "/seed", "seed must be non-negative");
      scene.params.encode.seed = static_cast<std::uint64_t>(seed);
    }
  }
  validate_scene(scene);
  return scene;
}

json scene_to_json(const Scene& scene, const std::filesystem::path& base_dir) {
  json assets = json::array();
  for (const SceneAsset& a : scene.assets) {
    json out = {{"id", a.id}};
    if (a.mesh_path) {
      std::filesystem::path p = *a.mesh_path;
      if (!base_dir.empty()) p = p.lexically_proximate(std::filesystem::absolute(base_dir).lexically_normal());
      out["mesh_path"] = p.generic_string();
    } else if (a.generator) {
      out["generator"] = generator_to_json(*a.generator);
    }
    if (!a.base_kept) out["base_mask"] = "drop";
    json strokes = json::array();
    for (const StrokeRecord& s : a.strokes) strokes.push_back(stroke_to_json(s));
    out["strokes"] = strokes;
    assets.push_back(out);
  }
  json instances = json::array();
  for (const SceneInstance& i : scene.instances)
    instances.push_back({{"id", i.id}, {"asset_id", i.asset_id}, {"transform", transform_to_json(i.transform)}});
  json params = {{"resolution", scene.params.resolution},
                 {"selection_threshold_voxels", scene.params.selection_threshold_voxels},
                 {"closing_passes", scene.params.closing_passes}};
  if (scene.params.encode.samples_per_voxel != EncodeOptions{}.samples_per_voxel)
    params["samples_per_voxel"] = scene.params.encode.samples_per_voxel;
  if (scene.params.encode.seed != 0) params["seed"] = scene.params.encode.seed;
  return {{"version", scene.version}, {"assets", assets}, {"instances", instances}, {"compose_params", params}};
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scene " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
  return scene_from_json(doc, std::filesystem::absolute(path).parent_path());
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  validate_scene(scene);
  const std::filesystem::path dir = std::filesystem::absolute(path).parent_path();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  json doc = scene_to_json(scene, dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void validate_scene(const Scene& scene) {
  std::set<std::string> asset_ids, instance_ids;
  for (std::size_t i = 0; i < scene.assets.size(); ++i) {
    const SceneAsset& a = scene.assets[i];
    const std::string path = "/assets/" + std::to_string(i);
    if (a.id.empty()) throw SchemaError(path + "/id", "asset id is empty");
    if (!asset_ids.insert(a.id).second) throw SchemaError(path + "/id", "duplicate asset id '" + a.id + "'");
    if (a.mesh_path.has_value() == a.generator.has_value())
      throw SchemaError(path, "exactly one of mesh_path and generator is required");
    for (std::size_t s = 0; s < a.strokes.size(); ++s)
      if (!a.strokes[s].transform.invertible())
        throw SchemaError(path + "/strokes/" + std::to_string(s) + "/transform", "transform is not invertible");
  }
  for (std::size_t i = 0; i < scene.instances.size(); ++i) {
    const SceneInstance& in = scene.instances[i];
    const std::string path = "/instances/" + std::to_string(i);
    if (in.id.empty()) throw SchemaError(path + "/id", "instance id is empty");
    if (!instance_ids.insert(in.id).second) throw SchemaError(path + "/id", "duplicate instance id '" + in.id + "'");
    if (!asset_ids.contains(in.asset_id))
      throw SchemaError(path + "/asset_id", "unknown asset '" + in.asset_id + "'");
    if (!in.transform.invertible()) throw SchemaError(path + "/transform", "transform is not invertible");
  }
  const ComposeParams& p = scene.params;
  if (p.resolution < 8 || p.resolution > 512) throw SchemaError("/compose_params/resolution", "must be in 8..512");
  if (!(p.selection_threshold_voxels > 0))
    throw SchemaError("/compose_params/selection_threshold_voxels", "must be positive");
  if (p.closing_passes < 0 || p.closing_passes > 3) throw SchemaError("/compose_params/closing_passes", "must be in 0..3");
  if (!(p.encode.samples_per_voxel > 0)) throw SchemaError("/compose_params/samples_per_voxel", "must be positive");
}

TriMesh load_asset_mesh(const SceneAsset& asset) {
  if (asset.mesh_path) return load_mesh(*asset.mesh_path);
  if (asset.generator) return gen_shape(asset.generator->kind, asset.generator->params, asset.generator->seed);
  throw InvalidArgument("asset '" + asset.id + "' has no mesh source");
}

SelectionMask replay_mask(const SceneAsset& asset, const TriMesh& mesh) {
  TriMesh work = mesh;
  work.mask = set_all(mesh, asset.base_kept);
  for (const StrokeRecord& s : asset.strokes) work.mask = apply_stroke(work, s.stroke, s.transform);
  return work.mask;
}

std::shared_ptr<AssetCache::Entry> AssetCache::entry(const SceneAsset& asset) {
  std::string key = asset.id + '\n';
  if (asset.mesh_path) key += "path:" + asset.mesh_path->string();
  if (asset.generator) key += "gen:" + generator_to_json(*asset.generator).dump();
  std::lock_guard lock(mutex_);
  auto& e = entries_[key];
  if (!e) e = std::make_shared<Entry>();
  return e;
}

std::shared_ptr<const TriMesh> AssetCache::mesh(const SceneAsset& asset) {
  auto e = entry(asset);
  std::lock_guard lock(e->mutex);
  if (!e->mesh) e->mesh = std::make_shared<const TriMesh>(load_asset_mesh(asset));
  return e->mesh;
}

std::shared_ptr<const SparseLatentVolume> AssetCache::volume(const SceneAsset& asset, const EncodeOptions& options) {
  auto m = mesh(asset);
  auto e = entry(asset);
  std::lock_guard lock(e->mutex);
  char key[96];
  std::snprintf(key, sizeof key, "%d/%.17g/%llu", options.resolution, options.samples_per_voxel,
                static_cast<unsigned long long>(options.seed));
  auto& v = e->volumes[key];
  if (!v) v = std::make_shared<const SparseLatentVolume>(encode_mesh(*m, options));
  return v;
}

void AssetCache::forget(const std::string& asset_id) {
  std::lock_guard lock(mutex_);
  const std::string prefix = asset_id + '\n';
  for (auto it = entries_.begin(); it != entries_.end();)
    it = it->first.starts_with(prefix) ? entries_.erase(it) : std::next(it);
}

namespace {

struct PreparedScene {
  std::vector<std::shared_ptr<const TriMesh>> meshes;  // keeps items' meshes alive
  std::vector<ComposeItem> items;
};

PreparedScene prepare(const Scene& scene, AssetCache& cache) {
  validate_scene(scene);
  if (scene.instances.empty()) throw EmptyResult("nothing to compose: the scene has no instances");
  EncodeOptions encode = scene.params.encode;
  encode.resolution = scene.params.resolution;
  PreparedScene out;
  std::map<std::string, SelectionMask> masks;
  std::vector<std::string> empty;
  for (const SceneInstance& inst : scene.instances) {
    const SceneAsset& asset = *scene.find_asset(inst.asset_id);
    auto mesh = cache.mesh(asset);
    auto it = masks.find(asset.id);
    if (it == masks.end()) it = masks.emplace(asset.id, replay_mask(asset, *mesh)).first;
    if (it->second.none_kept()) {
      empty.push_back(inst.id);
      continue;
    }
    out.meshes.push_back(mesh);
    out.items.push_back({mesh.get(), it->second, inst.transform, cache.volume(asset, encode)});
  }
  if (out.items.empty()) {
    std::string names;
    for (const std::string& id : empty) names += (names.empty() ? "" : ", ") + id;
    throw EmptyResult("empty selection for every instance: " + names);
  }
  return out;
}

}  // namespace

TriMesh compose_scene(const Scene& scene, AssetCache* cache, const ComposeProgress& progress) {
  AssetCache local;
  PreparedScene prepared = prepare(scene, cache ? *cache : local);
  return compose(prepared.items, scene.params, progress);
}

SparseLatentVolume compose_scene_volume(const Scene& scene, AssetCache* cache, const ComposeProgress& progress) {
  AssetCache local;
  PreparedScene prepared = prepare(scene, cache ? *cache : local);
  return compose_volume(prepared.items, scene.params, progress);
}

}  // namespace recompose
