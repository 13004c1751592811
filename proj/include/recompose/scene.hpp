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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "recompose/decoder.hpp"
#include "recompose/segmentation.hpp"
#include "recompose/shapes.hpp"

namespace recompose {

struct GeneratorSpec {
  ShapeKind kind = ShapeKind::Sphere;
  ShapeParams params;
  std::uint64_t seed = 0;

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

// A stroke together with the asset's world placement when it was painted, so
// replaying it reproduces the same vertex set.
struct StrokeRecord {
  BrushStroke stroke;
  Transform3 transform;

  friend bool operator==(const StrokeRecord&, const StrokeRecord&) = default;
};

// Exactly one of mesh_path / generator is set. mesh_path is absolute in
// memory and stored relative to the scene file.
struct SceneAsset {
  std::string id;
  std::optional<std::filesystem::path> mesh_path;
  std::optional<GeneratorSpec> generator;
  bool base_kept = true;  // mask before the strokes are replayed
  std::vector<StrokeRecord> strokes;

  friend bool operator==(const SceneAsset&, const SceneAsset&) = default;
};

struct SceneInstance {
  std::string id;
  std::string asset_id;
  Transform3 transform;

  friend bool operator==(const SceneInstance&, const SceneInstance&) = default;
};

struct Scene {
  int version = 1;
  std::vector<SceneAsset> assets;
  std::vector<SceneInstance> instances;
  ComposeParams params;

  const SceneAsset* find_asset(std::string_view id) const;
  const SceneInstance* find_instance(std::string_view id) const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

inline constexpr int kSceneVersion = 1;

// Throws SchemaError with the offending JSON path. Relative mesh paths are
// resolved against base_dir. Instances without an id get "inst-<n>".
Scene scene_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json scene_to_json(const Scene& scene, const std::filesystem::path& base_dir = {});
Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

// Unique asset and instance ids, resolvable references, invertible
// transforms, sane compose parameters. Throws SchemaError.
void validate_scene(const Scene& scene);

nlohmann::json stroke_to_json(const StrokeRecord& record);
StrokeRecord stroke_from_json(const nlohmann::json& j, const std::string& path = "");
nlohmann::json generator_to_json(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const nlohmann::json& j, const std::string& path = "");
nlohmann::json transform_to_json(const Transform3& t);
Transform3 transform_from_json(const nlohmann::json& j, const std::string& path = "");

TriMesh load_asset_mesh(const SceneAsset& asset);
// The base mask with every stroke replayed in order.
SelectionMask replay_mask(const SceneAsset& asset, const TriMesh& mesh);

// Loaded meshes and encoded volumes keyed by asset source, shared across
// compositions. Thread-safe; each entry is built at most once.
class AssetCache {
 public:
  std::shared_ptr<const TriMesh> mesh(const SceneAsset& asset);
  std::shared_ptr<const SparseLatentVolume> volume(const SceneAsset& asset, const EncodeOptions& options);
  void forget(const std::string& asset_id);

 private:
  struct Entry {
    std::mutex mutex;
    std::shared_ptr<const TriMesh> mesh;
    std::map<std::string, std::shared_ptr<const SparseLatentVolume>> volumes;  // by encode options
  };
  std::shared_ptr<Entry> entry(const SceneAsset& asset);

  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;  // by asset id + source
};

// Runs the composition pipeline over every instance. Instances whose asset
// mask keeps nothing are skipped; if that leaves nothing, throws EmptyResult
// naming the instances.
TriMesh compose_scene(const Scene& scene, AssetCache* cache = nullptr, const ComposeProgress& progress = {});
SparseLatentVolume compose_scene_volume(const Scene& scene, AssetCache* cache = nullptr,
                                        const ComposeProgress& progress = {});

}  // namespace recompose
