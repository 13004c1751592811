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

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "recompose/scene.hpp"

namespace httplib {
class Server;
}

namespace recompose {

struct ComposeResult {
  std::shared_ptr<const TriMesh> mesh;
  std::uint64_t revision = 0;  // scene revision the mesh was computed from
};

struct ComposeStatus {
  bool running = false;
  std::string stage;  // last stage reached, empty before the first compose
  std::string error;  // message of the last failed compose
};

// One editing session. Mutations are serialized and bump the revision;
// reads and compositions of earlier snapshots may run concurrently.
class Session {
 public:
  Session(std::string id, std::filesystem::path asset_dir, Scene initial = {});

  const std::string& id() const { return id_; }
  std::uint64_t revision() const;
  Scene scene() const;

  struct AddedAsset {
    std::string asset_id;
    std::optional<std::string> instance_id;
  };
  // The OBJ text is validated, stored under the session's asset directory and
  // referenced by path.
  AddedAsset add_obj_asset(std::string_view obj_text, bool add_instance = true);
  AddedAsset add_generated_asset(const GeneratorSpec& spec, bool add_instance = true);

  // Paints on the asset using the given world placement; returns (kept, total).
  std::pair<std::size_t, std::size_t> paint(const std::string& asset_id, const BrushStroke& stroke,
                                            const Transform3& world_transform);
  SelectionMask mask(const std::string& asset_id);

  std::string add_instance(const std::string& asset_id, const Transform3& transform = {});
  std::string duplicate_instance(const std::string& instance_id);
  void set_transform(const std::string& instance_id, const Transform3& transform);
  void delete_instance(const std::string& instance_id);
  // Removes the asset and every instance of it; returns the instance count.
  std::size_t delete_asset(const std::string& asset_id);
  void set_compose_params(const ComposeParams& params);

  // Composes a snapshot of the current scene and stores the result.
  ComposeResult compose_now();
  std::optional<ComposeResult> result() const;
  bool result_is_stale() const;
  ComposeStatus status() const;
  void export_result(const std::filesystem::path& path) const;

  const SceneAsset& asset_of_instance(const Scene& scene, const std::string& instance_id) const;

 private:
  SceneAsset& find_asset_locked(const std::string& asset_id);
  SceneInstance& find_instance_locked(const std::string& instance_id);
  std::string next_id_locked(const char* prefix);
  void bump_locked() { ++revision_; }

  const std::string id_;
  const std::filesystem::path asset_dir_;
  mutable std::shared_mutex mutex_;
  Scene scene_;
  std::uint64_t revision_ = 0;
  std::uint64_t next_id_ = 1;
  std::optional<ComposeResult> result_;
  std::map<std::string, SelectionMask> masks_;  // current mask per asset

  std::mutex compose_mutex_;  // one composition at a time
  mutable std::mutex status_mutex_;
  ComposeStatus status_;
  AssetCache cache_;
};

class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path asset_root);

  std::shared_ptr<Session> create(std::optional<Scene> initial = std::nullopt);
  // Throws NotFound.
  std::shared_ptr<Session> get(const std::string& id) const;
  void erase(const std::string& id);
  const std::filesystem::path& asset_root() const { return asset_root_; }

 private:
  std::filesystem::path asset_root_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_ = 1;
};

// Installs the JSON API on server. The store must outlive the server.
void register_routes(httplib::Server& server, SessionStore& store);

// Blocks serving on host:port until the process is stopped.
void serve(const std::string& host, int port, const std::filesystem::path& asset_root);

}  // namespace recompose
