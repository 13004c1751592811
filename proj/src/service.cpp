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

#include "recompose/service.hpp"

#include <algorithm>

#include "httplib.h"

namespace recompose {

using nlohmann::json;

Session::Session(std::string id, std::filesystem::path asset_dir, Scene initial)
    : id_(std::move(id)), asset_dir_(std::move(asset_dir)), scene_(std::move(initial)) {
  validate_scene(scene_);
}

std::uint64_t Session::revision() const {
  std::shared_lock lock(mutex_);
  return revision_;
}

Scene Session::scene() const {
  std::shared_lock lock(mutex_);
  return scene_;
}

std::string Session::next_id_locked(const char* prefix) {
  while (true) {
    std::string id = std::string(prefix) + "-" + std::to_string(next_id_++);
    if (!scene_.find_asset(id) && !scene_.find_instance(id)) return id;
  }
}

SceneAsset& Session::find_asset_locked(const std::string& asset_id) {
  for (SceneAsset& a : scene_.assets)
    if (a.id == asset_id) return a;
  throw NotFound("no asset '" + asset_id + "' in session " + id_);
}

SceneInstance& Session::find_instance_locked(const std::string& instance_id) {
  for (SceneInstance& i : scene_.instances)
    if (i.id == instance_id) return i;
  throw NotFound("no instance '" + instance_id + "' in session " + id_);
}

const SceneAsset& Session::asset_of_instance(const Scene& scene, const std::string& instance_id) const {
  const SceneInstance* inst = scene.find_instance(instance_id);
  if (!inst) throw NotFound("no instance '" + instance_id + "' in session " + id_);
  return *scene.find_asset(inst->asset_id);
}

Session::AddedAsset Session::add_obj_asset(std::string_view obj_text, bool add_instance) {
  TriMesh mesh = parse_obj(obj_text);
  if (mesh.empty()) throw InvalidArgument("uploaded mesh has no faces");
  std::unique_lock lock(mutex_);
  AddedAsset added{next_id_locked("asset"), std::nullopt};
  std::filesystem::create_directories(asset_dir_);
  std::filesystem::path path = std::filesystem::absolute(asset_dir_ / (added.asset_id + ".obj")).lexically_normal();
  save_mesh(mesh, path);
  SceneAsset asset;
  asset.id = added.asset_id;
  asset.mesh_path = path;
  scene_.assets.push_back(std::move(asset));
  if (add_instance) {
    added.instance_id = next_id_locked("inst");
    scene_.instances.push_back({*added.instance_id, added.asset_id, Transform3{}});
  }
  bump_locked();
  return added;
}

Session::AddedAsset Session::add_generated_asset(const GeneratorSpec& spec, bool add_instance) {
  gen_shape(spec.kind, spec.params, spec.seed);  // reject bad parameters up front
  std::unique_lock lock(mutex_);
  AddedAsset added{next_id_locked("asset"), std::nullopt};
  SceneAsset asset;
  asset.id = added.asset_id;
  asset.generator = spec;
  scene_.assets.push_back(std::move(asset));
  if (add_instance) {
    added.instance_id = next_id_locked("inst");
    scene_.instances.push_back({*added.instance_id, added.asset_id, Transform3{}});
  }
  bump_locked();
  return added;
}

std::pair<std::size_t, std::size_t> Session::paint(const std::string& asset_id, const BrushStroke& stroke,
                                                   const Transform3& world_transform) {
  std::unique_lock lock(mutex_);
  SceneAsset& asset = find_asset_locked(asset_id);
  TriMesh work = *cache_.mesh(asset);
  auto it = masks_.find(asset_id);
  work.mask = it != masks_.end() ? it->second : replay_mask(asset, work);
  SelectionMask updated = apply_stroke(work, stroke, world_transform);
  asset.strokes.push_back({stroke, world_transform});
  masks_[asset_id] = updated;
  bump_locked();
  return mask_stats(updated);
}

SelectionMask Session::mask(const std::string& asset_id) {
  std::unique_lock lock(mutex_);
  SceneAsset& asset = find_asset_locked(asset_id);
  auto it = masks_.find(asset_id);
  if (it != masks_.end()) return it->second;
  return masks_[asset_id] = replay_mask(asset, *cache_.mesh(asset));
}

std::string Session::add_instance(const std::string& asset_id, const Transform3& transform) {
  require_invertible(transform, "instance");
  std::unique_lock lock(mutex_);
  find_asset_locked(asset_id);
  std::string id = next_id_locked("inst");
  scene_.instances.push_back({id, asset_id, transform});
  bump_locked();
  return id;
}

std::string Session::duplicate_instance(const std::string& instance_id) {
  std::unique_lock lock(mutex_);
  SceneInstance copy = find_instance_locked(instance_id);
  copy.id = next_id_locked("inst");
  scene_.instances.push_back(copy);
  bump_locked();
  return copy.id;
}

void Session::set_transform(const std::string& instance_id, const Transform3& transform) {
  require_invertible(transform, "instance");
  std::unique_lock lock(mutex_);
  find_instance_locked(instance_id).transform = transform;
  bump_locked();
}

void Session::delete_instance(const std::string& instance_id) {
  std::unique_lock lock(mutex_);
  find_instance_locked(instance_id);
  std::erase_if(scene_.instances, [&](const SceneInstance& i) { return i.id == instance_id; });
  bump_locked();
}

std::size_t Session::delete_asset(const std::string& asset_id) {
  std::unique_lock lock(mutex_);
  find_asset_locked(asset_id);
  std::size_t removed =
      std::erase_if(scene_.instances, [&](const SceneInstance& i) { return i.asset_id == asset_id; });
  std::erase_if(scene_.assets, [&](const SceneAsset& a) { return a.id == asset_id; });
  masks_.erase(asset_id);
  cache_.forget(asset_id);
  bump_locked();
  return removed;
}

void Session::set_compose_params(const ComposeParams& params) {
  std::unique_lock lock(mutex_);
  Scene candidate = scene_;
  candidate.params = params;
  validate_scene(candidate);
  scene_.params = params;
  bump_locked();
}

ComposeResult Session::compose_now() {
  std::lock_guard compose_lock(compose_mutex_);
  Scene snapshot;
  std::uint64_t revision = 0;
  {
    std::shared_lock lock(mutex_);
    snapshot = scene_;
    revision = revision_;
  }
  {
    std::lock_guard lock(status_mutex_);
    status_ = {true, "prepare", ""};
  }
  try {
    auto mesh = std::make_shared<const TriMesh>(compose_scene(snapshot, &cache_, [this](ComposeStage s) {
      std::lock_guard lock(status_mutex_);
      status_.stage = std::string(to_string(s));
    }));
    ComposeResult result{mesh, revision};
    {
      std::unique_lock lock(mutex_);
      result_ = result;
    }
    std::lock_guard lock(status_mutex_);
    status_ = {false, "done", ""};
    return result;
  } catch (const std::exception& e) {
    std::lock_guard lock(status_mutex_);
    status_.running = false;
    status_.error = e.what();
    throw;
  }
}

std::optional<ComposeResult> Session::result() const {
  std::shared_lock lock(mutex_);
  return result_;
}

bool Session::result_is_stale() const {
  std::shared_lock lock(mutex_);
  return result_ && result_->revision != revision_;
}

ComposeStatus Session::status() const {
  std::lock_guard lock(status_mutex_);
  return status_;
}

void Session::export_result(const std::filesystem::path& path) const {
  auto r = result();
  if (!r) throw NotFound("session " + id_ + " has no composition result");
  save_mesh(*r->mesh, path);
}

SessionStore::SessionStore(std::filesystem::path asset_root) : asset_root_(std::move(asset_root)) {}

std::shared_ptr<Session> SessionStore::create(std::optional<Scene> initial) {
  std::lock_guard lock(mutex_);
  std::string id = "s" + std::to_string(next_++);
  auto session = std::make_shared<Session>(id, asset_root_ / id, initial.value_or(Scene{}));
  sessions_.emplace(id, session);
  return session;
}

std::shared_ptr<Session> SessionStore::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("no session '" + id + "'");
  return it->second;
}

void SessionStore::erase(const std::string& id) {
  std::lock_guard lock(mutex_);
  if (!sessions_.erase(id)) throw NotFound("no session '" + id + "'");
}

namespace {

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs a handler and maps library errors onto HTTP statuses with a JSON body
// naming the failing stage.
template <typename F>
httplib::Server::Handler guarded(const char* stage, F handler) {
  return [stage, handler](const httplib::Request& req, httplib::Response& res) {
    std::string where = stage;
    try {
      handler(req, res, where);
    } catch (const NotFound& e) {
      send_json(res, {{"error", e.what()}, {"stage", where}}, 404);
    } catch (const EmptyResult& e) {
      send_json(res, {{"error", e.what()}, {"stage", where}}, 422);
    } catch (const SchemaError& e) {
      send_json(res, {{"error", e.what()}, {"stage", where}, {"path", e.path()}}, 400);
    } catch (const ParseError& e) {
      send_json(res, {{"error", e.what()}, {"stage", where}, {"line", e.line()}}, 400);
    } catch (const IoError& e) {
      send_json(res, {{"error", e.what()}, {"stage", where}}, 500);
    } catch (const Error& e) {
      send_json(res, {{"error", e.what()}, {"stage", where}}, 400);
    } catch (const std::exception& e) {
      send_json(res, {{"error", e.what()}, {"stage", where}}, 500);
    }
  };
}

const std::string& param(const httplib::Request& req, const char* name) { return req.path_params.at(name); }

Transform3 transform_field(const json& body, const char* key) {
  if (body.is_array()) return transform_from_json(body, "/");
  if (!body.contains(key)) throw SchemaError(std::string("/") + key, "missing required field");
  return transform_from_json(body[key], std::string("/") + key);
}

json mask_json(const SelectionMask& mask) {
  auto [kept, total] = mask_stats(mask);
  json flags = json::array();
  for (std::uint8_t f : mask.flags()) flags.push_back(f ? 1 : 0);
  return {{"kept", flags}, {"kept_count", kept}, {"total", total}};
}

}  // namespace

void register_routes(httplib::Server& server, SessionStore& store) {
  server.Post("/sessions", guarded("request", [&store](const auto& req, auto& res, std::string&) {
    std::optional<Scene> scene;
    if (!req.body.empty()) scene = scene_from_json(parse_body(req), store.asset_root());
    auto s = store.create(std::move(scene));
    send_json(res, {{"id", s->id()}, {"revision", s->revision()}}, 201);
  }));

  server.Delete("/sessions/:id", guarded("request", [&store](const auto& req, auto& res, std::string&) {
    store.erase(param(req, "id"));
    send_json(res, {{"deleted", param(req, "id")}});
  }));

  server.Get("/sessions/:id/scene", guarded("request", [&store](const auto& req, auto& res, std::string&) {
    auto s = store.get(param(req, "id"));
    json doc = scene_to_json(s->scene());
    res.set_header("X-Revision", std::to_string(s->revision()));
    send_json(res, doc);
  }));

  server.Post("/sessions/:id/assets", guarded("request", [&store](const auto& req, auto& res, std::string&) {
    auto s = store.get(param(req, "id"));
    bool add_instance = !(req.has_param("add_instance") && req.get_param_value("add_instance") == "false");
    Session::AddedAsset added;
    if (req.is_multipart_form_data()) {
      if (req.files.empty()) throw SchemaError("/", "multipart upload without a file");
      auto it = req.files.find("mesh");
      const auto& file = it != req.files.end() ? it->second : req.files.begin()->second;
      added = s->add_obj_asset(file.content, add_instance);
    } else {
      std::string_view body = req.body;
      auto first = body.find_first_not_of(" \t\r\n");
      if (first != std::string_view::npos && body[first] == '{') {
        json doc = parse_body(req);
        if (doc.contains("add_instance")) {
          if (!doc["add_instance"].is_boolean()) throw SchemaError("/add_instance", "expected a boolean");
          add_instance = doc["add_instance"].template get<bool>();
        }
        if (doc.contains("generator"))
          added = s->add_generated_asset(generator_from_json(doc["generator"], "/generator"), add_instance);
        else if (doc.contains("obj") && doc["obj"].is_string())
          added = s->add_obj_asset(doc["obj"].template get<std::string>(), add_instance);
        else
          throw SchemaError("/", "expected a generator or obj field");
      } else {
        added = s->add_obj_asset(body, add_instance);
      }
    }
    json out = {{"asset_id", added.asset_id}, {"revision", s->revision()}};
    out["instance_id"] = added.instance_id ? json(*added.instance_id) : json(nullptr);
    send_json(res, out, 201);
  }));

  server.Delete("/sessions/:id/assets/:aid",
                guarded("request", [&store](const auto& req, auto& res, std::string&) {
                  auto s = store.get(param(req, "id"));
                  std::size_t removed = s->delete_asset(param(req, "aid"));
                  send_json(res, {{"deleted", param(req, "aid")}, {"deleted_instances", removed},
                                  {"revision", s->revision()}});
                }));

  server.Get("/sessions/:id/assets/:aid/mask",
             guarded("request", [&store](const auto& req, auto& res, std::string&) {
               auto s = store.get(param(req, "id"));
               send_json(res, mask_json(s->mask(param(req, "aid"))));
             }));

  server.Post("/sessions/:id/assets/:aid/strokes",
              guarded("paint", [&store](const auto& req, auto& res, std::string&) {
                auto s = store.get(param(req, "id"));
                const std::string aid = param(req, "aid");
                json doc = parse_body(req);
                Transform3 placement;
                json stroke_doc = doc;
                Scene scene = s->scene();
                if (doc.contains("instance_id")) {
                  std::string iid = doc["instance_id"].is_string() ? doc["instance_id"].template get<std::string>() : "";
                  const SceneInstance* inst = scene.find_instance(iid);
                  if (!inst) throw NotFound("no instance '" + iid + "'");
                  if (inst->asset_id != aid) throw InvalidArgument("instance " + iid + " is not an instance of " + aid);
                  placement = inst->transform;
                  stroke_doc.erase("instance_id");
                } else if (!doc.contains("transform")) {
                  // A lone instance is the obvious placement; otherwise local space.
                  const SceneInstance* only = nullptr;
                  int count = 0;
                  for (const SceneInstance& i : scene.instances)
                    if (i.asset_id == aid) only = &i, ++count;
                  if (count == 1) placement = only->transform;
                }
                StrokeRecord record = stroke_from_json(stroke_doc, "");
                if (doc.contains("transform")) placement = record.transform;
                auto [kept, total] = s->paint(aid, record.stroke, placement);
                send_json(res, {{"kept_count", kept}, {"total", total}, {"revision", s->revision()}});
              }));

  server.Post("/sessions/:id/instances", guarded("request", [&store](const auto& req, auto& res, std::string&) {
    auto s = store.get(param(req, "id"));
    json doc = parse_body(req);
    std::string id;
    if (doc.contains("duplicate_of")) {
      if (!doc["duplicate_of"].is_string()) throw SchemaError("/duplicate_of", "expected a string");
      id = s->duplicate_instance(doc["duplicate_of"].template get<std::string>());
      if (doc.contains("transform")) s->set_transform(id, transform_from_json(doc["transform"], "/transform"));
    } else {
      if (!doc.contains("asset_id") || !doc["asset_id"].is_string())
        throw SchemaError("/asset_id", "expected asset_id or duplicate_of");
      Transform3 t = doc.contains("transform") ? transform_from_json(doc["transform"], "/transform") : Transform3{};
      id = s->add_instance(doc["asset_id"].template get<std::string>(), t);
    }
    send_json(res, {{"id", id}, {"revision", s->revision()}}, 201);
  }));

  server.Put("/sessions/:id/instances/:iid/transform",
             guarded("request", [&store](const auto& req, auto& res, std::string&) {
               auto s = store.get(param(req, "id"));
               s->set_transform(param(req, "iid"), transform_field(parse_body(req), "transform"));
               send_json(res, {{"id", param(req, "iid")}, {"revision", s->revision()}});
             }));

  server.Delete("/sessions/:id/instances/:iid",
                guarded("request", [&store](const auto& req, auto& res, std::string&) {
                  auto s = store.get(param(req, "id"));
                  s->delete_instance(param(req, "iid"));
                  send_json(res, {{"deleted", param(req, "iid")}, {"revision", s->revision()}});
                }));

  server.Put("/sessions/:id/compose_params",
             guarded("request", [&store](const auto& req, auto& res, std::string&) {
               auto s = store.get(param(req, "id"));
               json doc = parse_body(req);
               json full = scene_to_json(s->scene());
               for (auto it = doc.begin(); it != doc.end(); ++it) full["compose_params"][it.key()] = it.value();
               Scene parsed = scene_from_json(full);
               s->set_compose_params(parsed.params);
               send_json(res, {{"compose_params", full["compose_params"]}, {"revision", s->revision()}});
             }));

  server.Post("/sessions/:id/compose", guarded("compose", [&store](const auto& req, auto& res, std::string& where) {
    auto s = store.get(param(req, "id"));
    try {
      ComposeResult r = s->compose_now();
      send_json(res, {{"revision", r.revision},
                      {"vertices", r.mesh->vertices.size()},
                      {"faces", r.mesh->faces.size()},
                      {"stale", s->result_is_stale()}});
    } catch (...) {
      std::string stage = s->status().stage;
      if (!stage.empty()) where = stage;
      throw;
    }
  }));

  server.Get("/sessions/:id/result", guarded("request", [&store](const auto& req, auto& res, std::string&) {
    auto s = store.get(param(req, "id"));
    auto r = s->result();
    if (!r) throw NotFound("session " + s->id() + " has no composition result");
    res.set_header("X-Revision", std::to_string(r->revision));
    res.set_header("X-Stale", r->revision != s->revision() ? "true" : "false");
    res.set_content(format_obj(*r->mesh), "text/plain");
  }));

  server.Get("/sessions/:id/progress", guarded("request", [&store](const auto& req, auto& res, std::string&) {
    auto s = store.get(param(req, "id"));
    ComposeStatus st = s->status();
    auto r = s->result();
    json out = {{"running", st.running}, {"stage", st.stage}, {"revision", s->revision()}};
    out["result_revision"] = r ? json(r->revision) : json(nullptr);
    out["error"] = st.error.empty() ? json(nullptr) : json(st.error);
    send_json(res, out);
  }));
}

void serve(const std::string& host, int port, const std::filesystem::path& asset_root) {
  SessionStore store(asset_root);
  httplib::Server server;
  register_routes(server, store);
  if (!server.listen(host, port)) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace recompose
