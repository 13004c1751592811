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
#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "oracles.hpp"
#include "recompose/service.hpp"

using namespace recompose;
using nlohmann::json;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

GeneratorSpec small_sphere() { return {ShapeKind::Sphere, {.subdivisions = 2}, 0}; }

// Runs the API on an ephemeral localhost port for the lifetime of the object.
class TestServer {
 public:
  explicit TestServer(const std::filesystem::path& root) : store_(root) {
    register_routes(server_, store_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(120, 0);
    return c;
  }

 private:
  SessionStore store_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

json body(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

}  // namespace

TEST_CASE("session happy path: add, compose, export") {
  auto dir = fresh_dir("recompose_session_happy");
  Session s("s1", dir / "assets");
  CHECK(s.revision() == 0);
  auto added = s.add_generated_asset(small_sphere());
  CHECK(added.asset_id == "asset-1");
  REQUIRE(added.instance_id);
  CHECK(s.revision() == 1);
  CHECK_FALSE(s.result());
  CHECK_FALSE(s.result_is_stale());

  ComposeResult r = s.compose_now();
  CHECK(r.revision == 1);
  CHECK(is_watertight(*r.mesh));
  CHECK_FALSE(s.result_is_stale());
  CHECK(s.status().stage == "done");
  s.export_result(dir / "out.obj");
  CHECK(load_mesh(dir / "out.obj").faces.size() == r.mesh->faces.size());

  s.set_transform(*added.instance_id, Transform3::translation({1, 0, 0}));
  CHECK(s.revision() == 2);
  CHECK(s.result_is_stale());
  CHECK(s.result()->revision == 1);
}

TEST_CASE("duplicating an instance shares the asset") {
  Session s("s", fresh_dir("recompose_session_dup"));
  auto added = s.add_generated_asset(small_sphere());
  std::string copy = s.duplicate_instance(*added.instance_id);
  CHECK(copy != *added.instance_id);
  s.set_transform(copy, Transform3::translation({3, 0, 0}));
  Scene scene = s.scene();
  REQUIRE(scene.instances.size() == 2);
  CHECK(scene.instances[0].asset_id == scene.instances[1].asset_id);
  CHECK(scene.instances[0].transform != scene.instances[1].transform);
  CHECK(scene.assets.size() == 1);
  TriMesh m = *s.compose_now().mesh;
  CHECK(oracle::mesh_components(m) == 2);
}

TEST_CASE("dropping a whole asset makes compose fail with an empty selection") {
  Session s("s", fresh_dir("recompose_session_drop"));
  auto added = s.add_generated_asset(small_sphere());
  auto [kept, total] = s.paint(added.asset_id, {{{0, 0, 0}}, 2.0, BrushMode::Drop}, {});
  CHECK(kept == 0);
  CHECK(total > 0);
  CHECK(s.mask(added.asset_id).none_kept());
  try {
    s.compose_now();
    FAIL("expected EmptyResult");
  } catch (const EmptyResult& e) {
    CHECK(std::string(e.what()).find(*added.instance_id) != std::string::npos);
  }
  CHECK_FALSE(s.status().running);
  CHECK_FALSE(s.status().error.empty());
}

TEST_CASE("deleting an asset cascades to its instances") {
  Session s("s", fresh_dir("recompose_session_cascade"));
  auto a = s.add_generated_asset(small_sphere());
  auto b = s.add_generated_asset({ShapeKind::Box, {}, 0});
  s.duplicate_instance(*a.instance_id);
  CHECK(s.delete_asset(a.asset_id) == 2);
  Scene scene = s.scene();
  CHECK(scene.assets.size() == 1);
  REQUIRE(scene.instances.size() == 1);
  CHECK(scene.instances[0].id == *b.instance_id);
  CHECK_THROWS_AS(s.delete_asset(a.asset_id), NotFound);
  CHECK_THROWS_AS(s.set_transform("inst-404", {}), NotFound);
  CHECK_THROWS_AS(s.add_instance("asset-404"), NotFound);
  CHECK_THROWS_AS(s.set_transform(*b.instance_id, Transform3::scaling(0.0)), SingularTransform);
}

TEST_CASE("revisions increase on every mutation, including concurrent ones") {
  Session s("s", fresh_dir("recompose_session_rev"));
  auto a = s.add_generated_asset(small_sphere());
  std::uint64_t start = s.revision();
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) s.set_transform(*a.instance_id, Transform3::translation({double(t), double(i), 0}));
    });
  for (auto& th : threads) th.join();
  CHECK(s.revision() == start + 100);
}

TEST_CASE("a saved session scene composes byte-identically in a fresh store") {
  auto dir = fresh_dir("recompose_session_save");
  Session s("s", dir / "assets");
  auto cube = s.add_obj_asset(format_obj(oracle::box({0, 0, 0}, {1, 0.5, 0.5})));
  auto ball = s.add_generated_asset(small_sphere());
  s.set_transform(*ball.instance_id, Transform3::translation({1.2, 0.25, 0.25}) * Transform3::scaling(0.6));
  s.paint(ball.asset_id, {{{1.2, 0.25, 0.55}}, 0.15, BrushMode::Drop}, s.scene().instances[1].transform);
  s.duplicate_instance(*cube.instance_id);
  s.set_transform(s.scene().instances.back().id, Transform3::translation({0, 0.6, 0}));
  ComposeParams p;
  p.resolution = 40;
  s.set_compose_params(p);
  std::string in_session = format_obj(*s.compose_now().mesh);

  save_scene(s.scene(), dir / "saved" / "scene.json");
  Scene loaded = load_scene(dir / "saved" / "scene.json");
  CHECK(loaded == s.scene());
  CHECK(format_obj(compose_scene(loaded)) == in_session);

  // The same state reached by seeding a new session with the file.
  SessionStore store(dir / "other");
  auto fresh = store.create(loaded);
  CHECK(format_obj(*fresh->compose_now().mesh) == in_session);
}

TEST_CASE("compose params are validated") {
  Session s("s", fresh_dir("recompose_session_params"));
  ComposeParams p;
  p.closing_passes = 7;
  CHECK_THROWS_AS(s.set_compose_params(p), SchemaError);
  CHECK(s.revision() == 0);
}

TEST_CASE("session store") {
  SessionStore store(fresh_dir("recompose_store"));
  auto a = store.create();
  auto b = store.create();
  CHECK(a->id() != b->id());
  CHECK(store.get(a->id()) == a);
  store.erase(a->id());
  CHECK_THROWS_AS(store.get(a->id()), NotFound);
  CHECK_THROWS_AS(store.erase(a->id()), NotFound);
}

TEST_CASE("HTTP API end to end") {
  auto dir = fresh_dir("recompose_http");
  TestServer server(dir);
  auto cli = server.client();

  auto created = cli.Post("/sessions");
  REQUIRE(created);
  CHECK(created->status == 201);
  std::string sid = body(created)["id"];
  const std::string base = "/sessions/" + sid;

  // Generator asset with an instance.
  auto gen = cli.Post(base + "/assets", R"({"generator": {"kind": "sphere", "params": {"subdivisions": 2}}})",
                      "application/json");
  REQUIRE(gen);
  CHECK(gen->status == 201);
  json g = body(gen);
  std::string ball = g["asset_id"], ball_inst = g["instance_id"];

  // Multipart OBJ upload without an instance.
  httplib::MultipartFormDataItems items = {
      {"mesh", format_obj(oracle::box({0, 0, 0}, {0.5, 0.5, 0.5})), "cube.obj", "text/plain"}};
  auto up = cli.Post(base + "/assets?add_instance=false", items);
  REQUIRE(up);
  CHECK(up->status == 201);
  json u = body(up);
  std::string cube = u["asset_id"];
  CHECK(u["instance_id"].is_null());

  // Instances: add, duplicate, move.
  json t = transform_to_json(Transform3::translation({1.5, 0, 0}));
  auto inst = cli.Post(base + "/instances", json{{"asset_id", cube}, {"transform", t}}.dump(), "application/json");
  REQUIRE(inst);
  CHECK(inst->status == 201);
  std::string cube_inst = body(inst)["id"];
  auto dup = cli.Post(base + "/instances", json{{"duplicate_of", cube_inst}}.dump(), "application/json");
  REQUIRE(dup);
  std::string cube_dup = body(dup)["id"];
  auto moved = cli.Put(base + "/instances/" + cube_dup + "/transform",
                       json{{"transform", transform_to_json(Transform3::translation({1.5, 0.6, 0}))}}.dump(),
                       "application/json");
  REQUIRE(moved);
  CHECK(moved->status == 200);

  // A stroke on the sphere through its instance placement.
  auto stroke = cli.Post(base + "/assets/" + ball + "/strokes",
                         json{{"path", {{0, 0, 0.5}}}, {"radius", 0.3}, {"mode", "drop"}}.dump(), "application/json");
  REQUIRE(stroke);
  CHECK(stroke->status == 200);
  json st = body(stroke);
  CHECK(st["kept_count"] < st["total"]);
  json mask = body(cli.Get(base + "/assets/" + ball + "/mask"));
  CHECK(mask["kept_count"] == st["kept_count"]);
  CHECK(mask["kept"].size() == mask["total"]);

  // Compose, then fetch the result.
  auto comp = cli.Post(base + "/compose", "", "application/json");
  REQUIRE(comp);
  CHECK(comp->status == 200);
  json c = body(comp);
  CHECK(c["stale"] == false);
  CHECK(c["faces"] > 0);
  auto result = cli.Get(base + "/result");
  REQUIRE(result);
  CHECK(result->status == 200);
  CHECK(result->get_header_value("X-Revision") == std::to_string(c["revision"].get<std::uint64_t>()));
  CHECK(result->get_header_value("X-Stale") == "false");
  TriMesh decoded = parse_obj(result->body);
  CHECK(decoded.faces.size() == c["faces"]);
  CHECK(is_watertight(decoded));

  // The scene endpoint returns what the session holds.
  auto scene = cli.Get(base + "/scene");
  REQUIRE(scene);
  json sj = body(scene);
  CHECK(sj["instances"].size() == 3);
  CHECK(sj["assets"].size() == 2);
  CHECK(scene->has_header("X-Revision"));

  // Any mutation makes the stored result stale.
  auto params = cli.Put(base + "/compose_params", R"({"closing_passes": 2})", "application/json");
  REQUIRE(params);
  CHECK(params->status == 200);
  CHECK(cli.Get(base + "/result")->get_header_value("X-Stale") == "true");
  json progress = body(cli.Get(base + "/progress"));
  CHECK(progress["running"] == false);
  CHECK(progress["stage"] == "done");

  // Cascade delete reports the removed instances.
  auto del = cli.Delete(base + "/assets/" + cube);
  REQUIRE(del);
  CHECK(body(del)["deleted_instances"] == 2);
  CHECK(body(cli.Get(base + "/scene"))["instances"].size() == 1);
  auto del_inst = cli.Delete(base + "/instances/" + ball_inst);
  REQUIRE(del_inst);
  CHECK(del_inst->status == 200);

  // Nothing left to compose.
  auto empty = cli.Post(base + "/compose", "", "application/json");
  REQUIRE(empty);
  CHECK(empty->status == 422);
  CHECK(body(empty)["stage"] == "prepare");

  CHECK(cli.Delete(base)->status == 200);
  CHECK(cli.Get(base + "/scene")->status == 404);
}

TEST_CASE("HTTP error codes") {
  TestServer server(fresh_dir("recompose_http_errors"));
  auto cli = server.client();
  CHECK(cli.Get("/sessions/nope/scene")->status == 404);
  std::string sid = body(cli.Post("/sessions"))["id"];
  const std::string base = "/sessions/" + sid;

  auto bad_json = cli.Post(base + "/assets", "{oops", "application/json");
  CHECK(bad_json->status == 400);
  CHECK(body(bad_json).contains("error"));

  auto bad_gen = cli.Post(base + "/assets", R"({"generator": {"kind": "sphere", "params": {"radius": "x"}}})",
                          "application/json");
  CHECK(bad_gen->status == 400);
  CHECK(body(bad_gen)["path"] == "/generator/params/radius");

  auto bad_obj = cli.Post(base + "/assets", "v 0 0 0\nf 1 2 3\n", "text/plain");
  CHECK(bad_obj->status == 400);
  CHECK(body(bad_obj).contains("line"));

  CHECK(cli.Put(base + "/instances/inst-9/transform", transform_to_json({}).dump(), "application/json")->status ==
        404);
  CHECK(cli.Post(base + "/assets/asset-9/strokes", R"({"path": [[0,0,0]], "radius": 1, "mode": "keep"})",
                 "application/json")
            ->status == 404);
  CHECK(cli.Get(base + "/result")->status == 404);
  auto bad_params = cli.Put(base + "/compose_params", R"({"resolution": 2})", "application/json");
  CHECK(bad_params->status == 400);
  CHECK(body(bad_params)["path"] == "/compose_params/resolution");

  // Dropping everything gives 422 with the failing stage.
  json g = body(cli.Post(base + "/assets", R"({"generator": {"kind": "sphere", "params": {"subdivisions": 1}}})",
                         "application/json"));
  std::string aid = g["asset_id"];
  cli.Post(base + "/assets/" + aid + "/strokes", R"({"path": [[0,0,0]], "radius": 5, "mode": "drop"})",
           "application/json");
  auto empty = cli.Post(base + "/compose", "", "application/json");
  CHECK(empty->status == 422);
  json e = body(empty);
  CHECK(std::string(e["error"]).find(std::string(g["instance_id"])) != std::string::npos);
}

TEST_CASE("a session created from a scene body") {
  TestServer server(fresh_dir("recompose_http_seed"));
  auto cli = server.client();
  Scene s;
  s.assets.push_back({"ball", std::nullopt, small_sphere(), true, {}});
  s.instances.push_back({"one", "ball", {}});
  s.params.resolution = 32;
  auto created = cli.Post("/sessions", scene_to_json(s).dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  std::string sid = body(created)["id"];
  json scene = body(cli.Get("/sessions/" + sid + "/scene"));
  CHECK(scene_from_json(scene) == s);
  auto bad = cli.Post("/sessions", R"({"version": 1, "assets": [], "instances": [], "colour": 1})",
                      "application/json");
  CHECK(bad->status == 400);
  CHECK(body(bad)["path"] == "/colour");
}
