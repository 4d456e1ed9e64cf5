// Copyright 2026 The trajsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "trajsim/metrics.hpp"
#include "trajsim/scene_io.hpp"
#include "trajsim/synthetic.hpp"

using namespace trajsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("trajsim_io_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

void check_same_scene(const Scene& a, const Scene& b) {
  CHECK(a.scene_id == b.scene_id);
  CHECK(a.ego_init == b.ego_init);
  CHECK(a.ego_half_length == b.ego_half_length);
  CHECK(a.ego_history == b.ego_history);
  REQUIRE(a.agents.size() == b.agents.size());
  for (std::size_t i = 0; i < a.agents.size(); ++i) {
    CHECK(a.agents[i].id == b.agents[i].id);
    CHECK(a.agents[i].states == b.agents[i].states);
    CHECK(a.agents[i].is_static == b.agents[i].is_static);
  }
  REQUIRE(a.drivable.size() == b.drivable.size());
  for (std::size_t i = 0; i < a.drivable.size(); ++i) CHECK(a.drivable[i].vertices() == b.drivable[i].vertices());
  CHECK(a.route.points() == b.route.points());
  CHECK(a.route_polygon.vertices() == b.route_polygon.vertices());
  REQUIRE(a.lanes.size() == b.lanes.size());
  REQUIRE(a.intersections.size() == b.intersections.size());
  for (std::size_t i = 0; i < a.intersections.size(); ++i) {
    CHECK(a.intersections[i].light.phases == b.intersections[i].light.phases);
    CHECK(a.intersections[i].light.intersection_id == b.intersections[i].light.intersection_id);
  }
  CHECK(a.human_trajectory == b.human_trajectory);
  CHECK(a.command == b.command);
}

nlohmann::ordered_json clean_json() {
  return nlohmann::ordered_json::parse(scene_to_json(generate_scene({SceneTemplate::kCleanStraight, 1})));
}

}  // namespace

TEST_CASE("scene files round trip exactly") {
  TempDir tmp;
  for (SceneTemplate kind : kAllTemplates) {
    const Scene s = generate_scene({kind, 17});
    const fs::path file = tmp.path / "scene.json";
    save_scene(s, file);
    const Scene back = load_scene(file);
    check_same_scene(s, back);
    const std::string first = read_file(file);
    save_scene(back, file);
    CHECK(read_file(file) == first);
  }
}

TEST_CASE("scene validation names the offending field") {
  auto j = clean_json();
  REQUIRE(!j["agents"].empty());
  const std::string id = j["agents"][0]["id"];
  j["agents"][0]["states"].erase(0);
  try {
    scene_from_json(j.dump());
    FAIL("expected an error");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find(id) != std::string::npos);
    CHECK(msg.find("states") != std::string::npos);
  }

  auto empty = clean_json();
  empty["map"]["drivable_polygons_m"] = nlohmann::ordered_json::array();
  CHECK_THROWS(scene_from_json(empty.dump()));

  auto missing = clean_json();
  missing["ego"].erase("init");
  CHECK_THROWS_AS(scene_from_json(missing.dump()), FormatError);

  CHECK_THROWS_AS(scene_from_json("{not json"), FormatError);
}

TEST_CASE("unknown schema version is rejected before anything else") {
  auto j = clean_json();
  j["schema_version"] = 2;
  j["agents"][0]["states"] = nlohmann::ordered_json::array();
  CHECK_THROWS_AS(scene_from_json(j.dump()), VersionError);
  j.erase("schema_version");
  CHECK_THROWS_AS(scene_from_json(j.dump()), FormatError);
}

TEST_CASE("corpus loading") {
  TempDir tmp;
  CHECK_THROWS_AS(load_corpus(tmp.path), FormatError);
  CHECK_THROWS_AS(load_corpus(tmp.path / "missing"), FormatError);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    save_scene(generate_scene({kAllTemplates[seed], seed}), tmp.path / ("s" + std::to_string(seed) + ".json"));
  }
  write_file_locked(tmp.path / "notes.txt", "ignored\n");
  const std::vector<Trajectory> corpus = load_corpus(tmp.path);
  const std::vector<Scene> scenes = load_scene_dir(tmp.path);
  REQUIRE(corpus.size() == 3);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    // Waypoint 0 is 0.5 s ahead of the ego, which sits at the origin.
    const Pose& first = corpus[i].poses.front();
    CHECK(norm(first.position()) <= 0.5 * scenes[i].ego_init.v + 0.5);
    CHECK(std::abs(first.y) < 0.5);
    CHECK(corpus[i] == scenes[i].human_trajectory);
  }
  CHECK(list_scene_files(tmp.path).size() == 3);
}

TEST_CASE("trajectory and score frames round trip") {
  TempDir tmp;
  std::vector<TrajectoryFrame> frames;
  for (int f = 0; f < 3; ++f) {
    TrajectoryFrame tf{"seq_" + std::to_string(f), {}};
    for (SceneTemplate kind : kAllTemplates) tf.trajectories.push_back(probe_plan({kind, static_cast<std::uint64_t>(f)}));
    frames.push_back(tf);
  }
  save_trajectory_frames(frames, tmp.path / "p.json");
  const auto back = load_trajectory_frames(tmp.path / "p.json");
  REQUIRE(back.size() == frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(back[i].scene_id == frames[i].scene_id);
    CHECK(back[i].trajectories == frames[i].trajectories);
  }

  const std::vector<ScoreFrame> scores{{"a", {0.1, 1.0 / 3.0}}, {"b", {0.9}}};
  save_score_frames(scores, tmp.path / "s.json");
  const auto sback = load_score_frames(tmp.path / "s.json");
  REQUIRE(sback.size() == 2);
  CHECK(sback[0].scores == scores[0].scores);
  CHECK(sback[1].scene_id == "b");
}

TEST_CASE("synthetic generation is deterministic") {
  for (SceneTemplate kind : kAllTemplates) {
    CHECK(scene_to_json(generate_scene({kind, 9})) == scene_to_json(generate_scene({kind, 9})));
    CHECK(scene_to_json(generate_scene({kind, 9})) != scene_to_json(generate_scene({kind, 10})));
    CHECK(parse_template(template_name(kind)) == kind);
    CHECK(probe_plan({kind, 9}) == probe_plan({kind, 9}));
    const Scene s = generate_scene({kind, 4});
    CHECK_NOTHROW(validate_scene(s));
    const auto [lo, hi] = speed_range(kind);
    CHECK(s.ego_init.v >= lo);
    CHECK(s.ego_init.v <= hi);
  }
  CHECK_THROWS_AS(parse_template("highway"), std::invalid_argument);
}

TEST_CASE("sequence frames advance the ego consistently") {
  const std::vector<Scene> seq = generate_sequence(10, 8.0, 3);
  REQUIRE(seq.size() == 10);
  for (std::size_t f = 1; f < seq.size(); ++f) {
    CHECK(norm(seq[f].ego_init.pose.position() - seq[f - 1].ego_init.pose.position()) ==
          doctest::Approx(4.0).epsilon(1e-9));
    CHECK(seq[f].scene_id != seq[f - 1].scene_id);
  }
}

TEST_CASE("locked writes leave one complete file") {
  TempDir tmp;
  const fs::path file = tmp.path / "out.bin";
  std::vector<std::string> payloads;
  for (int i = 0; i < 8; ++i) payloads.push_back(std::string(50000 + 1000 * i, static_cast<char>('a' + i)));
  {
    std::vector<std::jthread> writers;
    for (const std::string& p : payloads) writers.emplace_back([&file, &p] { write_file_locked(file, p); });
  }
  const std::string got = read_file(file);
  CHECK(std::find(payloads.begin(), payloads.end(), got) != payloads.end());
  CHECK_THROWS(read_file(tmp.path / "absent"));
}
