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

#include "trajsim/scene_io.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace trajsim {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw FormatError(where + ": " + what);
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

const Json& array(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_array()) fail(where + "." + key, "expected an array");
  return v;
}

std::string string_field(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

Json pose_json(const Pose& p) { return Json{{"x_m", p.x}, {"y_m", p.y}, {"psi_rad", p.psi}}; }

Pose pose_from(const Json& j, const std::string& where) {
  return {number(j, "x_m", where), number(j, "y_m", where), number(j, "psi_rad", where)};
}

Json state_json(const EgoState& s) {
  return Json{{"x_m", s.pose.x},     {"y_m", s.pose.y},     {"psi_rad", s.pose.psi},
              {"v_mps", s.v},        {"a_mps2", s.a},       {"steer_rad", s.steer}};
}

EgoState state_from(const Json& j, const std::string& where) {
  return {pose_from(j, where), number(j, "v_mps", where), number(j, "a_mps2", where),
          number(j, "steer_rad", where)};
}

Json points_json(const std::vector<Vec2>& pts) {
  Json arr = Json::array();
  for (const Vec2& p : pts) arr.push_back(Json::array({p.x, p.y}));
  return arr;
}

std::vector<Vec2> points_from(const Json& arr, const std::string& where) {
  if (!arr.is_array()) fail(where, "expected an array of [x, y] points");
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Json& p = arr[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      fail(where + "[" + std::to_string(i) + "]", "expected [x, y]");
    }
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return pts;
}

Polygon polygon_from(const Json& arr, const std::string& where) {
  try {
    return Polygon(points_from(arr, where));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

Polyline polyline_from(const Json& arr, const std::string& where) {
  try {
    return Polyline(points_from(arr, where));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

Json trajectory_json(const Trajectory& t) {
  Json arr = Json::array();
  for (const Pose& p : t.poses) arr.push_back(pose_json(p));
  return arr;
}

Trajectory trajectory_from(const Json& arr, const std::string& where) {
  if (!arr.is_array()) fail(where, "expected an array of poses");
  Trajectory t;
  for (std::size_t i = 0; i < arr.size(); ++i) t.poses.push_back(pose_from(arr[i], where + "[" + std::to_string(i) + "]"));
  return t;
}

const char* phase_name(LightPhase p) {
  switch (p) {
    case LightPhase::kGreen: return "green";
    case LightPhase::kYellow: return "yellow";
    case LightPhase::kRed: return "red";
  }
  return "red";
}

LightPhase phase_from(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a phase string");
  const auto s = j.get<std::string>();
  if (s == "green") return LightPhase::kGreen;
  if (s == "yellow") return LightPhase::kYellow;
  if (s == "red") return LightPhase::kRed;
  fail(where, "unknown phase '" + s + "'");
}

const char* command_name(Command c) {
  switch (c) {
    case Command::kLeft: return "left";
    case Command::kForward: return "forward";
    case Command::kRight: return "right";
  }
  return "forward";
}

Command command_from(const std::string& s, const std::string& where) {
  if (s == "left") return Command::kLeft;
  if (s == "forward") return Command::kForward;
  if (s == "right") return Command::kRight;
  fail(where, "unknown command '" + s + "'");
}

void check_version(const Json& doc, const std::string& what) {
  const Json& v = field(doc, "schema_version", what);
  if (!v.is_number_integer() || v.get<int>() != kSceneSchemaVersion) {
    throw VersionError(what + ": unsupported schema_version " + v.dump() + " (expected " +
                       std::to_string(kSceneSchemaVersion) + ")");
  }
}

Json parse(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(what + ": malformed JSON: " + e.what());
  }
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
  Json doc;
  doc["schema_version"] = kSceneSchemaVersion;
  doc["scene_id"] = scene.scene_id;
  doc["command"] = command_name(scene.command);

  Json ego;
  ego["half_length_m"] = scene.ego_half_length;
  ego["half_width_m"] = scene.ego_half_width;
  ego["init"] = state_json(scene.ego_init);
  Json history = Json::array();
  for (const EgoState& s : scene.ego_history) history.push_back(state_json(s));
  ego["history"] = std::move(history);
  doc["ego"] = std::move(ego);

  Json agents = Json::array();
  for (const Agent& a : scene.agents) {
    Json states = Json::array();
    for (const Pose& p : a.states) states.push_back(pose_json(p));
    agents.push_back(Json{{"id", a.id},
                          {"half_length_m", a.half_length},
                          {"half_width_m", a.half_width},
                          {"is_static", a.is_static},
                          {"states", std::move(states)}});
  }
  doc["agents"] = std::move(agents);

  Json map;
  Json drivable = Json::array();
  for (const Polygon& poly : scene.drivable) drivable.push_back(points_json(poly.vertices()));
  map["drivable_polygons_m"] = std::move(drivable);
  map["route_centerline_m"] = points_json(scene.route.points());
  map["route_polygon_m"] = points_json(scene.route_polygon.vertices());
  Json lanes = Json::array();
  for (const Lane& lane : scene.lanes) {
    lanes.push_back(Json{{"centerline_m", points_json(lane.centerline.points())},
                         {"direction_sign", lane.direction_sign}});
  }
  map["lanes"] = std::move(lanes);
  Json intersections = Json::array();
  for (const Intersection& inter : scene.intersections) {
    Json phases = Json::array();
    for (LightPhase p : inter.light.phases) phases.push_back(phase_name(p));
    intersections.push_back(Json{{"id", inter.light.intersection_id},
                                 {"polygon_m", points_json(inter.polygon.vertices())},
                                 {"light_phases_per_tick", std::move(phases)}});
  }
  map["intersections"] = std::move(intersections);
  doc["map"] = std::move(map);

  doc["human_trajectory_ego_frame"] = trajectory_json(scene.human_trajectory);
  return doc.dump(1) + "\n";
}

Scene scene_from_json(const std::string& text) {
  const Json doc = parse(text, "scene");
  check_version(doc, "scene");
  Scene s;
  s.scene_id = string_field(doc, "scene_id", "scene");
  const std::string where = "scene '" + s.scene_id + "'";
  s.command = command_from(string_field(doc, "command", where), where + ".command");

  const Json& ego = field(doc, "ego", where);
  s.ego_half_length = number(ego, "half_length_m", where + ".ego");
  s.ego_half_width = number(ego, "half_width_m", where + ".ego");
  s.ego_init = state_from(field(ego, "init", where + ".ego"), where + ".ego.init");
  const Json& history = array(ego, "history", where + ".ego");
  for (std::size_t i = 0; i < history.size(); ++i) {
    s.ego_history.push_back(state_from(history[i], where + ".ego.history[" + std::to_string(i) + "]"));
  }

  const Json& agents = array(doc, "agents", where);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string aw = where + ".agents[" + std::to_string(i) + "]";
    Agent a;
    a.id = string_field(agents[i], "id", aw);
    a.half_length = number(agents[i], "half_length_m", aw);
    a.half_width = number(agents[i], "half_width_m", aw);
    const Json& is_static = field(agents[i], "is_static", aw);
    if (!is_static.is_boolean()) fail(aw + ".is_static", "expected a boolean");
    a.is_static = is_static.get<bool>();
    const Json& states = array(agents[i], "states", aw);
    for (std::size_t k = 0; k < states.size(); ++k) {
      a.states.push_back(pose_from(states[k], aw + ".states[" + std::to_string(k) + "]"));
    }
    s.agents.push_back(std::move(a));
  }

  const std::string mw = where + ".map";
  const Json& map = field(doc, "map", where);
  const Json& drivable = array(map, "drivable_polygons_m", mw);
  for (std::size_t i = 0; i < drivable.size(); ++i) {
    s.drivable.push_back(polygon_from(drivable[i], mw + ".drivable_polygons_m[" + std::to_string(i) + "]"));
  }
  s.route = polyline_from(field(map, "route_centerline_m", mw), mw + ".route_centerline_m");
  s.route_polygon = polygon_from(field(map, "route_polygon_m", mw), mw + ".route_polygon_m");
  const Json& lanes = array(map, "lanes", mw);
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const std::string lw = mw + ".lanes[" + std::to_string(i) + "]";
    const Json& sign = field(lanes[i], "direction_sign", lw);
    if (!sign.is_number_integer()) fail(lw + ".direction_sign", "expected +1 or -1");
    s.lanes.push_back({polyline_from(field(lanes[i], "centerline_m", lw), lw + ".centerline_m"), sign.get<int>()});
  }
  const Json& intersections = array(map, "intersections", mw);
  for (std::size_t i = 0; i < intersections.size(); ++i) {
    const std::string iw = mw + ".intersections[" + std::to_string(i) + "]";
    Intersection inter;
    inter.light.intersection_id = string_field(intersections[i], "id", iw);
    inter.polygon = polygon_from(field(intersections[i], "polygon_m", iw), iw + ".polygon_m");
    const Json& phases = array(intersections[i], "light_phases_per_tick", iw);
    for (std::size_t k = 0; k < phases.size(); ++k) {
      inter.light.phases.push_back(phase_from(phases[k], iw + ".light_phases_per_tick[" + std::to_string(k) + "]"));
    }
    s.intersections.push_back(std::move(inter));
  }

  s.human_trajectory = trajectory_from(field(doc, "human_trajectory_ego_frame", where),
                                       where + ".human_trajectory_ego_frame");
  try {
    validate_scene(s);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_locked(const std::filesystem::path& path, const std::string& bytes) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw std::runtime_error("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
  struct Closer {
    int fd;
    ~Closer() { ::close(fd); }
  } closer{fd};
  if (::flock(fd, LOCK_EX) != 0 || ::ftruncate(fd, 0) != 0) {
    throw std::runtime_error("cannot lock '" + path.string() + "': " + std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("write to '" + path.string() + "' failed: " + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
  ::flock(fd, LOCK_UN);
}

Scene load_scene(const std::filesystem::path& path) {
  try {
    return scene_from_json(read_file(path));
  } catch (const VersionError& e) {
    throw VersionError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  write_file_locked(path, scene_to_json(scene));
}

std::vector<std::filesystem::path> list_scene_files(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw FormatError("scene directory '" + dir.string() + "' does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (files.empty()) throw FormatError("scene directory '" + dir.string() + "' contains no .json scenes");
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<Scene> load_scene_dir(const std::filesystem::path& dir) {
  std::vector<Scene> scenes;
  for (const auto& file : list_scene_files(dir)) scenes.push_back(load_scene(file));
  return scenes;
}

std::vector<Trajectory> load_corpus(const std::filesystem::path& dir) {
  std::vector<Trajectory> corpus;
  for (const Scene& s : load_scene_dir(dir)) corpus.push_back(s.human_trajectory);
  return corpus;
}

std::string trajectory_frames_to_json(const std::vector<TrajectoryFrame>& frames) {
  Json doc;
  doc["schema_version"] = kSceneSchemaVersion;
  Json arr = Json::array();
  for (const TrajectoryFrame& f : frames) {
    Json trajs = Json::array();
    for (const Trajectory& t : f.trajectories) trajs.push_back(trajectory_json(t));
    arr.push_back(Json{{"scene_id", f.scene_id}, {"trajectories_ego_frame", std::move(trajs)}});
  }
  doc["frames"] = std::move(arr);
  return doc.dump(1) + "\n";
}

std::vector<TrajectoryFrame> trajectory_frames_from_json(const std::string& text) {
  const Json doc = parse(text, "trajectory file");
  check_version(doc, "trajectory file");
  std::vector<TrajectoryFrame> frames;
  const Json& arr = array(doc, "frames", "trajectory file");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string fw = "frames[" + std::to_string(i) + "]";
    TrajectoryFrame f;
    f.scene_id = string_field(arr[i], "scene_id", fw);
    const Json& trajs = array(arr[i], "trajectories_ego_frame", fw);
    for (std::size_t j = 0; j < trajs.size(); ++j) {
      f.trajectories.push_back(trajectory_from(trajs[j], fw + ".trajectories_ego_frame[" + std::to_string(j) + "]"));
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<TrajectoryFrame> load_trajectory_frames(const std::filesystem::path& path) {
  try {
    return trajectory_frames_from_json(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_trajectory_frames(const std::vector<TrajectoryFrame>& frames, const std::filesystem::path& path) {
  write_file_locked(path, trajectory_frames_to_json(frames));
}

std::vector<ScoreFrame> load_score_frames(const std::filesystem::path& path) {
  const std::string what = path.string();
  const Json doc = parse(read_file(path), what);
  check_version(doc, what);
  std::vector<ScoreFrame> frames;
  const Json& arr = array(doc, "frames", what);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string fw = what + ": frames[" + std::to_string(i) + "]";
    ScoreFrame f;
    f.scene_id = string_field(arr[i], "scene_id", fw);
    const Json& scores = array(arr[i], "scores", fw);
    for (const Json& v : scores) {
      if (!v.is_number()) fail(fw + ".scores", "expected numbers");
      f.scores.push_back(v.get<double>());
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

void save_score_frames(const std::vector<ScoreFrame>& frames, const std::filesystem::path& path) {
  Json doc;
  doc["schema_version"] = kSceneSchemaVersion;
  Json arr = Json::array();
  for (const ScoreFrame& f : frames) arr.push_back(Json{{"scene_id", f.scene_id}, {"scores", f.scores}});
  doc["frames"] = std::move(arr);
  write_file_locked(path, doc.dump(1) + "\n");
}

}  // namespace trajsim
