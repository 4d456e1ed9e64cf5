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

#include "trajsim/scene.hpp"

#include <stdexcept>

namespace trajsim {

Vec2 Agent::velocity_at(int tick, double dt) const {
  const auto n = static_cast<int>(states.size());
  if (n < 2) return {};
  const int a = tick + 1 < n ? tick : tick - 1;
  return (1.0 / dt) * (states[static_cast<std::size_t>(a + 1)].position() -
                       states[static_cast<std::size_t>(a)].position());
}

void validate_scene(const Scene& scene) {
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("scene '" + scene.scene_id + "': " + what);
  };
  if (!(scene.ego_half_length > 0.0) || !(scene.ego_half_width > 0.0)) fail("ego extents must be positive");
  if (scene.ego_init.v < 0.0) fail("ego_init speed must be non-negative");
  if (scene.drivable.empty()) fail("drivable must be nonempty");
  if (scene.route.points().size() < 2 || !(arc_length(scene.route) > 0.0)) {
    fail("route must have positive arc length");
  }
  if (scene.route_polygon.vertices().size() < 3) fail("route_polygon must have >= 3 vertices");
  for (const Agent& agent : scene.agents) {
    if (agent.states.size() != static_cast<std::size_t>(kDenseLength)) {
      fail("agent '" + agent.id + "' states: expected " + std::to_string(kDenseLength) + " ticks, got " +
           std::to_string(agent.states.size()));
    }
    if (!(agent.half_length > 0.0) || !(agent.half_width > 0.0)) {
      fail("agent '" + agent.id + "' extents must be positive");
    }
  }
  for (const Intersection& inter : scene.intersections) {
    if (inter.light.phases.size() != static_cast<std::size_t>(kDenseLength)) {
      fail("intersection '" + inter.light.intersection_id + "' phases: expected " +
           std::to_string(kDenseLength) + " ticks, got " + std::to_string(inter.light.phases.size()));
    }
  }
  for (std::size_t i = 0; i < scene.lanes.size(); ++i) {
    const Lane& lane = scene.lanes[i];
    if (lane.centerline.points().size() < 2) fail("lanes[" + std::to_string(i) + "] centerline needs >= 2 points");
    if (lane.direction_sign != 1 && lane.direction_sign != -1) {
      fail("lanes[" + std::to_string(i) + "] direction_sign must be +1 or -1");
    }
  }
  if (scene.human_trajectory.poses.size() < 2) fail("human_trajectory needs >= 2 poses");
}

namespace {

Polygon transform_polygon(const Polygon& poly, const Pose& frame) {
  std::vector<Vec2> v;
  v.reserve(poly.vertices().size());
  for (const Vec2& p : poly.vertices()) v.push_back(transform_point(frame, p));
  return Polygon(std::move(v));
}

Polyline transform_polyline(const Polyline& line, const Pose& frame) {
  std::vector<Vec2> v;
  v.reserve(line.points().size());
  for (const Vec2& p : line.points()) v.push_back(transform_point(frame, p));
  return Polyline::deduplicated(v);
}

EgoState transform_state(const EgoState& s, const Pose& frame) {
  EgoState out = s;
  out.pose = compose(frame, s.pose);
  return out;
}

}  // namespace

Scene transform_scene(const Scene& scene, const Pose& frame) {
  Scene out = scene;
  out.ego_init = transform_state(scene.ego_init, frame);
  for (auto& s : out.ego_history) s = transform_state(s, frame);
  for (auto& agent : out.agents) {
    for (auto& p : agent.states) p = compose(frame, p);
  }
  for (auto& poly : out.drivable) poly = transform_polygon(poly, frame);
  out.route = transform_polyline(scene.route, frame);
  out.route_polygon = transform_polygon(scene.route_polygon, frame);
  for (auto& lane : out.lanes) lane.centerline = transform_polyline(lane.centerline, frame);
  for (auto& inter : out.intersections) inter.polygon = transform_polygon(inter.polygon, frame);
  return out;
}

}  // namespace trajsim
