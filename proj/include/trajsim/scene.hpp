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

// Log-replayed world state consumed by the metrics. All geometry is in the
// world frame except human_trajectory, which is in the ego frame at t.

#ifndef TRAJSIM_SCENE_HPP_
#define TRAJSIM_SCENE_HPP_

#include <string>
#include <vector>

#include "trajsim/geom.hpp"
#include "trajsim/kinematics.hpp"

namespace trajsim {

struct Agent {
  std::string id;
  double half_length = 0.0;
  double half_width = 0.0;
  std::vector<Pose> states;  // one pose per tick, kDenseLength entries
  bool is_static = false;

  OrientedBox box_at(int tick) const { return {states[static_cast<std::size_t>(tick)], half_length, half_width}; }
  // Replay velocity at `tick` from neighbouring states.
  Vec2 velocity_at(int tick, double dt = kTickInterval) const;
};

enum class LightPhase { kGreen, kYellow, kRed };

struct TrafficLight {
  std::string intersection_id;
  std::vector<LightPhase> phases;  // kDenseLength entries
};

struct Lane {
  Polyline centerline;
  int direction_sign = 1;  // legal travel direction relative to the polyline order
};

struct Intersection {
  Polygon polygon;
  TrafficLight light;
};

enum class Command { kLeft, kForward, kRight };

struct Scene {
  std::string scene_id;
  EgoState ego_init;
  double ego_half_length = 2.3;
  double ego_half_width = 0.95;
  std::vector<EgoState> ego_history;  // oldest first, last entry at t - 0.1 s
  std::vector<Agent> agents;
  std::vector<Polygon> drivable;
  Polyline route;
  Polygon route_polygon;
  std::vector<Lane> lanes;
  std::vector<Intersection> intersections;
  Trajectory human_trajectory;  // ego frame
  Command command = Command::kForward;

  OrientedBox ego_box(const Pose& pose) const { return {pose, ego_half_length, ego_half_width}; }
};

// Throws std::invalid_argument naming the offending field.
void validate_scene(const Scene& scene);

// Applies the rigid transform `frame` to every world-frame quantity.
Scene transform_scene(const Scene& scene, const Pose& frame);

}  // namespace trajsim

#endif  // TRAJSIM_SCENE_HPP_
