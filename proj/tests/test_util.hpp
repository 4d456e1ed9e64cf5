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

// Shared generators for the test suites.

#ifndef TRAJSIM_TESTS_TEST_UTIL_HPP_
#define TRAJSIM_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "trajsim/kinematics.hpp"
#include "trajsim/scene.hpp"

namespace trajsim::test_util {

// Plan produced by the bicycle model itself under constant commands, with
// lateral acceleration kept below 4 m/s^2. Returns the plan and the initial
// state that produced it.
inline std::pair<Trajectory, EgoState> feasible_plan(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const KinematicsConfig cfg;
  const double v0 = 15.0 * u(rng);
  const double accel = -2.0 + 3.5 * u(rng);
  const double v_max = std::max({v0, v0 + 4.0 * accel, 1.0});
  const double k_max = std::min(0.1, 4.0 / (v_max * v_max));
  const double steer = std::atan(cfg.wheelbase * k_max * (2.0 * u(rng) - 1.0));
  const EgoState init{{0, 0, 0}, v0, accel, steer};
  EgoState s = init;
  Trajectory plan;
  for (int k = 1; k <= 40; ++k) {
    s = bicycle_step(s, accel, steer, cfg);
    if (k % 5 == 0) plan.poses.push_back(s.pose);
  }
  return {plan, init};
}

inline Trajectory straight_plan(double speed, double lateral = 0.0) {
  Trajectory t;
  for (int i = 1; i <= 8; ++i) t.poses.push_back({speed * 0.5 * i, lateral, 0.0});
  return t;
}

// Ego-lane road along +x: own lane at y = 0, oncoming lane at y = 3.5,
// drivable strip y in [-1.75, 5.25]. History is constant speed `v0`.
inline Scene road_scene(double v0 = 10.0) {
  Scene s;
  s.scene_id = "road";
  s.ego_init = {{0, 0, 0}, v0, 0, 0};
  for (int k = 20; k >= 1; --k) s.ego_history.push_back({{-v0 * 0.1 * k, 0, 0}, v0, 0, 0});
  s.drivable.emplace_back(std::vector<Vec2>{{-100, -1.75}, {300, -1.75}, {300, 5.25}, {-100, 5.25}});
  s.route = Polyline({{-100, 0}, {300, 0}});
  s.route_polygon = Polygon({{-100, -1.75}, {300, -1.75}, {300, 1.75}, {-100, 1.75}});
  s.lanes.push_back({Polyline({{-100, 0}, {300, 0}}), 1});
  s.lanes.push_back({Polyline({{-100, 3.5}, {300, 3.5}}), -1});
  s.human_trajectory = straight_plan(v0);
  return s;
}

// Dense rollout along +x from (x0, y) with speed v + a t and heading 0.
inline DenseTrajectory line(double v, double a = 0.0, double x0 = 0.0, double y = 0.0) {
  DenseTrajectory d;
  for (int k = 0; k < kDenseLength; ++k) {
    const double t = kTickInterval * k;
    d.states.push_back({{x0 + v * t + 0.5 * a * t * t, y, 0}, v + a * t, a, 0});
  }
  return d;
}

inline Agent parked(std::string id, Pose at, double half_length = 2.3, double half_width = 0.95) {
  Agent a{std::move(id), half_length, half_width, std::vector<Pose>(kDenseLength, at), true};
  return a;
}

inline Agent moving(std::string id, Pose start, Vec2 velocity, double half_length = 2.3, double half_width = 0.95) {
  Agent a{std::move(id), half_length, half_width, {}, false};
  for (int k = 0; k < kDenseLength; ++k) {
    const double t = kTickInterval * k;
    a.states.push_back({start.x + velocity.x * t, start.y + velocity.y * t, start.psi});
  }
  return a;
}

}  // namespace trajsim::test_util

#endif  // TRAJSIM_TESTS_TEST_UTIL_HPP_
