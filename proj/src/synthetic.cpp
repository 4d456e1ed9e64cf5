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

#include "trajsim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "trajsim/rng.hpp"

namespace trajsim {

namespace {

constexpr double kLaneWidth = 3.5;
constexpr double kRoadStart = -80.0;
constexpr double kRoadEnd = 220.0;
constexpr int kHistoryLength = 20;

struct Params {
  double v0 = 0.0;
  double gap = 0.0;           // parked_agent: center distance to the parked car
  double crossing_speed = 0.0;
  double crossing_time = 0.0;
  double stop_line = 0.0;     // red_light: x of the intersection entry
  double drift_offset = 0.0;  // lane_drift
  double oncoming_x = 0.0;    // clean_straight: oncoming car start
  double oncoming_speed = 0.0;
  double lead_gap = 0.0;      // clean_straight: same-lane lead car
  Pose frame;
};

Params draw_params(const SyntheticSpec& spec) {
  Rng rng(splitmix64(spec.seed ^ (static_cast<std::uint64_t>(spec.kind) << 56)));
  const auto [lo, hi] = speed_range(spec.kind);
  Params p;
  const double drawn_speed = uniform(rng, lo, hi);
  p.v0 = spec.ego_speed.value_or(drawn_speed);
  if (p.v0 < lo || p.v0 > hi) {
    throw std::invalid_argument("ego_speed outside the template range for " +
                                std::string(template_name(spec.kind)));
  }
  p.gap = p.v0 * p.v0 / 4.0 + 6.0 + 6.0 * uniform01(rng);
  p.crossing_speed = uniform(rng, 6.0, 10.0);
  p.crossing_time = uniform(rng, 1.5, 2.0);
  p.stop_line = p.v0 * p.v0 / 5.0 + 5.0;
  p.drift_offset = uniform(rng, 1.0, 1.5);
  p.oncoming_x = uniform(rng, 20.0, 120.0);
  p.oncoming_speed = uniform(rng, 5.0, 12.0);
  p.lead_gap = uniform(rng, 30.0, 50.0);
  if (spec.randomize_frame) {
    p.frame = {uniform(rng, -500.0, 500.0), uniform(rng, -500.0, 500.0),
               normalize_angle(uniform(rng, -std::numbers::pi, std::numbers::pi))};
  }
  return p;
}

Polygon rect(double x0, double x1, double y0, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

// Samples an ego-frame plan from longitudinal and lateral position profiles.
template <typename Lon, typename Lat>
Trajectory sample_plan(Lon lon, Lat lat) {
  Trajectory t;
  constexpr double h = 1e-4;
  for (int i = 1; i <= 8; ++i) {
    const double time = kWaypointInterval * i;
    const double dx = lon(time + h) - lon(time - h);
    const double dy = lat(time + h) - lat(time - h);
    const double psi = (std::hypot(dx, dy) > 1e-9) ? std::atan2(dy, dx) : 0.0;
    t.poses.push_back({lon(time), lat(time), psi});
  }
  return t;
}

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

// Stops after `stop_distance` with a symmetric trapezoidal deceleration:
// ramp in over r, hold D, ramp out over r. Total time is 2 * distance / v0.
Trajectory braking_plan(double v0, double stop_distance) {
  const double total = 2.0 * stop_distance / v0;
  const double r = std::min(1.0, total / 3.0);
  const double decel = v0 / (total - r);
  const double x_r = v0 * r - decel * r * r / 6.0;
  const double v_r = v0 - 0.5 * decel * r;
  return sample_plan(
      [=](double t) {
        if (t <= 0.0) return v0 * t;
        if (t <= r) return v0 * t - decel * t * t * t / (6.0 * r);
        if (t <= total - r) {
          const double u = t - r;
          return x_r + v_r * u - 0.5 * decel * u * u;
        }
        const double left = std::max(total - t, 0.0);
        return stop_distance - decel * left * left * left / (6.0 * r);
      },
      [](double) { return 0.0; });
}

Trajectory constant_speed_plan(double v0) {
  return sample_plan([=](double t) { return v0 * t; }, [](double) { return 0.0; });
}

Agent moving_agent(std::string id, Pose start, Vec2 velocity) {
  Agent a;
  a.id = std::move(id);
  a.half_length = 2.3;
  a.half_width = 0.95;
  for (int k = 0; k < kDenseLength; ++k) {
    const double t = kTickInterval * k;
    a.states.push_back({start.x + velocity.x * t, start.y + velocity.y * t, start.psi});
  }
  a.is_static = velocity.x == 0.0 && velocity.y == 0.0;
  return a;
}

Scene base_road(std::string id, double v0, double road_end) {
  Scene s;
  s.scene_id = std::move(id);
  s.ego_init = {{0.0, 0.0, 0.0}, v0, 0.0, 0.0};
  for (int n = kHistoryLength; n >= 1; --n) {
    s.ego_history.push_back({{-v0 * kTickInterval * n, 0.0, 0.0}, v0, 0.0, 0.0});
  }
  const double half = 0.5 * kLaneWidth;
  s.drivable.push_back(rect(kRoadStart, road_end, -half, kLaneWidth + half));
  s.route = Polyline({{kRoadStart, 0.0}, {road_end, 0.0}});
  s.route_polygon = rect(kRoadStart, road_end, -half, half);
  s.lanes.push_back({Polyline({{kRoadStart, 0.0}, {road_end, 0.0}}), 1});
  s.lanes.push_back({Polyline({{kRoadStart, kLaneWidth}, {road_end, kLaneWidth}}), -1});
  s.command = Command::kForward;
  return s;
}

std::string scene_name(const SyntheticSpec& spec) {
  return std::string(template_name(spec.kind)) + "_" + std::to_string(spec.seed);
}

}  // namespace

std::string_view template_name(SceneTemplate t) {
  switch (t) {
    case SceneTemplate::kCleanStraight: return "clean_straight";
    case SceneTemplate::kParkedAgent: return "parked_agent";
    case SceneTemplate::kCrossingAgent: return "crossing_agent";
    case SceneTemplate::kRedLight: return "red_light";
    case SceneTemplate::kOncomingLane: return "oncoming_lane";
    case SceneTemplate::kLaneDrift: return "lane_drift";
  }
  return "unknown";
}

SceneTemplate parse_template(std::string_view name) {
  for (SceneTemplate t : kAllTemplates) {
    if (template_name(t) == name) return t;
  }
  throw std::invalid_argument("unknown scene template '" + std::string(name) + "'");
}

std::pair<double, double> speed_range(SceneTemplate kind) {
  switch (kind) {
    case SceneTemplate::kCleanStraight: return {5.0, 15.0};
    case SceneTemplate::kParkedAgent: return {8.0, 12.0};
    case SceneTemplate::kCrossingAgent: return {8.0, 12.0};
    case SceneTemplate::kRedLight: return {6.0, 12.0};
    case SceneTemplate::kOncomingLane: return {6.0, 12.0};
    case SceneTemplate::kLaneDrift: return {6.0, 12.0};
  }
  return {5.0, 15.0};
}

Scene generate_scene(const SyntheticSpec& spec) {
  const Params p = draw_params(spec);
  Scene s = base_road(scene_name(spec), p.v0, kRoadEnd);
  const double car = 2.0 * 2.3;
  switch (spec.kind) {
    case SceneTemplate::kCleanStraight:
      s.human_trajectory = constant_speed_plan(p.v0);
      s.agents.push_back(moving_agent("oncoming", {p.oncoming_x, kLaneWidth, std::numbers::pi},
                                      {-p.oncoming_speed, 0.0}));
      s.agents.push_back(moving_agent("lead", {p.lead_gap, 0.0, 0.0}, {p.v0, 0.0}));
      break;
    case SceneTemplate::kParkedAgent:
      s.human_trajectory = braking_plan(p.v0, p.gap - car - 3.0);
      s.agents.push_back(moving_agent("parked", {p.gap, 0.0, 0.0}, {0.0, 0.0}));
      break;
    case SceneTemplate::kCrossingAgent: {
      const double x_cross = p.v0 * (p.crossing_time + 1.5) + 4.5;
      s.human_trajectory = constant_speed_plan(p.v0);
      s.agents.push_back(moving_agent(
          "crossing", {x_cross, -p.crossing_speed * p.crossing_time, 0.5 * std::numbers::pi},
          {0.0, p.crossing_speed}));
      break;
    }
    case SceneTemplate::kRedLight: {
      s.human_trajectory = braking_plan(p.v0, p.stop_line - 2.3 - 1.0);
      Intersection inter{rect(p.stop_line, p.stop_line + 20.0, -0.5 * kLaneWidth, 1.5 * kLaneWidth),
                         {"junction_0", std::vector<LightPhase>(kDenseLength, LightPhase::kRed)}};
      s.intersections.push_back(std::move(inter));
      break;
    }
    case SceneTemplate::kOncomingLane:
    case SceneTemplate::kLaneDrift:
      s.human_trajectory = constant_speed_plan(p.v0);
      break;
  }
  return transform_scene(s, p.frame);
}

Trajectory probe_plan(const SyntheticSpec& spec) {
  const Params p = draw_params(spec);
  const double v0 = p.v0;
  switch (spec.kind) {
    case SceneTemplate::kCleanStraight:
    case SceneTemplate::kCrossingAgent:
      return generate_scene(spec).human_trajectory;
    case SceneTemplate::kParkedAgent:
    case SceneTemplate::kRedLight:
      return constant_speed_plan(v0);
    case SceneTemplate::kOncomingLane:
      return sample_plan([=](double t) { return v0 * t; },
                         [](double t) { return kLaneWidth * smoothstep(t / 1.5); });
    case SceneTemplate::kLaneDrift: {
      const double offset = p.drift_offset;
      return sample_plan([=](double t) { return v0 * t; },
                         [=](double t) { return offset * smoothstep(t / 1.0); });
    }
  }
  return constant_speed_plan(v0);
}

std::vector<Scene> generate_sequence(int frames, double speed, std::uint64_t seed) {
  if (frames < 1) throw std::invalid_argument("sequence needs at least one frame");
  Rng rng(splitmix64(seed));
  const Pose frame{uniform(rng, -500.0, 500.0), uniform(rng, -500.0, 500.0),
                   normalize_angle(uniform(rng, -std::numbers::pi, std::numbers::pi))};
  const double advance = speed * kWaypointInterval;
  std::vector<Scene> out;
  for (int f = 0; f < frames; ++f) {
    char id[32];
    std::snprintf(id, sizeof id, "seq_%04d", f);
    Scene s = base_road(id, speed, kRoadEnd + advance * frames);
    s.human_trajectory = constant_speed_plan(speed);
    const Pose shift{advance * f, 0.0, 0.0};
    s.ego_init.pose = compose(shift, s.ego_init.pose);
    for (auto& h : s.ego_history) h.pose = compose(shift, h.pose);
    out.push_back(transform_scene(s, frame));
  }
  return out;
}

}  // namespace trajsim
