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

// Known-answer synthetic scenes. Each template documents one property that
// its probe plan must exhibit under the metrics:
//
//   clean_straight  human plan scores EPDMS >= 0.95
//   parked_agent    straight full-speed probe hits a parked car (NC = 0);
//                   the human plan brakes to a stop behind it
//   crossing_agent  probe timed to pass after a crossing car has cleared (NC = 1)
//   red_light       non-stopping probe enters a red intersection (TLC = 0)
//   oncoming_lane   probe moves into the oncoming lane (DDC < 1)
//   lane_drift      probe holds a 1.0-1.5 m offset from its lane center (LK = 0)
//
// Scenes are built in a local road frame and then placed in the world by a
// seed-dependent rigid transform.

#ifndef TRAJSIM_SYNTHETIC_HPP_
#define TRAJSIM_SYNTHETIC_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trajsim/scene.hpp"

namespace trajsim {

enum class SceneTemplate {
  kCleanStraight,
  kParkedAgent,
  kCrossingAgent,
  kRedLight,
  kOncomingLane,
  kLaneDrift,
};

inline constexpr std::array<SceneTemplate, 6> kAllTemplates = {
    SceneTemplate::kCleanStraight, SceneTemplate::kParkedAgent, SceneTemplate::kCrossingAgent,
    SceneTemplate::kRedLight,      SceneTemplate::kOncomingLane, SceneTemplate::kLaneDrift};

std::string_view template_name(SceneTemplate t);
// Throws std::invalid_argument on an unknown name.
SceneTemplate parse_template(std::string_view name);

struct SyntheticSpec {
  SceneTemplate kind = SceneTemplate::kCleanStraight;
  std::uint64_t seed = 0;
  // Ego speed in m/s; drawn from the template's range when unset.
  std::optional<double> ego_speed;
  bool randomize_frame = true;
};

// Speed range accepted for `kind`, m/s.
std::pair<double, double> speed_range(SceneTemplate kind);

Scene generate_scene(const SyntheticSpec& spec);

// The ego-frame plan the template's documented property is stated about.
Trajectory probe_plan(const SyntheticSpec& spec);

// Straight road frames with the ego advancing `speed * 0.5 s` between
// consecutive frames, for frame-by-frame selection.
std::vector<Scene> generate_sequence(int frames, double speed, std::uint64_t seed);

}  // namespace trajsim

#endif  // TRAJSIM_SYNTHETIC_HPP_
