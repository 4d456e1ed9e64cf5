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

// Rule-based log-replay scoring: the nine EPDMS subscores, their PDMS and
// EPDMS aggregates, auxiliary waypoint labels and proposal-set diversity.

#ifndef TRAJSIM_METRICS_HPP_
#define TRAJSIM_METRICS_HPP_

#include <optional>
#include <span>
#include <vector>

#include "trajsim/kinematics.hpp"
#include "trajsim/scene.hpp"

namespace trajsim {

// Every threshold the subscores use. Defaults follow the nuPlan comfort
// bounds for HC; the DDC, LK, EC and TTC values are calibration choices.
struct MetricsConfig {
  double ttc_horizon = 1.0;  // s
  int ttc_substeps = 10;

  double ddc_full_credit = 2.0;  // m of oncoming travel still scored 1
  double ddc_half_credit = 6.0;  // m of oncoming travel still scored 0.5

  double lk_max_offset = 0.5;  // m
  int lk_window_ticks = 10;    // a longer run of offset ticks fails

  int ec_frame_gap = 5;  // ticks between consecutive planning frames
  double ec_max_position = 1.0;
  double ec_max_heading = 0.2;
  double ec_max_speed = 2.0;

  int hc_history_ticks = 15;
  double hc_min_lon_accel = -4.05;
  double hc_max_lon_accel = 2.40;
  double hc_max_lat_accel = 4.89;
  double hc_max_lon_jerk = 4.13;
  double hc_max_jerk = 8.37;
  double hc_max_yaw_rate = 0.95;
  double hc_max_yaw_accel = 1.93;

  double ep_min_reference_progress = 0.1;  // m

  double diversity_width = 2.0;       // total corridor width, m
  double diversity_cell_size = 0.25;  // m
};

struct SubScores {
  double nc = 1.0;
  double dac = 1.0;
  double ddc = 1.0;
  double tlc = 1.0;
  double ep = 1.0;
  double ttc = 1.0;
  double lk = 1.0;
  double hc = 1.0;
  double ec = 1.0;
  double c = 1.0;  // v1 comfort, equal to hc

  friend bool operator==(const SubScores&, const SubScores&) = default;
};

struct AuxLabels {
  std::vector<bool> on_road;
  std::vector<bool> on_route;
  std::vector<double> collision_prob;
};

// An overlap is the ego's fault unless the agent sits in the ego's rear
// half-plane and closes at least as fast as the ego drives.
bool at_fault(const Pose& ego, double ego_speed, const Pose& agent, Vec2 agent_velocity);

double score_nc(const DenseTrajectory& d, const Scene& scene);
double score_dac(const DenseTrajectory& d, const Scene& scene);
double score_ddc(const DenseTrajectory& d, const Scene& scene, const MetricsConfig& cfg = {});
double score_tlc(const DenseTrajectory& d, const Scene& scene);
double score_ep(const DenseTrajectory& d, const Scene& scene, const DenseTrajectory& reference,
                const MetricsConfig& cfg = {});
double score_ttc(const DenseTrajectory& d, const Scene& scene, const MetricsConfig& cfg = {});
double score_lk(const DenseTrajectory& d, const Scene& scene, const MetricsConfig& cfg = {});
double score_hc(const DenseTrajectory& d, const Scene& scene, const MetricsConfig& cfg = {});
// Returns 1 when there is no previous frame.
double score_ec(const DenseTrajectory& now, const std::optional<DenseTrajectory>& prev,
                int frame_gap, const MetricsConfig& cfg = {});

double aggregate_pdms(const SubScores& sub);
double aggregate_epdms(const SubScores& sub);

// All subscores of a world-frame rollout. `reference` is the rollout of the
// human plan that EP normalizes against.
SubScores evaluate(const DenseTrajectory& d, const Scene& scene, const DenseTrajectory& reference,
                   const std::optional<DenseTrajectory>& prev = std::nullopt,
                   const MetricsConfig& cfg = {});

// Densifies an ego-frame plan against the scene's initial state.
DenseTrajectory rollout(const Trajectory& plan, const Scene& scene, const KinematicsConfig& kin = {});

// Rollout of the human plan; EP's denominator.
DenseTrajectory reference_rollout(const Scene& scene, const KinematicsConfig& kin = {});

SubScores score_plan(const Trajectory& plan, const Scene& scene, const KinematicsConfig& kin = {},
                     const MetricsConfig& cfg = {});

// Per-waypoint labels for an ego-frame plan. Waypoint i maps to tick 5(i+1);
// throws std::invalid_argument when that runs past the replay.
AuxLabels aux_labels(const Trajectory& plan, const Scene& scene);

// One minus the mean IoU of each rasterized corridor against the union.
// Throws std::invalid_argument on an empty proposal list.
double diversity(std::span<const Trajectory> proposals, double cell_size = 0.25, double width = 2.0);

}  // namespace trajsim

#endif  // TRAJSIM_METRICS_HPP_
