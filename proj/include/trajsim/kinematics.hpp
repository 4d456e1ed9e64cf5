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

// Kinematic bicycle model and the PID tracker that densifies a sparse plan
// of waypoints into a 41-state rollout at 10 Hz.

#ifndef TRAJSIM_KINEMATICS_HPP_
#define TRAJSIM_KINEMATICS_HPP_

#include <span>
#include <vector>

#include "trajsim/geom.hpp"

namespace trajsim {

inline constexpr double kWaypointInterval = 0.5;  // seconds between plan poses
inline constexpr double kTickInterval = 0.1;      // seconds between dense states
inline constexpr int kDenseLength = 41;
inline constexpr int kTicksPerWaypoint = 5;

// Sparse plan. Pose i is reached at 0.5 * (i + 1) s after the plan origin.
struct Trajectory {
  std::vector<Pose> poses;

  std::size_t size() const { return poses.size(); }
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct EgoState {
  Pose pose;
  double v = 0.0;      // m/s, never negative
  double a = 0.0;      // m/s^2, applied longitudinal acceleration
  double steer = 0.0;  // rad, applied front-wheel angle

  friend bool operator==(const EgoState&, const EgoState&) = default;
};

struct DenseTrajectory {
  std::vector<EgoState> states;

  friend bool operator==(const DenseTrajectory&, const DenseTrajectory&) = default;
};

struct KinematicsConfig {
  double wheelbase = 2.7;
  double steer_max = 0.8;
  double accel_min = -6.0;
  double accel_max = 4.0;
  double kp_lon = 2.0;
  double ki_lon = 0.1;
  double kd_lon = 0.2;
  double kp_lat = 1.5;
  double kd_lat = 0.3;
  double dt = kTickInterval;
  // Preview times for the interpolated targets. With kp_lon = 2 and a 1 s
  // preview the longitudinal term equals the constant acceleration that
  // closes the arc-length gap over the preview.
  double lon_preview = 1.0;
  double lat_preview = 0.7;
  double integral_limit = 10.0;  // |integral of arc-length error|, m*s
  // Slew limit on the acceleration command, m/s^3, applied from init.a. It
  // also shapes stops: braking eases off as the speed approaches zero.
  double jerk_limit = 3.5;
};

// Throws std::invalid_argument on a non-positive wheelbase, dt or jerk_limit.
void validate(const KinematicsConfig& cfg);

// Forward-Euler step. Commands are clamped to the configured bounds and the
// returned state records the applied values.
EgoState bicycle_step(const EgoState& s, double accel_cmd, double steer_cmd,
                      const KinematicsConfig& cfg);

// Tracks `plan` (expressed in the same frame as init.pose) for 40 ticks.
// Throws std::invalid_argument when the plan has fewer than 2 poses.
DenseTrajectory pid_track(const Trajectory& plan, const EgoState& init,
                          const KinematicsConfig& cfg = {});

struct Profiles {
  std::vector<double> lon_accel;
  std::vector<double> lat_accel;
  std::vector<double> lon_jerk;
  std::vector<double> jerk_magnitude;  // |d/dt (lon_accel, lat_accel)|
  std::vector<double> yaw_rate;
  std::vector<double> yaw_accel;
};

// Central differences inside, one-sided at the ends. Needs >= 2 states.
Profiles derive_profiles(std::span<const EgoState> states, double dt = kTickInterval);
inline Profiles derive_profiles(const DenseTrajectory& d, double dt = kTickInterval) {
  return derive_profiles(std::span<const EgoState>(d.states), dt);
}

// Finite-difference derivative of a uniformly sampled series.
std::vector<double> differentiate(std::span<const double> values, double dt);

Trajectory to_world(const Trajectory& ego_frame, const Pose& ego);
Trajectory to_ego_frame(const Trajectory& world, const Pose& ego);

}  // namespace trajsim

#endif  // TRAJSIM_KINEMATICS_HPP_
