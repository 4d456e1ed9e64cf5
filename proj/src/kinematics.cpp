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

#include "trajsim/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace trajsim {

namespace {

struct Knot {
  double t;
  Pose pose;
  double s;  // cumulative straight-line arc length
};

// Time-parameterized reference built from the plan with the initial pose as
// the knot at t = 0.
class Reference {
 public:
  Reference(const Trajectory& plan, const Pose& start) {
    knots_.push_back({0.0, start, 0.0});
    for (std::size_t i = 0; i < plan.poses.size(); ++i) {
      const Knot& prev = knots_.back();
      const Pose& p = plan.poses[i];
      knots_.push_back({kWaypointInterval * static_cast<double>(i + 1), p,
                        prev.s + norm(p.position() - prev.pose.position())});
    }
  }

  struct Sample {
    Vec2 position;
    double psi;
    double s;
  };

  Sample at(double t) const {
    const std::size_t last = knots_.size() - 1;
    if (t >= knots_[last].t) {
      const Knot& a = knots_[last - 1];
      const Knot& b = knots_[last];
      const double f = (t - a.t) / (b.t - a.t);
      return {a.pose.position() + f * (b.pose.position() - a.pose.position()), b.pose.psi,
              a.s + f * (b.s - a.s)};
    }
    std::size_t i = 0;
    while (knots_[i + 1].t <= t) ++i;
    const Knot& a = knots_[i];
    const Knot& b = knots_[i + 1];
    const double f = (t - a.t) / (b.t - a.t);
    return {a.pose.position() + f * (b.pose.position() - a.pose.position()),
            normalize_angle(a.pose.psi + f * normalize_angle(b.pose.psi - a.pose.psi)),
            a.s + f * (b.s - a.s)};
  }

 private:
  std::vector<Knot> knots_;
};

constexpr double kNearTarget = 1.0;  // m, below this steer on heading error

}  // namespace

void validate(const KinematicsConfig& cfg) {
  if (!(cfg.wheelbase > 0.0)) throw std::invalid_argument("wheelbase must be positive");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(cfg.jerk_limit > 0.0)) throw std::invalid_argument("jerk_limit must be positive");
}

EgoState bicycle_step(const EgoState& s, double accel_cmd, double steer_cmd,
                      const KinematicsConfig& cfg) {
  const double accel = std::clamp(accel_cmd, cfg.accel_min, cfg.accel_max);
  const double steer = std::clamp(steer_cmd, -cfg.steer_max, cfg.steer_max);
  EgoState next;
  next.pose.x = s.pose.x + s.v * std::cos(s.pose.psi) * cfg.dt;
  next.pose.y = s.pose.y + s.v * std::sin(s.pose.psi) * cfg.dt;
  next.pose.psi = normalize_angle(s.pose.psi + (s.v / cfg.wheelbase) * std::tan(steer) * cfg.dt);
  next.v = std::max(0.0, s.v + accel * cfg.dt);
  next.a = accel;
  next.steer = steer;
  return next;
}

DenseTrajectory pid_track(const Trajectory& plan, const EgoState& init,
                          const KinematicsConfig& cfg) {
  if (plan.poses.size() < 2) throw std::invalid_argument("pid_track needs a plan with >= 2 poses");
  validate(cfg);

  const Reference ref(plan, init.pose);
  DenseTrajectory out;
  out.states.reserve(kDenseLength);
  out.states.push_back(init);

  EgoState s = init;
  double odometer = 0.0;
  double integral = 0.0;
  std::optional<double> prev_lon_error;
  std::optional<double> prev_heading_error;
  std::optional<double> prev_lateral;

  for (int k = 0; k + 1 < kDenseLength; ++k) {
    const double t = k * cfg.dt;

    // Longitudinal: arc-length gap at the preview horizon assuming the
    // current speed is held.
    const double lon_error = ref.at(t + cfg.lon_preview).s - (odometer + s.v * cfg.lon_preview);
    integral = std::clamp(integral + lon_error * cfg.dt, -cfg.integral_limit, cfg.integral_limit);
    const double lon_rate = prev_lon_error ? (lon_error - *prev_lon_error) / cfg.dt : 0.0;
    prev_lon_error = lon_error;
    // Braking is capped so that, slewing at jerk_limit, the deceleration
    // reaches zero when the speed does.
    const double max_step = cfg.jerk_limit * cfg.dt;
    const double half_step = 0.5 * max_step;
    const double stop_cap = half_step - std::sqrt(half_step * half_step + 2.0 * cfg.jerk_limit * s.v);
    const double pid = cfg.kp_lon * lon_error + cfg.ki_lon * integral + cfg.kd_lon * lon_rate;
    const double accel_cmd = std::clamp(std::max(pid, stop_cap), s.a - max_step, s.a + max_step);

    // Lateral: PD on the target's lateral offset in the ego frame, mapped to
    // curvature. Close to the target, fall back to PD on heading error.
    const Reference::Sample target = ref.at(t + cfg.lat_preview);
    const Vec2 r = target.position - s.pose.position();
    const double c = std::cos(s.pose.psi);
    const double sn = std::sin(s.pose.psi);
    const double ahead = c * r.x + sn * r.y;
    const double lateral = -sn * r.x + c * r.y;
    const double dist = norm(r);
    double steer_cmd = 0.0;
    if (dist < kNearTarget || ahead <= 0.0) {
      const double heading_error = normalize_angle(target.psi - s.pose.psi);
      const double rate = prev_heading_error ? (heading_error - *prev_heading_error) / cfg.dt : 0.0;
      prev_heading_error = heading_error;
      prev_lateral.reset();
      steer_cmd = cfg.kp_lat * heading_error + cfg.kd_lat * rate;
    } else {
      const double rate = prev_lateral ? (lateral - *prev_lateral) / cfg.dt : 0.0;
      prev_lateral = lateral;
      prev_heading_error.reset();
      const double curvature = 2.0 * (cfg.kp_lat * lateral + cfg.kd_lat * rate) / (dist * dist);
      steer_cmd = std::atan(cfg.wheelbase * curvature);
    }

    odometer += s.v * cfg.dt;
    s = bicycle_step(s, accel_cmd, steer_cmd, cfg);
    out.states.push_back(s);
  }
  return out;
}

std::vector<double> differentiate(std::span<const double> values, double dt) {
  const std::size_t n = values.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  out[0] = (values[1] - values[0]) / dt;
  out[n - 1] = (values[n - 1] - values[n - 2]) / dt;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (values[i + 1] - values[i - 1]) / (2.0 * dt);
  return out;
}

Profiles derive_profiles(std::span<const EgoState> states, double dt) {
  if (states.size() < 2) throw std::invalid_argument("derive_profiles needs >= 2 states");
  const std::size_t n = states.size();
  std::vector<double> speed(n);
  std::vector<double> heading(n);
  heading[0] = states[0].pose.psi;
  for (std::size_t i = 0; i < n; ++i) {
    speed[i] = states[i].v;
    if (i > 0) heading[i] = heading[i - 1] + normalize_angle(states[i].pose.psi - states[i - 1].pose.psi);
  }
  Profiles p;
  p.lon_accel = differentiate(speed, dt);
  p.yaw_rate = differentiate(heading, dt);
  p.yaw_accel = differentiate(p.yaw_rate, dt);
  p.lat_accel.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.lat_accel[i] = speed[i] * p.yaw_rate[i];
  p.lon_jerk = differentiate(p.lon_accel, dt);
  const std::vector<double> lat_jerk = differentiate(p.lat_accel, dt);
  p.jerk_magnitude.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.jerk_magnitude[i] = std::hypot(p.lon_jerk[i], lat_jerk[i]);
  return p;
}

Trajectory to_world(const Trajectory& ego_frame, const Pose& ego) {
  Trajectory out;
  out.poses.reserve(ego_frame.poses.size());
  for (const Pose& p : ego_frame.poses) out.poses.push_back(compose(ego, p));
  return out;
}

Trajectory to_ego_frame(const Trajectory& world, const Pose& ego) {
  Trajectory out;
  out.poses.reserve(world.poses.size());
  for (const Pose& p : world.poses) out.poses.push_back(relative(ego, p));
  return out;
}

}  // namespace trajsim
