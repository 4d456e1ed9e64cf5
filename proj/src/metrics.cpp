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

#include "trajsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trajsim {

namespace {

bool inside_any_intersection(Vec2 p, const Scene& scene) {
  return std::any_of(scene.intersections.begin(), scene.intersections.end(),
                     [&](const Intersection& inter) { return point_in_polygon(p, inter.polygon); });
}

bool collides_at_fault(const Scene& scene, const Pose& ego, double ego_speed, int tick,
                       double lookahead) {
  const OrientedBox ego_box = scene.ego_box(ego);
  for (const Agent& agent : scene.agents) {
    const Vec2 vel = agent.velocity_at(tick);
    Pose pose = agent.states[static_cast<std::size_t>(tick)];
    pose.x += vel.x * lookahead;
    pose.y += vel.y * lookahead;
    if (obb_overlap(ego_box, {pose, agent.half_length, agent.half_width}) &&
        at_fault(ego, ego_speed, pose, vel)) {
      return true;
    }
  }
  return false;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

}  // namespace

bool at_fault(const Pose& ego, double ego_speed, const Pose& agent, Vec2 agent_velocity) {
  const Vec2 heading = ego.heading();
  const bool behind = dot(agent.position() - ego.position(), heading) < 0.0;
  const double closing_speed = dot(agent_velocity, heading);
  return !(behind && ego_speed <= closing_speed);
}

double score_nc(const DenseTrajectory& d, const Scene& scene) {
  for (std::size_t k = 0; k < d.states.size(); ++k) {
    const EgoState& s = d.states[k];
    if (collides_at_fault(scene, s.pose, s.v, static_cast<int>(k), 0.0)) return 0.0;
  }
  return 1.0;
}

double score_dac(const DenseTrajectory& d, const Scene& scene) {
  for (const EgoState& s : d.states) {
    if (!box_in_polygons(scene.ego_box(s.pose), scene.drivable)) return 0.0;
  }
  return 1.0;
}

double score_ddc(const DenseTrajectory& d, const Scene& scene, const MetricsConfig& cfg) {
  if (scene.lanes.empty()) return 1.0;
  double oncoming = 0.0;
  for (std::size_t k = 1; k < d.states.size(); ++k) {
    const Pose& pose = d.states[k].pose;
    if (inside_any_intersection(pose.position(), scene)) continue;
    const Lane* nearest = nullptr;
    Projection nearest_proj;
    for (const Lane& lane : scene.lanes) {
      const Projection proj = project_onto(lane.centerline, pose.position());
      if (nearest == nullptr || std::abs(proj.lateral) < std::abs(nearest_proj.lateral)) {
        nearest = &lane;
        nearest_proj = proj;
      }
    }
    const Vec2 legal = static_cast<double>(nearest->direction_sign) * nearest_proj.tangent;
    if (dot(pose.heading(), legal) < 0.0) {
      oncoming += norm(pose.position() - d.states[k - 1].pose.position());
    }
  }
  if (oncoming < cfg.ddc_full_credit) return 1.0;
  if (oncoming < cfg.ddc_half_credit) return 0.5;
  return 0.0;
}

double score_tlc(const DenseTrajectory& d, const Scene& scene) {
  for (const Intersection& inter : scene.intersections) {
    bool was_inside = box_polygon_overlap(scene.ego_box(d.states.front().pose), inter.polygon);
    for (std::size_t k = 1; k < d.states.size(); ++k) {
      const bool inside = box_polygon_overlap(scene.ego_box(d.states[k].pose), inter.polygon);
      if (inside && !was_inside && inter.light.phases[k] != LightPhase::kGreen) return 0.0;
      was_inside = inside;
    }
  }
  return 1.0;
}

double score_ep(const DenseTrajectory& d, const Scene& scene, const DenseTrajectory& reference,
                const MetricsConfig& cfg) {
  auto progress = [&](const DenseTrajectory& r) {
    return project_onto(scene.route, r.states.back().pose.position()).s -
           project_onto(scene.route, r.states.front().pose.position()).s;
  };
  const double ref = progress(reference);
  if (ref < cfg.ep_min_reference_progress) return 1.0;
  return std::clamp(progress(d) / ref, 0.0, 1.0);
}

double score_ttc(const DenseTrajectory& d, const Scene& scene, const MetricsConfig& cfg) {
  if (scene.agents.empty()) return 1.0;
  const double step = cfg.ttc_horizon / cfg.ttc_substeps;
  for (std::size_t k = 0; k < d.states.size(); ++k) {
    const EgoState& s = d.states[k];
    const Vec2 heading = s.pose.heading();
    for (int j = 1; j <= cfg.ttc_substeps; ++j) {
      const double lookahead = step * j;
      Pose projected = s.pose;
      projected.x += s.v * lookahead * heading.x;
      projected.y += s.v * lookahead * heading.y;
      if (collides_at_fault(scene, projected, s.v, static_cast<int>(k), lookahead)) return 0.0;
    }
  }
  return 1.0;
}

double score_lk(const DenseTrajectory& d, const Scene& scene, const MetricsConfig& cfg) {
  int run = 0;
  for (const EgoState& s : d.states) {
    const Vec2 p = s.pose.position();
    bool offset = false;
    if (!inside_any_intersection(p, scene)) {
      double best = std::numeric_limits<double>::infinity();
      for (const Lane& lane : scene.lanes) {
        const Projection proj = project_onto(lane.centerline, p);
        const Vec2 legal = static_cast<double>(lane.direction_sign) * proj.tangent;
        if (dot(s.pose.heading(), legal) >= 0.0) best = std::min(best, std::abs(proj.lateral));
      }
      offset = std::isfinite(best) && best > cfg.lk_max_offset;
    }
    run = offset ? run + 1 : 0;
    if (run > cfg.lk_window_ticks) return 0.0;
  }
  return 1.0;
}

double score_hc(const DenseTrajectory& d, const Scene& scene, const MetricsConfig& cfg) {
  const auto pad = std::min(scene.ego_history.size(), static_cast<std::size_t>(cfg.hc_history_ticks));
  std::vector<EgoState> joined(scene.ego_history.end() - static_cast<std::ptrdiff_t>(pad),
                               scene.ego_history.end());
  joined.insert(joined.end(), d.states.begin(), d.states.end());
  const Profiles p = derive_profiles(joined);
  for (std::size_t i = 0; i < joined.size(); ++i) {
    if (!within(p.lon_accel[i], cfg.hc_min_lon_accel, cfg.hc_max_lon_accel) ||
        std::abs(p.lat_accel[i]) > cfg.hc_max_lat_accel ||
        std::abs(p.lon_jerk[i]) > cfg.hc_max_lon_jerk || p.jerk_magnitude[i] > cfg.hc_max_jerk ||
        std::abs(p.yaw_rate[i]) > cfg.hc_max_yaw_rate ||
        std::abs(p.yaw_accel[i]) > cfg.hc_max_yaw_accel) {
      return 0.0;
    }
  }
  return 1.0;
}

double score_ec(const DenseTrajectory& now, const std::optional<DenseTrajectory>& prev,
                int frame_gap, const MetricsConfig& cfg) {
  if (!prev) return 1.0;
  const auto gap = static_cast<std::size_t>(std::max(frame_gap, 0));
  for (std::size_t j = 0; j + gap < prev->states.size() && j < now.states.size(); ++j) {
    const EgoState& a = now.states[j];
    const EgoState& b = prev->states[j + gap];
    if (norm(a.pose.position() - b.pose.position()) > cfg.ec_max_position ||
        std::abs(normalize_angle(a.pose.psi - b.pose.psi)) > cfg.ec_max_heading ||
        std::abs(a.v - b.v) > cfg.ec_max_speed) {
      return 0.0;
    }
  }
  return 1.0;
}

double aggregate_pdms(const SubScores& s) {
  return s.nc * s.dac * (5.0 * (s.ep + s.ttc) + 2.0 * s.c) / 12.0;
}

double aggregate_epdms(const SubScores& s) {
  return s.nc * s.dac * s.ddc * s.tlc * (5.0 * (s.ep + s.ttc) + 2.0 * (s.lk + s.hc + s.ec)) / 16.0;
}

SubScores evaluate(const DenseTrajectory& d, const Scene& scene, const DenseTrajectory& reference,
                   const std::optional<DenseTrajectory>& prev, const MetricsConfig& cfg) {
  SubScores s;
  s.nc = score_nc(d, scene);
  s.dac = score_dac(d, scene);
  s.ddc = score_ddc(d, scene, cfg);
  s.tlc = score_tlc(d, scene);
  s.ep = score_ep(d, scene, reference, cfg);
  s.ttc = score_ttc(d, scene, cfg);
  s.lk = score_lk(d, scene, cfg);
  s.hc = score_hc(d, scene, cfg);
  s.ec = score_ec(d, prev, cfg.ec_frame_gap, cfg);
  s.c = s.hc;
  return s;
}

DenseTrajectory rollout(const Trajectory& plan, const Scene& scene, const KinematicsConfig& kin) {
  return pid_track(to_world(plan, scene.ego_init.pose), scene.ego_init, kin);
}

DenseTrajectory reference_rollout(const Scene& scene, const KinematicsConfig& kin) {
  return rollout(scene.human_trajectory, scene, kin);
}

SubScores score_plan(const Trajectory& plan, const Scene& scene, const KinematicsConfig& kin,
                     const MetricsConfig& cfg) {
  return evaluate(rollout(plan, scene, kin), scene, reference_rollout(scene, kin), std::nullopt, cfg);
}

AuxLabels aux_labels(const Trajectory& plan, const Scene& scene) {
  const std::size_t m = plan.poses.size();
  if (kTicksPerWaypoint * m > static_cast<std::size_t>(kDenseLength - 1)) {
    throw std::invalid_argument("plan has more waypoints than the replay covers");
  }
  AuxLabels labels;
  labels.on_road.resize(m);
  labels.on_route.resize(m);
  labels.collision_prob.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Pose world = compose(scene.ego_init.pose, plan.poses[i]);
    const Vec2 p = world.position();
    labels.on_road[i] = std::any_of(scene.drivable.begin(), scene.drivable.end(),
                                    [&](const Polygon& poly) { return point_in_polygon(p, poly); });
    labels.on_route[i] = point_in_polygon(p, scene.route_polygon);
    const int tick = kTicksPerWaypoint * static_cast<int>(i + 1);
    const OrientedBox ego = scene.ego_box(world);
    const bool hit = std::any_of(scene.agents.begin(), scene.agents.end(),
                                 [&](const Agent& a) { return obb_overlap(ego, a.box_at(tick)); });
    labels.collision_prob[i] = hit ? 1.0 : 0.0;
  }
  return labels;
}

double diversity(std::span<const Trajectory> proposals, double cell_size, double width) {
  if (proposals.empty()) throw std::invalid_argument("diversity needs at least one proposal");
  std::vector<std::vector<std::int64_t>> cells;
  cells.reserve(proposals.size());
  std::vector<std::int64_t> all;
  for (const Trajectory& t : proposals) {
    std::vector<Vec2> pts;
    pts.reserve(t.poses.size());
    for (const Pose& p : t.poses) pts.push_back(p.position());
    cells.push_back(occupied_keys(buffer_rasterize(Polyline::deduplicated(pts), width, cell_size)));
    all.insert(all.end(), cells.back().begin(), cells.back().end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  if (all.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : cells) sum += static_cast<double>(c.size()) / static_cast<double>(all.size());
  return 1.0 - sum / static_cast<double>(proposals.size());
}

}  // namespace trajsim
