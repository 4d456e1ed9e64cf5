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

#include "trajsim/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace trajsim {

namespace {

constexpr double kDuplicateEps = 1e-9;
constexpr double kBoundaryEps = 1e-9;

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return point_segment_distance(p1, q1, q2) <= kBoundaryEps ||
         point_segment_distance(p2, q1, q2) <= kBoundaryEps ||
         point_segment_distance(q1, p1, p2) <= kBoundaryEps ||
         point_segment_distance(q2, p1, p2) <= kBoundaryEps;
}

bool point_in_box(Vec2 p, const OrientedBox& box) {
  const Vec2 local = p - box.center.position();
  const Vec2 u = box.center.heading();
  const Vec2 n{-u.y, u.x};
  return std::abs(dot(local, u)) <= box.half_length + kBoundaryEps &&
         std::abs(dot(local, n)) <= box.half_width + kBoundaryEps;
}

std::int64_t lattice_key(std::int64_t col, std::int64_t row) {
  return col * (std::int64_t{1} << 32) + (row + (std::int64_t{1} << 31));
}

}  // namespace

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

double normalize_angle(double radians) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(radians + std::numbers::pi, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

Vec2 Pose::heading() const { return {std::cos(psi), std::sin(psi)}; }

Pose compose(const Pose& frame, const Pose& local) {
  const Vec2 p = transform_point(frame, local.position());
  return {p.x, p.y, normalize_angle(frame.psi + local.psi)};
}

Pose relative(const Pose& frame, const Pose& world) {
  const double c = std::cos(frame.psi);
  const double s = std::sin(frame.psi);
  const double dx = world.x - frame.x;
  const double dy = world.y - frame.y;
  return {c * dx + s * dy, -s * dx + c * dy, normalize_angle(world.psi - frame.psi)};
}

Vec2 transform_point(const Pose& frame, Vec2 local) {
  const double c = std::cos(frame.psi);
  const double s = std::sin(frame.psi);
  return {frame.x + c * local.x - s * local.y, frame.y + s * local.x + c * local.y};
}

std::array<Vec2, 4> OrientedBox::corners() const {
  const Vec2 c = center.position();
  const Vec2 u = half_length * center.heading();
  const Vec2 n = half_width * Vec2{-center.heading().y, center.heading().x};
  return {c + u + n, c - u + n, c - u - n, c + u - n};
}

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw std::invalid_argument("polygon needs at least 3 vertices");
  }
  const double area = signed_area();
  if (!(std::abs(area) > 0.0)) {
    throw std::invalid_argument("polygon has zero area");
  }
  if (area < 0.0) std::reverse(vertices_.begin(), vertices_.end());
}

double Polygon::signed_area() const {
  double twice = 0.0;
  for (std::size_t i = 0, n = vertices_.size(); i < n; ++i) {
    twice += cross(vertices_[i], vertices_[(i + 1) % n]);
  }
  return 0.5 * twice;
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (norm(points_[i] - points_[i - 1]) <= kDuplicateEps) {
      throw std::invalid_argument("polyline has consecutive duplicate points at index " +
                                  std::to_string(i));
    }
  }
}

Polyline Polyline::deduplicated(std::span<const Vec2> points) {
  std::vector<Vec2> kept;
  kept.reserve(points.size());
  for (const Vec2& p : points) {
    if (kept.empty() || norm(p - kept.back()) > kDuplicateEps) kept.push_back(p);
  }
  return Polyline(std::move(kept));
}

std::size_t OccupancyGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

bool obb_overlap(const OrientedBox& a, const OrientedBox& b) {
  const Vec2 ua = a.center.heading();
  const Vec2 ub = b.center.heading();
  const std::array<Vec2, 4> axes = {ua, Vec2{-ua.y, ua.x}, ub, Vec2{-ub.y, ub.x}};
  const Vec2 d = b.center.position() - a.center.position();
  for (const Vec2& axis : axes) {
    const double ra = a.half_length * std::abs(dot(ua, axis)) +
                      a.half_width * std::abs(cross(ua, axis));
    const double rb = b.half_length * std::abs(dot(ub, axis)) +
                      b.half_width * std::abs(cross(ub, axis));
    if (std::abs(dot(d, axis)) > ra + rb) return false;
  }
  return true;
}

bool point_in_polygon(Vec2 p, const Polygon& poly) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (point_segment_distance(p, v[j], v[i]) <= kBoundaryEps) return true;
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x_cross = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool box_in_polygons(const OrientedBox& box, std::span<const Polygon> polys) {
  for (const Vec2& corner : box.corners()) {
    const bool covered = std::any_of(polys.begin(), polys.end(), [&](const Polygon& poly) {
      return point_in_polygon(corner, poly);
    });
    if (!covered) return false;
  }
  return true;
}

bool box_polygon_overlap(const OrientedBox& box, const Polygon& poly) {
  const auto corners = box.corners();
  for (const Vec2& c : corners) {
    if (point_in_polygon(c, poly)) return true;
  }
  const auto& v = poly.vertices();
  for (const Vec2& p : v) {
    if (point_in_box(p, box)) return true;
  }
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0, n = v.size(); j < n; ++j) {
      if (segments_intersect(corners[i], corners[(i + 1) % 4], v[j], v[(j + 1) % n])) return true;
    }
  }
  return false;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double point_polyline_distance(Vec2 p, const Polyline& line) {
  const auto& pts = line.points();
  if (pts.size() == 1) return norm(p - pts.front());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    best = std::min(best, point_segment_distance(p, pts[i - 1], pts[i]));
  }
  return best;
}

OccupancyGrid buffer_rasterize(const Polyline& line, double width, double cell_size) {
  if (line.empty()) throw std::invalid_argument("cannot rasterize an empty polyline");
  if (!(width > 0.0)) throw std::invalid_argument("corridor width must be positive");
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell_size must be positive");

  const double radius = 0.5 * width;
  const auto& pts = line.points();
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const Vec2& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const auto col0 = static_cast<std::int64_t>(std::floor((min_x - radius) / cell_size)) - 1;
  const auto row0 = static_cast<std::int64_t>(std::floor((min_y - radius) / cell_size)) - 1;
  const auto col1 = static_cast<std::int64_t>(std::ceil((max_x + radius) / cell_size)) + 1;
  const auto row1 = static_cast<std::int64_t>(std::ceil((max_y + radius) / cell_size)) + 1;

  OccupancyGrid grid;
  grid.cell_size = cell_size;
  grid.origin = {static_cast<double>(col0) * cell_size, static_cast<double>(row0) * cell_size};
  grid.width = static_cast<int>(col1 - col0);
  grid.height = static_cast<int>(row1 - row0);
  grid.bits.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);

  auto mark_near = [&](Vec2 a, Vec2 b) {
    const int c_lo = std::max(0, static_cast<int>(std::floor((std::min(a.x, b.x) - radius - grid.origin.x) / cell_size)));
    const int c_hi = std::min(grid.width - 1, static_cast<int>(std::ceil((std::max(a.x, b.x) + radius - grid.origin.x) / cell_size)));
    const int r_lo = std::max(0, static_cast<int>(std::floor((std::min(a.y, b.y) - radius - grid.origin.y) / cell_size)));
    const int r_hi = std::min(grid.height - 1, static_cast<int>(std::ceil((std::max(a.y, b.y) + radius - grid.origin.y) / cell_size)));
    for (int r = r_lo; r <= r_hi; ++r) {
      for (int c = c_lo; c <= c_hi; ++c) {
        auto& bit = grid.bits[static_cast<std::size_t>(r) * grid.width + c];
        if (bit) continue;
        const Vec2 center{grid.origin.x + (c + 0.5) * cell_size, grid.origin.y + (r + 0.5) * cell_size};
        if (point_segment_distance(center, a, b) <= radius) bit = 1;
      }
    }
  };
  if (pts.size() == 1) {
    mark_near(pts[0], pts[0]);
  } else {
    for (std::size_t i = 1; i < pts.size(); ++i) mark_near(pts[i - 1], pts[i]);
  }
  return grid;
}

std::vector<std::int64_t> occupied_keys(const OccupancyGrid& grid) {
  std::vector<std::int64_t> keys;
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      if (!grid.at(c, r)) continue;
      const double cx = grid.origin.x + (c + 0.5) * grid.cell_size;
      const double cy = grid.origin.y + (r + 0.5) * grid.cell_size;
      keys.push_back(lattice_key(static_cast<std::int64_t>(std::floor(cx / grid.cell_size)),
                                 static_cast<std::int64_t>(std::floor(cy / grid.cell_size))));
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

double grid_iou(const OccupancyGrid& a, const OccupancyGrid& b) {
  if (std::abs(a.cell_size - b.cell_size) > 1e-12 * std::max(a.cell_size, b.cell_size)) {
    throw std::invalid_argument("grid_iou requires equal cell sizes");
  }
  const auto ka = occupied_keys(a);
  const auto kb = occupied_keys(b);
  std::size_t shared = 0;
  for (std::size_t i = 0, j = 0; i < ka.size() && j < kb.size();) {
    if (ka[i] < kb[j]) {
      ++i;
    } else if (kb[j] < ka[i]) {
      ++j;
    } else {
      ++shared, ++i, ++j;
    }
  }
  const std::size_t uni = ka.size() + kb.size() - shared;
  return uni == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(uni);
}

double arc_length(const Polyline& line) {
  const auto& pts = line.points();
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += norm(pts[i] - pts[i - 1]);
  return total;
}

Projection project_onto(const Polyline& line, Vec2 p) {
  const auto& pts = line.points();
  if (pts.size() < 2) throw std::invalid_argument("projection needs at least 2 polyline points");
  Projection best;
  double best_dist = std::numeric_limits<double>::infinity();
  double cumulative = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vec2 seg = pts[i] - pts[i - 1];
    const double len = norm(seg);
    const double t = std::clamp(dot(p - pts[i - 1], seg) / (len * len), 0.0, 1.0);
    const Vec2 closest = pts[i - 1] + t * seg;
    const double dist = norm(p - closest);
    if (dist < best_dist) {
      best_dist = dist;
      const Vec2 tangent = (1.0 / len) * seg;
      best.s = cumulative + t * len;
      best.tangent = tangent;
      best.lateral = cross(tangent, p - closest) >= 0.0 ? dist : -dist;
    }
    cumulative += len;
  }
  return best;
}

}  // namespace trajsim
