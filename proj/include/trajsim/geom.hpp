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

// Planar geometry kernel: poses, oriented boxes, polygons, polylines and
// occupancy grids. Every function here is pure.

#ifndef TRAJSIM_GEOM_HPP_
#define TRAJSIM_GEOM_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace trajsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;  // heading, radians in (-pi, pi]

  Vec2 position() const { return {x, y}; }
  Vec2 heading() const;
  friend bool operator==(const Pose&, const Pose&) = default;
};

// Rigid transforms between a local frame anchored at `frame` and the frame
// `frame` is expressed in.
Pose compose(const Pose& frame, const Pose& local);
Pose relative(const Pose& frame, const Pose& world);
Vec2 transform_point(const Pose& frame, Vec2 local);

struct OrientedBox {
  Pose center;
  double half_length = 0.0;
  double half_width = 0.0;

  // Counter-clockwise: front-left, rear-left, rear-right, front-right.
  std::array<Vec2, 4> corners() const;
};

class Polygon {
 public:
  Polygon() = default;
  // Throws std::invalid_argument for fewer than 3 vertices or zero area.
  // Clockwise input is reversed so the stored ring is counter-clockwise.
  explicit Polygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  double signed_area() const;

 private:
  std::vector<Vec2> vertices_;
};

class Polyline {
 public:
  Polyline() = default;
  // Throws std::invalid_argument on consecutive points closer than 1e-9 m.
  explicit Polyline(std::vector<Vec2> points);
  // Drops consecutive near-duplicates instead of rejecting them.
  static Polyline deduplicated(std::span<const Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<Vec2> points_;
};

struct OccupancyGrid {
  Vec2 origin;  // world position of the outer corner of cell (0, 0)
  double cell_size = 0.0;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // row-major, index = row * width + col

  bool at(int col, int row) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
  std::size_t occupied_count() const;
  double occupied_area() const { return static_cast<double>(occupied_count()) * cell_size * cell_size; }
};

bool obb_overlap(const OrientedBox& a, const OrientedBox& b);

// Boundary points count as inside.
bool point_in_polygon(Vec2 p, const Polygon& poly);

// True iff all four corners of `box` lie in the union of `polys`.
bool box_in_polygons(const OrientedBox& box, std::span<const Polygon> polys);

// True iff the closed box and the closed polygon share at least one point.
bool box_polygon_overlap(const OrientedBox& box, const Polygon& poly);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double point_polyline_distance(Vec2 p, const Polyline& line);

// Cells whose centers lie within width/2 of the polyline are occupied. The
// grid origin is snapped to a multiple of cell_size so grids from different
// calls share a lattice.
OccupancyGrid buffer_rasterize(const Polyline& line, double width, double cell_size);

// Occupied cells are keyed on the global lattice by their centers, so grids
// with different origins are compared cell-for-cell.
double grid_iou(const OccupancyGrid& a, const OccupancyGrid& b);

// Sorted global lattice keys of the occupied cells of `grid`.
std::vector<std::int64_t> occupied_keys(const OccupancyGrid& grid);

double arc_length(const Polyline& line);

struct Projection {
  double s = 0.0;        // arc length of the closest point
  double lateral = 0.0;  // signed offset, left of travel direction positive
  Vec2 tangent;          // unit direction of the closest segment
};

// Requires at least two points. Ties on distance resolve to the earliest
// segment.
Projection project_onto(const Polyline& line, Vec2 p);

}  // namespace trajsim

#endif  // TRAJSIM_GEOM_HPP_
