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

#include "trajsim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "json.hpp"

namespace trajsim {

namespace {

using Json = nlohmann::ordered_json;

Json subscores_json(const SubScores& s) {
  return Json{{"nc", s.nc},   {"dac", s.dac}, {"ddc", s.ddc}, {"tlc", s.tlc}, {"ep", s.ep},
              {"ttc", s.ttc}, {"lk", s.lk},   {"hc", s.hc},   {"ec", s.ec},   {"c", s.c}};
}

class SvgCanvas {
 public:
  void include(Vec2 p) {
    min_x_ = std::min(min_x_, p.x);
    min_y_ = std::min(min_y_, p.y);
    max_x_ = std::max(max_x_, p.x);
    max_y_ = std::max(max_y_, p.y);
  }

  std::string header() const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.3f %.3f %.3f %.3f\" width=\"800\" height=\"%d\">\n",
                  min_x_ - kMargin, -max_y_ - kMargin, width(), height(),
                  static_cast<int>(800.0 * height() / width()));
    return buf;
  }

  // y is flipped so north is up.
  std::string point(Vec2 p) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", p.x, -p.y);
    return buf;
  }

 private:
  static constexpr double kMargin = 5.0;
  double width() const { return max_x_ - min_x_ + 2 * kMargin; }
  double height() const { return max_y_ - min_y_ + 2 * kMargin; }

  double min_x_ = std::numeric_limits<double>::infinity();
  double min_y_ = std::numeric_limits<double>::infinity();
  double max_x_ = -std::numeric_limits<double>::infinity();
  double max_y_ = -std::numeric_limits<double>::infinity();
};

}  // namespace

ReportRow make_row(std::string scene_id, const SubScores& sub) {
  return {std::move(scene_id), sub, aggregate_pdms(sub), aggregate_epdms(sub)};
}

void finalize(RunReport& report) {
  double pdms = 0.0;
  double epdms = 0.0;
  for (const ReportRow& r : report.rows) {
    pdms += r.pdms;
    epdms += r.epdms;
  }
  const auto n = static_cast<double>(report.rows.size());
  report.mean_pdms = report.rows.empty() ? 0.0 : pdms / n;
  report.mean_epdms = report.rows.empty() ? 0.0 : epdms / n;
}

std::string report_to_json(const RunReport& report) {
  Json doc;
  doc["metric"] = report.v1 ? "PDMS" : "EPDMS";
  doc["scene_count"] = report.rows.size();
  doc["mean_score"] = report.v1 ? report.mean_pdms : report.mean_epdms;
  doc["mean_pdms"] = report.mean_pdms;
  doc["mean_epdms"] = report.mean_epdms;
  if (report.diversity) doc["diversity"] = *report.diversity;
  Json rows = Json::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back(Json{{"scene_id", r.scene_id},
                        {"subscores", subscores_json(r.subscores)},
                        {"pdms", r.pdms},
                        {"epdms", r.epdms}});
  }
  doc["scenes"] = std::move(rows);
  if (report.throughput) {
    doc["throughput"] = Json{{"wall_clock_s", report.throughput->wall_clock_s},
                             {"evaluations", report.throughput->evaluations},
                             {"evaluations_per_s", report.throughput->evaluations_per_s}};
  }
  return doc.dump(2) + "\n";
}

std::string render_svg(const Scene& scene, std::span<const Trajectory> trajectories) {
  SvgCanvas canvas;
  std::vector<std::vector<Vec2>> paths;
  for (const Trajectory& t : trajectories) {
    std::vector<Vec2> pts{scene.ego_init.pose.position()};
    for (const Pose& p : t.poses) pts.push_back(transform_point(scene.ego_init.pose, p.position()));
    for (const Vec2& p : pts) canvas.include(p);
    paths.push_back(std::move(pts));
  }
  // Frame the plot on the ego's surroundings rather than the whole map.
  const Vec2 ego = scene.ego_init.pose.position();
  canvas.include(ego + Vec2{-30.0, -30.0});
  canvas.include(ego + Vec2{70.0, 30.0});

  auto polygon = [&](const std::vector<Vec2>& vertices, const char* cls, const char* style) {
    std::string out = std::string("  <polygon class=\"") + cls + "\" points=\"";
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (i) out += ' ';
      out += canvas.point(vertices[i]);
    }
    return out + "\" style=\"" + style + "\"/>\n";
  };
  auto box_points = [](const OrientedBox& b) {
    const auto c = b.corners();
    return std::vector<Vec2>(c.begin(), c.end());
  };

  std::string svg = canvas.header();
  svg += "  <title>" + scene.scene_id + "</title>\n";
  for (const Polygon& p : scene.drivable) svg += polygon(p.vertices(), "drivable", "fill:#e6e6e6;stroke:#999;stroke-width:0.1");
  for (const Intersection& i : scene.intersections) {
    svg += polygon(i.polygon.vertices(), "intersection", "fill:#f4d6d6;stroke:#c66;stroke-width:0.1");
  }
  svg += "  <polyline class=\"route\" points=\"";
  for (std::size_t i = 0; i < scene.route.points().size(); ++i) {
    if (i) svg += ' ';
    svg += canvas.point(scene.route.points()[i]);
  }
  svg += "\" style=\"fill:none;stroke:#6a9;stroke-width:0.2;stroke-dasharray:1,1\"/>\n";
  for (const Agent& a : scene.agents) svg += polygon(box_points(a.box_at(0)), "agent", "fill:#7aa6d6;stroke:#246");
  svg += polygon(box_points(scene.ego_box(scene.ego_init.pose)), "ego", "fill:#e07b39;stroke:#803");

  static constexpr const char* kColors[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#1f77b4"};
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::string d;
    for (std::size_t j = 0; j < paths[i].size(); ++j) {
      d += (j == 0 ? "M" : " L") + canvas.point(paths[i][j]);
    }
    svg += "  <path class=\"trajectory\" d=\"" + d + "\" style=\"fill:none;stroke:" + kColors[i % 8] +
           ";stroke-width:0.3\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace trajsim
