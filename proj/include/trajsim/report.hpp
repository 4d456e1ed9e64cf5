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

// Run reports (JSON) and bird's-eye-view SVG rendering.

#ifndef TRAJSIM_REPORT_HPP_
#define TRAJSIM_REPORT_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajsim/metrics.hpp"

namespace trajsim {

struct ReportRow {
  std::string scene_id;
  SubScores subscores;
  double pdms = 0.0;
  double epdms = 0.0;
};

struct Throughput {
  double wall_clock_s = 0.0;
  std::size_t evaluations = 0;
  double evaluations_per_s = 0.0;
};

struct RunReport {
  bool v1 = false;  // headline metric is PDMS instead of EPDMS
  std::vector<ReportRow> rows;
  double mean_pdms = 0.0;
  double mean_epdms = 0.0;
  std::optional<double> diversity;
  std::optional<Throughput> throughput;
};

ReportRow make_row(std::string scene_id, const SubScores& sub);
// Fills the means from the rows.
void finalize(RunReport& report);
// Keys are emitted in a fixed order.
std::string report_to_json(const RunReport& report);

// Map polygons, route, agent boxes at tick 0, the ego box and one <path> per
// trajectory (ego-frame trajectories are placed at the scene's ego pose).
std::string render_svg(const Scene& scene, std::span<const Trajectory> trajectories);

}  // namespace trajsim

#endif  // TRAJSIM_REPORT_HPP_
