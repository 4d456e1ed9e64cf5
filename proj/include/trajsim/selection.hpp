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

// Momentum-aware selection: proposal scores are blended with a cross-frame
// comfort pass before the argmax.

#ifndef TRAJSIM_SELECTION_HPP_
#define TRAJSIM_SELECTION_HPP_

#include <optional>
#include <span>
#include <vector>

#include "trajsim/metrics.hpp"

namespace trajsim {

struct ProposalSet {
  std::vector<Trajectory> proposals;  // ego frame
  std::vector<double> scores;         // externally supplied, in [0, 1]
};

struct SelectionState {
  std::optional<DenseTrajectory> previous_selected;  // world frame
  int frame_gap = 5;
};

struct SelectionResult {
  std::size_t index = 0;
  Trajectory trajectory;
  DenseTrajectory rollout;  // world frame; becomes the next frame's previous_selected
  std::vector<double> comfort;
  std::vector<double> recalibrated;
};

// Extended-comfort pass of each proposal against the previous selection;
// all ones when there is none.
std::vector<double> comfort_scores(const SelectionState& state, const ProposalSet& ps, const Scene& scene,
                                   const KinematicsConfig& kin = {}, const MetricsConfig& cfg = {});

// (7 * score + comfort) / 8, elementwise.
std::vector<double> recalibrate(std::span<const double> scores, std::span<const double> comfort);

// First index of the maximum; throws std::invalid_argument when empty.
std::size_t argmax(std::span<const double> values);

// Throws std::invalid_argument for an empty set or mismatched lengths.
SelectionResult select(const ProposalSet& ps, const SelectionState& state, const Scene& scene,
                       const KinematicsConfig& kin = {}, const MetricsConfig& cfg = {});

}  // namespace trajsim

#endif  // TRAJSIM_SELECTION_HPP_
