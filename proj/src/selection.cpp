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

#include "trajsim/selection.hpp"

#include <stdexcept>

namespace trajsim {

std::vector<double> comfort_scores(const SelectionState& state, const ProposalSet& ps, const Scene& scene,
                                   const KinematicsConfig& kin, const MetricsConfig& cfg) {
  std::vector<double> comfort(ps.proposals.size(), 1.0);
  if (!state.previous_selected) return comfort;
  for (std::size_t n = 0; n < ps.proposals.size(); ++n) {
    comfort[n] = score_ec(rollout(ps.proposals[n], scene, kin), state.previous_selected, state.frame_gap, cfg);
  }
  return comfort;
}

std::vector<double> recalibrate(std::span<const double> scores, std::span<const double> comfort) {
  if (scores.size() != comfort.size()) throw std::invalid_argument("scores and comfort differ in length");
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (7.0 * scores[i] + comfort[i]) / 8.0;
  return out;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of an empty list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

SelectionResult select(const ProposalSet& ps, const SelectionState& state, const Scene& scene,
                       const KinematicsConfig& kin, const MetricsConfig& cfg) {
  if (ps.proposals.empty()) throw std::invalid_argument("cannot select from an empty proposal set");
  if (ps.proposals.size() != ps.scores.size()) throw std::invalid_argument("proposal and score counts differ");
  if (state.frame_gap < 1) throw std::invalid_argument("frame_gap must be >= 1");
  SelectionResult r;
  r.comfort = comfort_scores(state, ps, scene, kin, cfg);
  r.recalibrated = recalibrate(ps.scores, r.comfort);
  r.index = argmax(r.recalibrated);
  r.trajectory = ps.proposals[r.index];
  r.rollout = rollout(r.trajectory, scene, kin);
  return r;
}

}  // namespace trajsim
