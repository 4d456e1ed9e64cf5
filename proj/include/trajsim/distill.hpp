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

// Offline distillation: score every vocabulary center against every scene,
// mine pseudo-teacher sets by thresholding, and evaluate the discounted
// min-over-N trajectory loss.

#ifndef TRAJSIM_DISTILL_HPP_
#define TRAJSIM_DISTILL_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajsim/metrics.hpp"
#include "trajsim/scene.hpp"
#include "trajsim/vocabulary.hpp"

namespace trajsim {

struct ScoreMatrix {
  std::size_t scenes = 0;
  std::size_t vocab_size = 0;
  std::vector<double> values;       // row-major by scene, EPDMS
  std::vector<SubScores> subscores;  // same layout; empty unless retained

  double at(std::size_t scene, std::size_t center) const { return values[scene * vocab_size + center]; }
  std::span<const double> row(std::size_t scene) const {
    return std::span<const double>(values).subspan(scene * vocab_size, vocab_size);
  }
};

struct ScoringOptions {
  int workers = 1;
  bool retain_subscores = false;
  // When set, completed rows are flushed to this matrix file after every
  // batch, with the finished scene indices in "<path>.done". An existing
  // pair is resumed from.
  std::optional<std::filesystem::path> checkpoint;
  KinematicsConfig kinematics;
  MetricsConfig metrics;
};

// Carries the rows finished before a checkpoint write failed.
class CheckpointError : public std::runtime_error {
 public:
  CheckpointError(const std::string& what, ScoreMatrix partial, std::vector<std::size_t> completed)
      : std::runtime_error(what), partial_(std::move(partial)), completed_(std::move(completed)) {}
  const ScoreMatrix& partial() const { return partial_; }
  const std::vector<std::size_t>& completed_scenes() const { return completed_; }

 private:
  ScoreMatrix partial_;
  std::vector<std::size_t> completed_;
};

// Each center is placed in the scene's ego frame, densified and scored. Cell
// values do not depend on the worker count.
ScoreMatrix score_vocabulary(std::span<const Scene> scenes, const Vocabulary& vocab,
                             const ScoringOptions& options = {});

// "TSCR", u32 version, u32 S, u32 K, then S*K little-endian doubles.
inline constexpr std::uint32_t kScoreMatrixVersion = 1;
std::string score_matrix_to_bytes(const ScoreMatrix& m);
ScoreMatrix score_matrix_from_bytes(const std::string& bytes);
void save_score_matrix(const ScoreMatrix& m, const std::filesystem::path& path);
ScoreMatrix load_score_matrix(const std::filesystem::path& path);

struct DistillConfig {
  double threshold = 0.95;
  std::size_t n_pseudo = 4;
  double lambda = 0.1;
  std::uint64_t rng_seed = 0;
};

// Throws std::invalid_argument when a field is out of range.
void validate(const DistillConfig& cfg);

struct PseudoTeacherSet {
  std::string scene_id;
  std::vector<std::size_t> source_indices;  // ascending
  std::vector<double> scores;
  std::vector<Trajectory> trajectories;
};

// Candidates are the centers scoring at least the threshold. With more than
// n_pseudo candidates a uniform subset is drawn from a generator seeded by
// (rng_seed, scene_id).
PseudoTeacherSet select_pseudo_teachers(std::span<const double> row, const Vocabulary& vocab,
                                        const DistillConfig& cfg, const std::string& scene_id);

// One line per scene: scene_id <TAB> comma-separated indices <TAB>
// comma-separated scores.
std::string teachers_to_text(std::span<const PseudoTeacherSet> sets);
std::vector<PseudoTeacherSet> teachers_from_text(const std::string& text, const Vocabulary& vocab);

// Euclidean norm over flattened (x, y) waypoints; throws on length mismatch.
double trajectory_distance(const Trajectory& a, const Trajectory& b);

// sum_l lambda^(L-l) [ min_n |human - W_l^n| + sum_P min_n |P - W_l^n| ].
double distill_loss(const std::vector<std::vector<Trajectory>>& proposals_per_iter,
                    const Trajectory& human, std::span<const Trajectory> pseudo, double lambda);

}  // namespace trajsim

#endif  // TRAJSIM_DISTILL_HPP_
