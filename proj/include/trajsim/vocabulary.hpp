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

// Trajectory vocabulary: k-means over flattened (x, y) waypoints.

#ifndef TRAJSIM_VOCABULARY_HPP_
#define TRAJSIM_VOCABULARY_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "trajsim/kinematics.hpp"

namespace trajsim {

struct Vocabulary {
  std::vector<Trajectory> centers;
  std::uint64_t seed = 0;
  double inertia = 0.0;
  std::vector<double> inertia_history;  // one entry per Lloyd iteration
  int iterations = 0;

  std::size_t size() const { return centers.size(); }
  std::size_t waypoints() const { return centers.empty() ? 0 : centers.front().size(); }
};

// (x0, y0, x1, y1, ...). Heading is not part of the embedding.
std::vector<double> embed(const Trajectory& t);

// Builds a trajectory from an embedding; heading i follows the displacement
// to waypoint i + 1 and the last heading repeats the one before it.
Trajectory reconstruct(std::span<const double> embedding);

struct KMeansOptions {
  std::size_t k = 256;
  int max_iters = 100;
  std::uint64_t seed = 0;
  int workers = 1;
};

// k-means++ seeding then Lloyd iterations. Results are bitwise independent
// of `workers`. Throws std::invalid_argument when the corpus is smaller than
// k, k is zero, or the corpus mixes waypoint counts.
Vocabulary kmeans(std::span<const Trajectory> corpus, const KMeansOptions& options);

struct NearestCenter {
  std::size_t index = 0;
  double distance = 0.0;
};

NearestCenter nearest_center(const Vocabulary& vocab, const Trajectory& t);

// Binary layout: "TVOC", u32 version, u32 K, u32 M, u64 seed, then K*M*3
// little-endian doubles (x, y, psi).
inline constexpr std::uint32_t kVocabularyVersion = 1;
std::string vocabulary_to_bytes(const Vocabulary& vocab);
Vocabulary vocabulary_from_bytes(const std::string& bytes);
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);
std::string vocabulary_to_csv(const Vocabulary& vocab);

}  // namespace trajsim

#endif  // TRAJSIM_VOCABULARY_HPP_
