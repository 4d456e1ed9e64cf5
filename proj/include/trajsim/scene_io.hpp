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

// Scene files (JSON, schema version 1), trajectory-set files and corpus
// loading. docs/formats.md documents every field.

#ifndef TRAJSIM_SCENE_IO_HPP_
#define TRAJSIM_SCENE_IO_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajsim/scene.hpp"

namespace trajsim {

inline constexpr int kSceneSchemaVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

std::string scene_to_json(const Scene& scene);
// Parses and validates; throws FormatError / VersionError.
Scene scene_from_json(const std::string& text);

Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

// All *.json scene files in `dir`, ordered by file name. Throws FormatError
// when the directory is missing or holds no scenes.
std::vector<std::filesystem::path> list_scene_files(const std::filesystem::path& dir);
std::vector<Scene> load_scene_dir(const std::filesystem::path& dir);

// Human trajectories of every scene under `dir` in the ego frame.
std::vector<Trajectory> load_corpus(const std::filesystem::path& dir);

// Per-frame trajectory sets: proposals for selection and diversity, or plans
// to score.
struct TrajectoryFrame {
  std::string scene_id;
  std::vector<Trajectory> trajectories;
};

std::string trajectory_frames_to_json(const std::vector<TrajectoryFrame>& frames);
std::vector<TrajectoryFrame> trajectory_frames_from_json(const std::string& text);
std::vector<TrajectoryFrame> load_trajectory_frames(const std::filesystem::path& path);
void save_trajectory_frames(const std::vector<TrajectoryFrame>& frames, const std::filesystem::path& path);

struct ScoreFrame {
  std::string scene_id;
  std::vector<double> scores;
};

std::vector<ScoreFrame> load_score_frames(const std::filesystem::path& path);
void save_score_frames(const std::vector<ScoreFrame>& frames, const std::filesystem::path& path);

// Whole-file helpers. Writers hold an exclusive lock on the target for the
// duration of the write.
std::string read_file(const std::filesystem::path& path);
void write_file_locked(const std::filesystem::path& path, const std::string& bytes);

}  // namespace trajsim

#endif  // TRAJSIM_SCENE_IO_HPP_
