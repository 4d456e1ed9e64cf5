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

#include "trajsim/distill.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "trajsim/binary.hpp"
#include "trajsim/parallel.hpp"
#include "trajsim/rng.hpp"
#include "trajsim/scene_io.hpp"

namespace trajsim {

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& matrix) {
  return std::filesystem::path(matrix.string() + ".done");
}

std::set<std::size_t> read_sidecar(const std::filesystem::path& path) {
  std::set<std::size_t> done;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) done.insert(std::stoull(line));
  }
  return done;
}

void write_checkpoint(const ScoreMatrix& m, const std::set<std::size_t>& done,
                      const std::filesystem::path& path) {
  save_score_matrix(m, path);
  std::string text;
  for (std::size_t s : done) text += std::to_string(s) + "\n";
  write_file_locked(sidecar_path(path), text);
}

}  // namespace

ScoreMatrix score_vocabulary(std::span<const Scene> scenes, const Vocabulary& vocab,
                             const ScoringOptions& options) {
  if (scenes.empty()) throw std::invalid_argument("score_vocabulary needs at least one scene");
  if (vocab.centers.empty()) throw std::invalid_argument("score_vocabulary needs a nonempty vocabulary");

  const std::size_t k = vocab.size();
  ScoreMatrix m;
  m.scenes = scenes.size();
  m.vocab_size = k;
  m.values.assign(m.scenes * k, std::numeric_limits<double>::quiet_NaN());
  if (options.retain_subscores) m.subscores.assign(m.scenes * k, SubScores{});

  std::set<std::size_t> done;
  if (options.checkpoint && std::filesystem::exists(*options.checkpoint) &&
      std::filesystem::exists(sidecar_path(*options.checkpoint))) {
    const ScoreMatrix saved = load_score_matrix(*options.checkpoint);
    if (saved.scenes != m.scenes || saved.vocab_size != k) {
      throw std::runtime_error("checkpoint '" + options.checkpoint->string() + "' has a different shape");
    }
    done = read_sidecar(sidecar_path(*options.checkpoint));
    for (std::size_t s : done) {
      if (s >= m.scenes) throw std::runtime_error("checkpoint lists scene index out of range");
      std::copy_n(saved.values.begin() + static_cast<std::ptrdiff_t>(s * k), k,
                  m.values.begin() + static_cast<std::ptrdiff_t>(s * k));
    }
  }

  std::vector<std::size_t> pending;
  for (std::size_t s = 0; s < m.scenes; ++s) {
    if (!done.contains(s)) pending.push_back(s);
  }

  const std::size_t batch = static_cast<std::size_t>(std::max(options.workers, 1)) * 4;
  for (std::size_t start = 0; start < pending.size(); start += batch) {
    const std::size_t count = std::min(batch, pending.size() - start);
    std::vector<DenseTrajectory> references(count);
    parallel_for(count, options.workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) references[i] = reference_rollout(scenes[pending[start + i]], options.kinematics);
    });
    parallel_for(count * k, options.workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t item = b; item < e; ++item) {
        const std::size_t local = item / k;
        const std::size_t center = item % k;
        const std::size_t s = pending[start + local];
        const Scene& scene = scenes[s];
        const DenseTrajectory d = rollout(vocab.centers[center], scene, options.kinematics);
        const SubScores sub = evaluate(d, scene, references[local], std::nullopt, options.metrics);
        m.values[s * k + center] = aggregate_epdms(sub);
        if (options.retain_subscores) m.subscores[s * k + center] = sub;
      }
    });
    for (std::size_t i = 0; i < count; ++i) done.insert(pending[start + i]);
    if (options.checkpoint) {
      try {
        write_checkpoint(m, done, *options.checkpoint);
      } catch (const std::exception& e) {
        throw CheckpointError(std::string("checkpoint write failed: ") + e.what(), m,
                              std::vector<std::size_t>(done.begin(), done.end()));
      }
    }
  }
  return m;
}

std::string score_matrix_to_bytes(const ScoreMatrix& m) {
  std::string out = "TSCR";
  binary::put<std::uint32_t>(out, kScoreMatrixVersion);
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(m.scenes));
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(m.vocab_size));
  for (double v : m.values) binary::put(out, v);
  return out;
}

ScoreMatrix score_matrix_from_bytes(const std::string& bytes) {
  binary::Reader in(bytes, "score matrix");
  in.expect_magic("TSCR");
  const auto version = in.get<std::uint32_t>();
  if (version != kScoreMatrixVersion) {
    throw std::runtime_error("score matrix: unsupported version " + std::to_string(version));
  }
  ScoreMatrix m;
  m.scenes = in.get<std::uint32_t>();
  m.vocab_size = in.get<std::uint32_t>();
  m.values.resize(m.scenes * m.vocab_size);
  for (double& v : m.values) v = in.get<double>();
  if (!in.at_end()) throw std::runtime_error("score matrix: trailing bytes");
  return m;
}

void save_score_matrix(const ScoreMatrix& m, const std::filesystem::path& path) {
  write_file_locked(path, score_matrix_to_bytes(m));
}

ScoreMatrix load_score_matrix(const std::filesystem::path& path) { return score_matrix_from_bytes(read_file(path)); }

void validate(const DistillConfig& cfg) {
  if (!(cfg.threshold > 0.0 && cfg.threshold <= 1.0)) throw std::invalid_argument("threshold must lie in (0, 1]");
  if (!(cfg.lambda > 0.0 && cfg.lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
}

PseudoTeacherSet select_pseudo_teachers(std::span<const double> row, const Vocabulary& vocab,
                                        const DistillConfig& cfg, const std::string& scene_id) {
  validate(cfg);
  if (row.size() != vocab.size()) {
    throw std::invalid_argument("score row has " + std::to_string(row.size()) + " entries for a vocabulary of " +
                                std::to_string(vocab.size()));
  }
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] >= cfg.threshold) candidates.push_back(i);
  }
  if (candidates.size() > cfg.n_pseudo) {
    Rng rng(splitmix64(cfg.rng_seed ^ splitmix64(fnv1a64(scene_id))));
    for (std::size_t i = 0; i < cfg.n_pseudo; ++i) {
      const std::size_t j = i + uniform_index(rng, candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(cfg.n_pseudo);
    std::sort(candidates.begin(), candidates.end());
  }
  PseudoTeacherSet set;
  set.scene_id = scene_id;
  set.source_indices = candidates;
  for (std::size_t i : candidates) {
    set.scores.push_back(row[i]);
    set.trajectories.push_back(vocab.centers[i]);
  }
  return set;
}

std::string teachers_to_text(std::span<const PseudoTeacherSet> sets) {
  std::string out;
  char buf[32];
  for (const PseudoTeacherSet& s : sets) {
    out += s.scene_id;
    out += '\t';
    for (std::size_t i = 0; i < s.source_indices.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(s.source_indices[i]);
    }
    out += '\t';
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", s.scores[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::vector<PseudoTeacherSet> teachers_from_text(const std::string& text, const Vocabulary& vocab) {
  std::vector<PseudoTeacherSet> sets;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    if (s.empty()) return parts;
    std::size_t pos = 0;
    for (std::size_t next; (next = s.find(sep, pos)) != std::string::npos; pos = next + 1) parts.push_back(s.substr(pos, next - pos));
    parts.push_back(s.substr(pos));
    return parts;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw std::runtime_error("teachers line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
    PseudoTeacherSet s;
    s.scene_id = fields[0];
    for (const auto& idx : split(fields[1], ',')) {
      const std::size_t i = std::stoull(idx);
      if (i >= vocab.size()) throw std::runtime_error("teachers line " + std::to_string(line_no) + ": index out of range");
      s.source_indices.push_back(i);
      s.trajectories.push_back(vocab.centers[i]);
    }
    for (const auto& v : split(fields[2], ',')) s.scores.push_back(std::stod(v));
    if (s.scores.size() != s.source_indices.size()) {
      throw std::runtime_error("teachers line " + std::to_string(line_no) + ": index/score count mismatch");
    }
    sets.push_back(std::move(s));
  }
  return sets;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("trajectories have different waypoint counts (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double dx = a.poses[i].x - b.poses[i].x;
    const double dy = a.poses[i].y - b.poses[i].y;
    sum += dx * dx + dy * dy;
  }
  return std::sqrt(sum);
}

double distill_loss(const std::vector<std::vector<Trajectory>>& proposals_per_iter,
                    const Trajectory& human, std::span<const Trajectory> pseudo, double lambda) {
  const std::size_t levels = proposals_per_iter.size();
  if (levels == 0) throw std::invalid_argument("distill_loss needs at least one iteration");
  auto min_distance = [](const Trajectory& target, const std::vector<Trajectory>& proposals) {
    double best = std::numeric_limits<double>::infinity();
    for (const Trajectory& w : proposals) best = std::min(best, trajectory_distance(target, w));
    return best;
  };
  double loss = 0.0;
  for (std::size_t l = 0; l < levels; ++l) {
    const auto& proposals = proposals_per_iter[l];
    if (proposals.empty()) throw std::invalid_argument("distill_loss needs at least one proposal per iteration");
    double term = min_distance(human, proposals);
    for (const Trajectory& p : pseudo) term += min_distance(p, proposals);
    loss += std::pow(lambda, static_cast<double>(levels - 1 - l)) * term;
  }
  return loss;
}

}  // namespace trajsim
