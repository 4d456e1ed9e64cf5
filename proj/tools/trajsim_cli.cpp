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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trajsim/distill.hpp"
#include "trajsim/metrics.hpp"
#include "trajsim/report.hpp"
#include "trajsim/scene_io.hpp"
#include "trajsim/selection.hpp"
#include "trajsim/synthetic.hpp"
#include "trajsim/vocabulary.hpp"

namespace fs = std::filesystem;
using namespace trajsim;

namespace {

// --workers wins, then TRAJSIM_THREADS, then the hardware count.
int resolve_workers(const std::optional<int>& flag) {
  if (flag) {
    if (*flag < 1) throw std::invalid_argument("--workers must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("TRAJSIM_THREADS")) {
    int n = 0;
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
    }
    if (n < 1) throw std::invalid_argument(std::string("TRAJSIM_THREADS must be a positive integer, got '") + env + "'");
    return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::map<std::string, const TrajectoryFrame*> index_frames(const std::vector<TrajectoryFrame>& frames) {
  std::map<std::string, const TrajectoryFrame*> by_id;
  for (const TrajectoryFrame& f : frames) by_id[f.scene_id] = &f;
  return by_id;
}

const TrajectoryFrame& frame_for(const std::map<std::string, const TrajectoryFrame*>& by_id, const std::string& id,
                                 const std::string& file) {
  const auto it = by_id.find(id);
  if (it == by_id.end()) throw std::runtime_error("'" + file + "' has no frame for scene '" + id + "'");
  return *it->second;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- generate ----

struct GenerateArgs {
  std::string out;
  std::uint64_t seed = 0;
  std::vector<std::string> templates;
  int count = 1;
  int sequence = 0;
  double speed = 8.0;
  std::string probes;
};

void run_generate(const GenerateArgs& a) {
  fs::create_directories(a.out);
  std::vector<TrajectoryFrame> probes;
  if (a.sequence > 0) {
    const std::vector<Scene> seq = generate_sequence(a.sequence, a.speed, a.seed);
    for (const Scene& s : seq) save_scene(s, fs::path(a.out) / (s.scene_id + ".json"));
    std::cout << "wrote " << seq.size() << " sequence frames to " << a.out << "\n";
    return;
  }
  std::vector<SceneTemplate> kinds;
  if (a.templates.empty()) {
    kinds.assign(kAllTemplates.begin(), kAllTemplates.end());
  } else {
    for (const std::string& t : a.templates) kinds.push_back(parse_template(t));
  }
  std::size_t written = 0;
  for (SceneTemplate kind : kinds) {
    for (int i = 0; i < a.count; ++i) {
      SyntheticSpec spec{kind, a.seed + static_cast<std::uint64_t>(i)};
      Scene s = generate_scene(spec);
      char name[96];
      std::snprintf(name, sizeof name, "%s_%04d", std::string(template_name(kind)).c_str(), i);
      s.scene_id = name;
      save_scene(s, fs::path(a.out) / (s.scene_id + ".json"));
      probes.push_back({s.scene_id, {probe_plan(spec)}});
      ++written;
    }
  }
  if (!a.probes.empty()) save_trajectory_frames(probes, a.probes);
  std::cout << "wrote " << written << " scenes to " << a.out << "\n";
}

// ---- score ----

struct ScoreArgs {
  std::string scenes;
  std::string traj = "human";
  std::string out;
  bool v1 = false;
  std::size_t index = 0;
  bool timing = false;
};

void run_score(const ScoreArgs& a) {
  const std::vector<Scene> scenes = load_scene_dir(a.scenes);
  std::vector<TrajectoryFrame> frames;
  if (a.traj != "human") frames = load_trajectory_frames(a.traj);
  const auto by_id = index_frames(frames);

  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.v1 = a.v1;
  for (const Scene& s : scenes) {
    const Trajectory* plan = &s.human_trajectory;
    if (a.traj != "human") {
      const TrajectoryFrame& f = frame_for(by_id, s.scene_id, a.traj);
      if (a.index >= f.trajectories.size()) {
        throw std::runtime_error("scene '" + s.scene_id + "' has no trajectory at index " + std::to_string(a.index));
      }
      plan = &f.trajectories[a.index];
    }
    report.rows.push_back(make_row(s.scene_id, score_plan(*plan, s)));
  }
  finalize(report);
  if (a.timing) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.throughput = Throughput{wall, scenes.size(), wall > 0 ? scenes.size() / wall : 0.0};
  }
  write_file_locked(a.out, report_to_json(report));
  std::printf("%s %.6f over %zu scenes\n", a.v1 ? "mean PDMS" : "mean EPDMS",
              a.v1 ? report.mean_pdms : report.mean_epdms, scenes.size());
}

// ---- build-vocab ----

struct VocabArgs {
  std::string scenes;
  std::size_t k = 256;
  std::uint64_t seed = 0;
  int max_iters = 100;
  std::optional<int> workers;
  std::string out;
  std::string csv;
};

void run_build_vocab(const VocabArgs& a) {
  const std::vector<Trajectory> corpus = load_corpus(a.scenes);
  const Vocabulary v = kmeans(corpus, {a.k, a.max_iters, a.seed, resolve_workers(a.workers)});
  save_vocabulary(v, a.out);
  if (!a.csv.empty()) write_file_locked(a.csv, vocabulary_to_csv(v));
  std::printf("k=%zu corpus=%zu iterations=%d inertia=%.6g\n", v.size(), corpus.size(), v.iterations, v.inertia);
}

// ---- distill ----

struct DistillArgs {
  std::string scenes;
  std::string vocab;
  double threshold = 0.95;
  std::size_t n_pseudo = 4;
  std::optional<int> workers;
  std::uint64_t seed = 0;
  std::string out;
  std::string teachers;
  std::string checkpoint;
  std::string timing;
};

void run_distill(const DistillArgs& a) {
  DistillConfig cfg;
  cfg.threshold = a.threshold;
  cfg.n_pseudo = a.n_pseudo;
  cfg.rng_seed = a.seed;
  validate(cfg);

  const std::vector<Scene> scenes = load_scene_dir(a.scenes);
  const Vocabulary vocab = load_vocabulary(a.vocab);
  ScoringOptions opts;
  opts.workers = resolve_workers(a.workers);
  if (!a.checkpoint.empty()) opts.checkpoint = fs::path(a.checkpoint);

  const auto start = std::chrono::steady_clock::now();
  const ScoreMatrix m = score_vocabulary(scenes, vocab, opts);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_score_matrix(m, a.out);

  std::vector<PseudoTeacherSet> sets;
  std::size_t with_teachers = 0;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    sets.push_back(select_pseudo_teachers(m.row(s), vocab, cfg, scenes[s].scene_id));
    with_teachers += !sets.back().source_indices.empty();
  }
  if (!a.teachers.empty()) write_file_locked(a.teachers, teachers_to_text(sets));

  const std::size_t evals = scenes.size() * vocab.size();
  if (!a.timing.empty()) {
    nlohmann::ordered_json j;
    j["workers"] = opts.workers;
    j["scenes"] = scenes.size();
    j["vocab_size"] = vocab.size();
    j["evaluations"] = evals;
    j["wall_clock_s"] = wall;
    j["evaluations_per_s"] = wall > 0 ? evals / wall : 0.0;
    j["evaluations_per_s_per_worker"] = wall > 0 ? evals / wall / opts.workers : 0.0;
    write_file_locked(a.timing, j.dump(1) + "\n");
  }
  std::printf("scored %zu x %zu with %d workers; %zu scenes have pseudo teachers\n", scenes.size(), vocab.size(),
              opts.workers, with_teachers);
}

// ---- select ----

struct SelectArgs {
  std::string scenes;
  std::string proposals;
  std::string scores;
  std::string out;
  int frame_gap = 5;
  bool plain = false;
};

void run_select(const SelectArgs& a) {
  const std::vector<Scene> scenes = load_scene_dir(a.scenes);
  const std::vector<TrajectoryFrame> frames = load_trajectory_frames(a.proposals);
  const auto by_id = index_frames(frames);
  std::map<std::string, std::vector<double>> scores;
  for (ScoreFrame& f : load_score_frames(a.scores)) scores[f.scene_id] = std::move(f.scores);

  SelectionState state;
  state.frame_gap = a.frame_gap;
  std::optional<DenseTrajectory> previous;
  int ec_pass = 0;
  std::string out = "scene_id\tindex\tscore\tec\n";
  for (const Scene& s : scenes) {
    const TrajectoryFrame& f = frame_for(by_id, s.scene_id, a.proposals);
    const auto sc = scores.find(s.scene_id);
    if (sc == scores.end()) throw std::runtime_error("'" + a.scores + "' has no scores for scene '" + s.scene_id + "'");
    const ProposalSet ps{f.trajectories, sc->second};
    SelectionState used = state;
    if (a.plain) used.previous_selected.reset();
    const SelectionResult r = select(ps, used, s);
    // EC of the chosen plan against the previous choice, whatever the mode.
    const double ec = score_ec(r.rollout, previous, a.frame_gap);
    if (previous) ec_pass += ec == 1.0;
    out += s.scene_id + "\t" + std::to_string(r.index) + "\t" + format_double(r.recalibrated[r.index]) + "\t" +
           format_double(ec) + "\n";
    previous = r.rollout;
    state.previous_selected = r.rollout;
  }
  write_file_locked(a.out, out);
  std::printf("%s selection over %zu frames: EC pass %d/%zu\n", a.plain ? "plain" : "momentum-aware", scenes.size(),
              ec_pass, scenes.empty() ? 0 : scenes.size() - 1);
}

// ---- diversity ----

struct DiversityArgs {
  std::string proposals;
  double cell = 0.25;
  double width = 2.0;
};

void run_diversity(const DiversityArgs& a) {
  const std::vector<TrajectoryFrame> frames = load_trajectory_frames(a.proposals);
  if (frames.empty()) throw std::runtime_error("'" + a.proposals + "' holds no frames");
  double sum = 0.0;
  for (const TrajectoryFrame& f : frames) {
    const double d = diversity(f.trajectories, a.cell, a.width);
    sum += d;
    std::printf("%s\t%.6f\n", f.scene_id.c_str(), d);
  }
  if (frames.size() > 1) std::printf("mean\t%.6f\n", sum / static_cast<double>(frames.size()));
}

// ---- render ----

struct RenderArgs {
  std::string scene;
  std::string trajs;
  std::string out;
};

void run_render(const RenderArgs& a) {
  const Scene s = load_scene(a.scene);
  std::vector<Trajectory> trajectories;
  if (a.trajs.empty() || a.trajs == "human") {
    trajectories.push_back(s.human_trajectory);
  } else {
    const std::vector<TrajectoryFrame> frames = load_trajectory_frames(a.trajs);
    const auto by_id = index_frames(frames);
    if (by_id.contains(s.scene_id)) {
      trajectories = by_id.at(s.scene_id)->trajectories;
    } else if (frames.size() == 1) {
      trajectories = frames.front().trajectories;
    } else {
      throw std::runtime_error("'" + a.trajs + "' has no frame for scene '" + s.scene_id + "'");
    }
  }
  write_file_locked(a.out, render_svg(s, trajectories));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajsim: trajectory scoring, vocabulary distillation and selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "trajsim 1.0.0");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic scene suite");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--seed", gen.seed, "Base seed")->required();
  g->add_option("--templates", gen.templates, "Template names (default: all)")->delimiter(',');
  g->add_option("--count", gen.count, "Scenes per template")->check(CLI::PositiveNumber);
  g->add_option("--sequence", gen.sequence, "Write an N-frame straight-road sequence instead")
      ->check(CLI::PositiveNumber);
  g->add_option("--speed", gen.speed, "Sequence ego speed, m/s")->check(CLI::PositiveNumber);
  g->add_option("--probes", gen.probes, "Also write each scene's probe plan to this file");

  ScoreArgs sc;
  auto* s = app.add_subcommand("score", "Score one trajectory per scene");
  s->add_option("--scenes", sc.scenes, "Scene directory")->required();
  s->add_option("--traj", sc.traj, "'human' or a trajectory-frames file")->required();
  s->add_option("--out", sc.out, "Report JSON")->required();
  s->add_flag("--v1", sc.v1, "Report PDMS as the headline metric");
  s->add_option("--index", sc.index, "Trajectory index within each frame");
  s->add_flag("--timing", sc.timing, "Include wall-clock throughput in the report");

  VocabArgs vo;
  auto* b = app.add_subcommand("build-vocab", "Cluster human trajectories into a vocabulary");
  b->add_option("--scenes", vo.scenes, "Scene directory")->required();
  b->add_option("--k", vo.k, "Vocabulary size")->required();
  b->add_option("--seed", vo.seed, "k-means++ seed")->required();
  b->add_option("--out", vo.out, "Vocabulary file")->required();
  b->add_option("--max-iters", vo.max_iters, "Lloyd iteration cap")->check(CLI::PositiveNumber);
  b->add_option("--workers", vo.workers, "Worker threads");
  b->add_option("--csv", vo.csv, "Also export the centers as CSV");

  DistillArgs di;
  auto* d = app.add_subcommand("distill", "Score the vocabulary on every scene and mine pseudo teachers");
  d->add_option("--scenes", di.scenes, "Scene directory")->required();
  d->add_option("--vocab", di.vocab, "Vocabulary file")->required();
  d->add_option("--threshold", di.threshold, "Pseudo-teacher score threshold");
  d->add_option("--n-pseudo", di.n_pseudo, "Pseudo teachers per scene");
  d->add_option("--workers", di.workers, "Worker threads");
  d->add_option("--seed", di.seed, "Sampling seed")->required();
  d->add_option("--out", di.out, "Score matrix file")->required();
  d->add_option("--teachers", di.teachers, "Pseudo-teacher text file");
  d->add_option("--checkpoint", di.checkpoint, "Resumable checkpoint path");
  d->add_option("--timing", di.timing, "Write a throughput JSON here");

  SelectArgs se;
  auto* c = app.add_subcommand("select", "Momentum-aware selection over a frame sequence");
  c->add_option("--scenes", se.scenes, "Scene directory, frames in file-name order")->required();
  c->add_option("--proposals", se.proposals, "Trajectory-frames file")->required();
  c->add_option("--scores", se.scores, "Score-frames file")->required();
  c->add_option("--out", se.out, "Selection table")->required();
  c->add_option("--frame-gap", se.frame_gap, "Ticks between frames")->check(CLI::PositiveNumber);
  c->add_flag("--plain", se.plain, "Plain argmax without the comfort term");

  DiversityArgs dv;
  auto* v = app.add_subcommand("diversity", "Print proposal diversity per frame");
  v->add_option("--proposals", dv.proposals, "Trajectory-frames file")->required();
  v->add_option("--cell", dv.cell, "Raster cell size, m")->check(CLI::PositiveNumber);
  v->add_option("--width", dv.width, "Corridor width, m")->check(CLI::PositiveNumber);

  RenderArgs re;
  auto* r = app.add_subcommand("render", "Bird's-eye-view SVG of a scene and trajectories");
  r->add_option("--scene", re.scene, "Scene file")->required();
  r->add_option("--trajs", re.trajs, "Trajectory-frames file or 'human'");
  r->add_option("--out", re.out, "SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*g) run_generate(gen);
    if (*s) run_score(sc);
    if (*b) run_build_vocab(vo);
    if (*d) run_distill(di);
    if (*c) run_select(se);
    if (*v) run_diversity(dv);
    if (*r) run_render(re);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
