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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "trajsim/distill.hpp"
#include "trajsim/metrics.hpp"
#include "trajsim/scene_io.hpp"
#include "trajsim/selection.hpp"
#include "trajsim/synthetic.hpp"
#include "trajsim/vocabulary.hpp"

namespace py = pybind11;
using namespace trajsim;

namespace {

using PoseArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Trajectories cross the boundary as (N, 3) arrays of x, y, heading.
Trajectory to_traj(const PoseArray& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw std::invalid_argument("trajectory must have shape (N, 3)");
  Trajectory t;
  const auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < r.shape(0); ++i) t.poses.push_back({r(i, 0), r(i, 1), r(i, 2)});
  return t;
}

PoseArray from_traj(const Trajectory& t) {
  PoseArray out({static_cast<py::ssize_t>(t.size()), py::ssize_t{3}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < t.size(); ++i) {
    w(i, 0) = t.poses[i].x;
    w(i, 1) = t.poses[i].y;
    w(i, 2) = t.poses[i].psi;
  }
  return out;
}

std::vector<Trajectory> to_trajs(const std::vector<PoseArray>& v) {
  std::vector<Trajectory> out;
  out.reserve(v.size());
  for (const auto& a : v) out.push_back(to_traj(a));
  return out;
}

std::vector<PoseArray> from_trajs(const std::vector<Trajectory>& v) {
  std::vector<PoseArray> out;
  for (const auto& t : v) out.push_back(from_traj(t));
  return out;
}

// Dense rollouts as (41, 6) arrays: x, y, heading, speed, accel, steer.
PoseArray from_dense(const DenseTrajectory& d) {
  PoseArray out({static_cast<py::ssize_t>(d.states.size()), py::ssize_t{6}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < d.states.size(); ++i) {
    const EgoState& s = d.states[i];
    const double row[6]{s.pose.x, s.pose.y, s.pose.psi, s.v, s.a, s.steer};
    for (int j = 0; j < 6; ++j) w(i, j) = row[j];
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_trajsim, m) {
  m.doc() = "Trajectory scoring, vocabulary clustering, distillation and selection.";

  py::class_<SubScores>(m, "SubScores")
      .def(py::init<>())
      .def_readwrite("nc", &SubScores::nc)
      .def_readwrite("dac", &SubScores::dac)
      .def_readwrite("ddc", &SubScores::ddc)
      .def_readwrite("tlc", &SubScores::tlc)
      .def_readwrite("ep", &SubScores::ep)
      .def_readwrite("ttc", &SubScores::ttc)
      .def_readwrite("lk", &SubScores::lk)
      .def_readwrite("hc", &SubScores::hc)
      .def_readwrite("ec", &SubScores::ec)
      .def_readwrite("c", &SubScores::c)
      .def_property_readonly("pdms", [](const SubScores& s) { return aggregate_pdms(s); })
      .def_property_readonly("epdms", [](const SubScores& s) { return aggregate_epdms(s); })
      .def("__repr__", [](const SubScores& s) {
        return py::str("SubScores(nc={}, dac={}, ddc={}, tlc={}, ep={:.4f}, ttc={}, lk={}, hc={}, ec={})")
            .format(s.nc, s.dac, s.ddc, s.tlc, s.ep, s.ttc, s.lk, s.hc, s.ec);
      });

  m.def("aggregate_pdms", &aggregate_pdms);
  m.def("aggregate_epdms", &aggregate_epdms);

  py::class_<Scene>(m, "Scene")
      .def_readonly("scene_id", &Scene::scene_id)
      .def_property_readonly("human_trajectory", [](const Scene& s) { return from_traj(s.human_trajectory); })
      .def_property_readonly("num_agents", [](const Scene& s) { return s.agents.size(); })
      .def("to_json", &scene_to_json)
      .def_static("from_json", &scene_from_json)
      .def_static("load", &load_scene)
      .def("save", [](const Scene& s, const std::filesystem::path& p) { save_scene(s, p); });

  m.def("template_names", [] {
    std::vector<std::string> names;
    for (SceneTemplate t : kAllTemplates) names.emplace_back(template_name(t));
    return names;
  });
  m.def(
      "generate_scene",
      [](const std::string& kind, std::uint64_t seed, std::optional<double> speed, bool randomize_frame) {
        return generate_scene({parse_template(kind), seed, speed, randomize_frame});
      },
      py::arg("template"), py::arg("seed"), py::arg("ego_speed") = py::none(), py::arg("randomize_frame") = true);
  m.def(
      "probe_plan",
      [](const std::string& kind, std::uint64_t seed, std::optional<double> speed, bool randomize_frame) {
        return from_traj(probe_plan({parse_template(kind), seed, speed, randomize_frame}));
      },
      py::arg("template"), py::arg("seed"), py::arg("ego_speed") = py::none(), py::arg("randomize_frame") = true);
  m.def("generate_sequence", &generate_sequence, py::arg("frames"), py::arg("speed"), py::arg("seed"));
  m.def("load_scene_dir", &load_scene_dir);

  m.def(
      "rollout", [](const PoseArray& plan, const Scene& s) { return from_dense(rollout(to_traj(plan), s)); },
      py::arg("plan"), py::arg("scene"), "Track an ego-frame plan; returns world-frame (41, 6) states.");
  m.def(
      "score_plan", [](const PoseArray& plan, const Scene& s) { return score_plan(to_traj(plan), s); },
      py::arg("plan"), py::arg("scene"));
  m.def(
      "diversity",
      [](const std::vector<PoseArray>& proposals, double cell, double width) {
        const auto t = to_trajs(proposals);
        return diversity(t, cell, width);
      },
      py::arg("proposals"), py::arg("cell_size") = 0.25, py::arg("width") = 2.0);

  py::class_<Vocabulary>(m, "Vocabulary")
      .def_property_readonly("centers", [](const Vocabulary& v) { return from_trajs(v.centers); })
      .def_readonly("inertia", &Vocabulary::inertia)
      .def_readonly("inertia_history", &Vocabulary::inertia_history)
      .def_readonly("iterations", &Vocabulary::iterations)
      .def("__len__", &Vocabulary::size)
      .def("save", [](const Vocabulary& v, const std::filesystem::path& p) { save_vocabulary(v, p); })
      .def_static("load", &load_vocabulary)
      .def("nearest", [](const Vocabulary& v, const PoseArray& t) {
        const NearestCenter n = nearest_center(v, to_traj(t));
        return py::make_tuple(n.index, n.distance);
      });
  m.def(
      "kmeans",
      [](const std::vector<PoseArray>& corpus, std::size_t k, std::uint64_t seed, int max_iters, int workers) {
        const auto t = to_trajs(corpus);
        py::gil_scoped_release release;
        return kmeans(t, {k, max_iters, seed, workers});
      },
      py::arg("corpus"), py::arg("k"), py::arg("seed"), py::arg("max_iters") = 100, py::arg("workers") = 1);

  m.def(
      "score_vocabulary",
      [](const std::vector<Scene>& scenes, const Vocabulary& vocab, int workers) {
        ScoringOptions opt;
        opt.workers = workers;
        ScoreMatrix mat;
        {
          py::gil_scoped_release release;
          mat = score_vocabulary(scenes, vocab, opt);
        }
        py::array_t<double> out({mat.scenes, mat.vocab_size});
        std::copy(mat.values.begin(), mat.values.end(), out.mutable_data());
        return out;
      },
      py::arg("scenes"), py::arg("vocab"), py::arg("workers") = 1, "Returns an (S, K) EPDMS matrix.");
  m.def(
      "select_pseudo_teachers",
      [](const std::vector<double>& row, const Vocabulary& vocab, double threshold, std::size_t n_pseudo,
         std::uint64_t seed, const std::string& scene_id) {
        DistillConfig cfg;
        cfg.threshold = threshold;
        cfg.n_pseudo = n_pseudo;
        cfg.rng_seed = seed;
        const PseudoTeacherSet set = select_pseudo_teachers(row, vocab, cfg, scene_id);
        return py::make_tuple(set.source_indices, set.scores, from_trajs(set.trajectories));
      },
      py::arg("row"), py::arg("vocab"), py::arg("threshold") = 0.95, py::arg("n_pseudo") = 4, py::arg("seed") = 0,
      py::arg("scene_id") = "");
  m.def(
      "distill_loss",
      [](const std::vector<std::vector<PoseArray>>& proposals, const PoseArray& human,
         const std::vector<PoseArray>& pseudo, double lambda) {
        std::vector<std::vector<Trajectory>> props;
        for (const auto& level : proposals) props.push_back(to_trajs(level));
        const auto p = to_trajs(pseudo);
        return distill_loss(props, to_traj(human), p, lambda);
      },
      py::arg("proposals"), py::arg("human"), py::arg("pseudo"), py::arg("lam") = 0.1);

  m.def("recalibrate", [](const std::vector<double>& s, const std::vector<double>& c) { return recalibrate(s, c); });
  m.def(
      "select",
      [](const std::vector<PoseArray>& proposals, const std::vector<double>& scores, const Scene& scene,
         std::optional<PoseArray> previous, int frame_gap) {
        ProposalSet ps{to_trajs(proposals), scores};
        SelectionState state;
        state.frame_gap = frame_gap;
        if (previous) {
          const auto r = previous->unchecked<2>();
          if (r.ndim() != 2 || r.shape(1) != 6) throw std::invalid_argument("previous must have shape (41, 6)");
          DenseTrajectory d;
          for (py::ssize_t i = 0; i < r.shape(0); ++i) {
            d.states.push_back({{r(i, 0), r(i, 1), r(i, 2)}, r(i, 3), r(i, 4), r(i, 5)});
          }
          state.previous_selected = d;
        }
        const SelectionResult res = select(ps, state, scene);
        return py::make_tuple(res.index, from_dense(res.rollout), res.comfort, res.recalibrated);
      },
      py::arg("proposals"), py::arg("scores"), py::arg("scene"), py::arg("previous") = py::none(),
      py::arg("frame_gap") = 5, "Returns (index, rollout, comfort, recalibrated).");
}
