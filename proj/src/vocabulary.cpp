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

#include "trajsim/vocabulary.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "trajsim/binary.hpp"
#include "trajsim/parallel.hpp"
#include "trajsim/rng.hpp"
#include "trajsim/scene_io.hpp"

namespace trajsim {

namespace {

double squared_distance(const double* a, const double* b, std::size_t dim) {
  double sum = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return sum;
}

// Row-major matrix of embeddings.
struct Points {
  std::vector<double> data;
  std::size_t dim = 0;

  std::size_t count() const { return dim == 0 ? 0 : data.size() / dim; }
  const double* row(std::size_t i) const { return data.data() + i * dim; }
  double* row(std::size_t i) { return data.data() + i * dim; }
};

Points embed_all(std::span<const Trajectory> corpus) {
  Points pts;
  pts.dim = 2 * corpus.front().size();
  pts.data.reserve(corpus.size() * pts.dim);
  for (const Trajectory& t : corpus) {
    if (t.size() != corpus.front().size()) {
      throw std::invalid_argument("corpus trajectories must all have the same number of waypoints");
    }
    for (const Pose& p : t.poses) {
      pts.data.push_back(p.x);
      pts.data.push_back(p.y);
    }
  }
  return pts;
}

Points seed_plus_plus(const Points& pts, std::size_t k, Rng& rng) {
  const std::size_t n = pts.count();
  Points centers;
  centers.dim = pts.dim;
  centers.data.reserve(k * pts.dim);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(n, false);

  std::size_t pick = uniform_index(rng, n);
  for (std::size_t c = 0; c < k; ++c) {
    chosen[pick] = true;
    centers.data.insert(centers.data.end(), pts.row(pick), pts.row(pick) + pts.dim);
    if (c + 1 == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(pts.row(i), pts.row(pick), pts.dim));
      total += d2[i];
    }
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double cumulative = 0.0;
      pick = n;
      std::size_t last_positive = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        last_positive = i;
        cumulative += d2[i];
        if (cumulative > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = last_positive;
    } else {
      // Every point coincides with a chosen center; duplicate the first
      // unchosen point.
      pick = 0;
      while (pick < n && chosen[pick]) ++pick;
      if (pick == n) pick = 0;
    }
  }
  return centers;
}

void assign(const Points& pts, const Points& centers, std::vector<std::size_t>& labels,
            std::vector<double>& dist2, int workers) {
  const std::size_t k = centers.count();
  parallel_for(pts.count(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(pts.row(i), centers.row(0), pts.dim);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = squared_distance(pts.row(i), centers.row(c), pts.dim);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      labels[i] = best;
      dist2[i] = best_d;
    }
  });
}

void update(const Points& pts, Points& centers, const std::vector<std::size_t>& labels) {
  const std::size_t k = centers.count();
  const std::size_t dim = pts.dim;
  // Running means: exact when every member of a cluster is identical.
  std::vector<double> means(k * dim, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < pts.count(); ++i) {
    double* m = means.data() + labels[i] * dim;
    const double* x = pts.row(i);
    const double n = static_cast<double>(++counts[labels[i]]);
    for (std::size_t j = 0; j < dim; ++j) m[j] += (x[j] - m[j]) / n;
  }
  std::vector<std::size_t> empty;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      empty.push_back(c);
      continue;
    }
    std::copy(means.begin() + static_cast<std::ptrdiff_t>(c * dim),
              means.begin() + static_cast<std::ptrdiff_t>((c + 1) * dim), centers.row(c));
  }
  if (empty.empty()) return;

  // Reseed each empty cluster at the point farthest from its own center.
  std::vector<double> far(pts.count());
  for (std::size_t i = 0; i < pts.count(); ++i) far[i] = squared_distance(pts.row(i), centers.row(labels[i]), dim);
  for (std::size_t c : empty) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < far.size(); ++i) {
      if (far[i] > far[best]) best = i;
    }
    std::copy(pts.row(best), pts.row(best) + dim, centers.row(c));
    far[best] = -1.0;
  }
}

}  // namespace

std::vector<double> embed(const Trajectory& t) {
  std::vector<double> v;
  v.reserve(2 * t.size());
  for (const Pose& p : t.poses) {
    v.push_back(p.x);
    v.push_back(p.y);
  }
  return v;
}

Trajectory reconstruct(std::span<const double> embedding) {
  if (embedding.size() % 2 != 0) throw std::invalid_argument("embedding length must be even");
  const std::size_t m = embedding.size() / 2;
  Trajectory t;
  t.poses.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    t.poses[i].x = embedding[2 * i];
    t.poses[i].y = embedding[2 * i + 1];
  }
  double heading = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double dx = t.poses[i + 1].x - t.poses[i].x;
    const double dy = t.poses[i + 1].y - t.poses[i].y;
    if (std::hypot(dx, dy) > 1e-6) heading = std::atan2(dy, dx);
    t.poses[i].psi = normalize_angle(heading);
  }
  if (m >= 2) t.poses[m - 1].psi = t.poses[m - 2].psi;
  return t;
}

Vocabulary kmeans(std::span<const Trajectory> corpus, const KMeansOptions& options) {
  if (options.k == 0) throw std::invalid_argument("k-means needs k >= 1");
  if (corpus.size() < options.k) {
    throw std::invalid_argument("corpus has " + std::to_string(corpus.size()) +
                                " trajectories, fewer than k = " + std::to_string(options.k));
  }
  const Points pts = embed_all(corpus);
  Rng rng(splitmix64(options.seed));
  Points centers = seed_plus_plus(pts, options.k, rng);

  const std::size_t n = pts.count();
  std::vector<std::size_t> labels(n, 0);
  std::vector<std::size_t> previous;
  std::vector<double> dist2(n, 0.0);

  Vocabulary vocab;
  vocab.seed = options.seed;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    assign(pts, centers, labels, dist2, options.workers);
    double inertia = 0.0;
    for (double d : dist2) inertia += d;
    vocab.inertia_history.push_back(inertia);
    vocab.iterations = iter + 1;
    if (labels == previous) break;
    update(pts, centers, labels);
    previous = labels;
  }

  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) inertia += squared_distance(pts.row(i), centers.row(labels[i]), pts.dim);
  vocab.inertia = inertia;
  vocab.centers.reserve(options.k);
  for (std::size_t c = 0; c < options.k; ++c) {
    vocab.centers.push_back(reconstruct(std::span<const double>(centers.row(c), pts.dim)));
  }
  return vocab;
}

NearestCenter nearest_center(const Vocabulary& vocab, const Trajectory& t) {
  if (vocab.centers.empty()) throw std::invalid_argument("empty vocabulary");
  if (t.size() != vocab.waypoints()) throw std::invalid_argument("trajectory length does not match the vocabulary");
  const std::vector<double> q = embed(t);
  NearestCenter best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < vocab.centers.size(); ++c) {
    const std::vector<double> e = embed(vocab.centers[c]);
    const double d = squared_distance(q.data(), e.data(), q.size());
    if (d < best.distance) best = {c, d};
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

std::string vocabulary_to_bytes(const Vocabulary& vocab) {
  std::string out = "TVOC";
  binary::put<std::uint32_t>(out, kVocabularyVersion);
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.size()));
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.waypoints()));
  binary::put<std::uint64_t>(out, vocab.seed);
  for (const Trajectory& t : vocab.centers) {
    for (const Pose& p : t.poses) {
      binary::put(out, p.x);
      binary::put(out, p.y);
      binary::put(out, p.psi);
    }
  }
  return out;
}

Vocabulary vocabulary_from_bytes(const std::string& bytes) {
  binary::Reader in(bytes, "vocabulary");
  in.expect_magic("TVOC");
  const auto version = in.get<std::uint32_t>();
  if (version != kVocabularyVersion) {
    throw std::runtime_error("vocabulary: unsupported version " + std::to_string(version));
  }
  const auto k = in.get<std::uint32_t>();
  const auto m = in.get<std::uint32_t>();
  Vocabulary vocab;
  vocab.seed = in.get<std::uint64_t>();
  vocab.centers.resize(k);
  for (auto& t : vocab.centers) {
    t.poses.resize(m);
    for (auto& p : t.poses) {
      p.x = in.get<double>();
      p.y = in.get<double>();
      p.psi = in.get<double>();
    }
  }
  if (!in.at_end()) throw std::runtime_error("vocabulary: trailing bytes");
  return vocab;
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  write_file_locked(path, vocabulary_to_bytes(vocab));
}

Vocabulary load_vocabulary(const std::filesystem::path& path) { return vocabulary_from_bytes(read_file(path)); }

std::string vocabulary_to_csv(const Vocabulary& vocab) {
  std::string out = "center,waypoint,x_m,y_m,psi_rad\n";
  char line[160];
  for (std::size_t c = 0; c < vocab.size(); ++c) {
    for (std::size_t i = 0; i < vocab.centers[c].size(); ++i) {
      const Pose& p = vocab.centers[c].poses[i];
      std::snprintf(line, sizeof line, "%zu,%zu,%.17g,%.17g,%.17g\n", c, i, p.x, p.y, p.psi);
      out += line;
    }
  }
  return out;
}

}  // namespace trajsim
