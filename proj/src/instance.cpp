#include "mvplc/instance.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "mvplc/random.hpp"

namespace mvplc {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point Instance::vertex(int index) const {
  if (index < 0 || index >= num_vertices()) {
    throw std::out_of_range("vertex index " + std::to_string(index) + " out of range");
  }
  return is_depot(index) ? depots[static_cast<std::size_t>(index)]
                         : targets[static_cast<std::size_t>(index - num_depots())];
}

EdgeIndex::EdgeIndex(int num_depots, int num_targets)
    : num_depots_(num_depots), num_targets_(num_targets) {
  if (num_depots < 0 || num_targets < 0) throw std::invalid_argument("negative vertex count");
  const int n = num_vertices();
  lookup_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
  incident_.resize(static_cast<std::size_t>(n));
  auto add = [&](int u, int v) {
    const int k = static_cast<int>(edges_.size());
    edges_.push_back({u, v});
    lookup_[static_cast<std::size_t>(u * n + v)] = k;
    lookup_[static_cast<std::size_t>(v * n + u)] = k;
    incident_[static_cast<std::size_t>(u)].push_back(k);
    incident_[static_cast<std::size_t>(v)].push_back(k);
  };
  for (int i = 0; i < num_depots; ++i) {
    for (int j = num_depots; j < n; ++j) add(i, j);
  }
  for (int j = num_depots; j < n; ++j) {
    for (int l = j + 1; l < n; ++l) add(j, l);
  }
}

int EdgeIndex::find(int a, int b) const {
  const int n = num_vertices();
  if (a < 0 || b < 0 || a >= n || b >= n) return -1;
  return lookup_[static_cast<std::size_t>(a * n + b)];
}

int EdgeIndex::index(int a, int b) const {
  const int k = find(a, b);
  if (k < 0) {
    throw std::invalid_argument("no edge between vertices " + std::to_string(a) + " and " + std::to_string(b));
  }
  return k;
}

double edge_cost(const Instance& instance, EdgeId e) {
  const int n = instance.num_vertices();
  if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) throw std::invalid_argument("edge endpoint out of range");
  if (e.u == e.v) throw std::invalid_argument("edge endpoints must be distinct");
  if (instance.is_depot(e.u) && instance.is_depot(e.v)) throw std::invalid_argument("no edges between depots");
  return distance(instance.vertex(e.u), instance.vertex(e.v));
}

bool covers_segment(Point landmark, Point a, Point b, double sensing_range) {
  return distance(landmark, a) <= sensing_range && distance(landmark, b) <= sensing_range;
}

CoverageSets build_coverage_sets(const Instance& instance) {
  const EdgeIndex edges(instance);
  CoverageSets coverage;
  coverage.per_edge.resize(static_cast<std::size_t>(edges.size()));
  for (int k = 0; k < edges.size(); ++k) {
    const Point a = instance.vertex(edges.edge(k).u);
    const Point b = instance.vertex(edges.edge(k).v);
    for (int m = 0; m < instance.num_landmarks(); ++m) {
      if (covers_segment(instance.landmark_candidates[static_cast<std::size_t>(m)], a, b, instance.sensing_range)) {
        coverage.per_edge[static_cast<std::size_t>(k)].push_back(m);
      }
    }
  }
  return coverage;
}

Instance generate_instance(const GeneratorParams& params) {
  if (params.n_depots < 1) throw std::invalid_argument("need at least one depot");
  if (params.n_vertices <= params.n_depots) throw std::invalid_argument("n_vertices must exceed n_depots");
  if (!(params.grid > 0.0) || !std::isfinite(params.grid)) throw std::invalid_argument("grid must be positive");
  if (params.lm_factor < 0) throw std::invalid_argument("lm_factor must be non-negative");
  if (!(params.sensing_range > 0.0)) throw std::invalid_argument("sensing range must be positive");

  Rng rng(static_cast<std::uint64_t>(params.seed));
  Instance instance;
  instance.sensing_range = params.sensing_range;
  instance.lm_cost = params.lm_cost;
  instance.seed = params.seed;

  std::set<std::pair<double, double>> used;
  auto draw_distinct = [&] {
    for (;;) {
      const Point p{rng.uniform(0.0, params.grid), rng.uniform(0.0, params.grid)};
      if (used.emplace(p.x, p.y).second) return p;
    }
  };
  for (int i = 0; i < params.n_depots; ++i) instance.depots.push_back(draw_distinct());
  for (int j = params.n_depots; j < params.n_vertices; ++j) instance.targets.push_back(draw_distinct());
  const int n_landmarks = params.lm_factor * params.n_vertices;
  for (int k = 0; k < n_landmarks; ++k) {
    instance.landmark_candidates.push_back({rng.uniform(0.0, params.grid), rng.uniform(0.0, params.grid)});
  }
  return instance;
}

std::vector<Violation> validate_instance(const Instance& instance) {
  std::vector<Violation> out;
  if (instance.depots.empty()) out.push_back({"depots", "at least one depot required"});
  if (instance.targets.empty()) out.push_back({"targets", "at least one target required"});
  if (!(instance.sensing_range > 0.0) || !std::isfinite(instance.sensing_range)) {
    out.push_back({"sensing_range", "must be a positive finite number"});
  }
  if (!(instance.lm_cost >= 0.0) || !std::isfinite(instance.lm_cost)) {
    out.push_back({"lm_cost", "must be a non-negative finite number"});
  }

  auto check_finite = [&](const std::vector<Point>& points, const char* field) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) {
        out.push_back({std::string(field) + "[" + std::to_string(i) + "]", "coordinates must be finite"});
      }
    }
  };
  check_finite(instance.depots, "depots");
  check_finite(instance.targets, "targets");
  check_finite(instance.landmark_candidates, "landmarks");

  // Depot and target locations must be pairwise distinct.
  const int n = instance.num_vertices();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (instance.vertex(a) == instance.vertex(b)) {
        auto name = [&](int v) {
          return instance.is_depot(v) ? "depots[" + std::to_string(v) + "]"
                                      : "targets[" + std::to_string(v - instance.num_depots()) + "]";
        };
        out.push_back({name(b), "duplicates the location of " + name(a)});
      }
    }
  }
  return out;
}

}  // namespace mvplc
