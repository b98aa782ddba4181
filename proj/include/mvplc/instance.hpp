#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mvplc {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

// An MVPLC instance. Vertices are indexed depots first (0..p-1), then
// targets (p..p+q-1).
struct Instance {
  std::vector<Point> depots;
  std::vector<Point> targets;
  std::vector<Point> landmark_candidates;
  double sensing_range = 35.0;
  double lm_cost = 1.0;
  std::int64_t seed = 0;

  int num_depots() const { return static_cast<int>(depots.size()); }
  int num_targets() const { return static_cast<int>(targets.size()); }
  int num_vertices() const { return num_depots() + num_targets(); }
  int num_landmarks() const { return static_cast<int>(landmark_candidates.size()); }
  bool is_depot(int vertex) const { return vertex < num_depots(); }
  Point vertex(int index) const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Undirected edge with u < v. At most one endpoint is a depot.
struct EdgeId {
  int u = 0;
  int v = 0;

  // Normalizes endpoint order; does not validate against an instance.
  static EdgeId between(int a, int b) { return a < b ? EdgeId{a, b} : EdgeId{b, a}; }

  friend bool operator==(const EdgeId&, const EdgeId&) = default;
};

// Enumerates the edge set E (every vertex to every target, no depot-depot
// edges) in a fixed order: depot-target edges first, then target-target,
// each block ordered lexicographically by (u, v).
class EdgeIndex {
 public:
  EdgeIndex(int num_depots, int num_targets);
  explicit EdgeIndex(const Instance& instance)
      : EdgeIndex(instance.num_depots(), instance.num_targets()) {}

  int size() const { return static_cast<int>(edges_.size()); }
  int num_depots() const { return num_depots_; }
  int num_targets() const { return num_targets_; }
  int num_vertices() const { return num_depots_ + num_targets_; }
  bool is_depot(int vertex) const { return vertex < num_depots_; }

  const EdgeId& edge(int k) const { return edges_[static_cast<std::size_t>(k)]; }
  std::span<const EdgeId> edges() const { return edges_; }

  // Index of the edge between a and b, or -1 if there is none.
  int find(int a, int b) const;
  // Like find, but throws std::invalid_argument for a non-edge.
  int index(int a, int b) const;

  std::span<const int> incident(int vertex) const { return incident_[static_cast<std::size_t>(vertex)]; }

 private:
  int num_depots_;
  int num_targets_;
  std::vector<EdgeId> edges_;
  std::vector<int> lookup_;  // dense V x V table
  std::vector<std::vector<int>> incident_;
};

// Euclidean cost of an edge. Throws std::invalid_argument for self-loops,
// depot-depot pairs and out-of-range endpoints.
double edge_cost(const Instance& instance, EdgeId e);

// Per-edge lists of landmark candidates covering the whole segment,
// indexed like EdgeIndex.
struct CoverageSets {
  std::vector<std::vector<int>> per_edge;

  const std::vector<int>& operator[](int edge) const { return per_edge[static_cast<std::size_t>(edge)]; }
  int size() const { return static_cast<int>(per_edge.size()); }
};

// A candidate covers a segment iff both endpoints lie within the closed
// sensing disk (the disk is convex, so this covers every interior point).
bool covers_segment(Point landmark, Point a, Point b, double sensing_range);

CoverageSets build_coverage_sets(const Instance& instance);

struct GeneratorParams {
  int n_depots = 2;
  int n_vertices = 20;
  double grid = 100.0;
  int lm_factor = 5;
  double sensing_range = 35.0;
  double lm_cost = 1.0;
  std::int64_t seed = 0;
};

// Uniform random instance on [0, grid]^2. Draw order: depots, targets, then
// landmark candidates, all from one Rng seeded with params.seed.
Instance generate_instance(const GeneratorParams& params);

struct Violation {
  std::string field;
  std::string rule;
};

std::vector<Violation> validate_instance(const Instance& instance);

// Instance JSON (see README for the schema). Parsing throws
// std::invalid_argument on malformed input or unknown keys.
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);
Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

}  // namespace mvplc
