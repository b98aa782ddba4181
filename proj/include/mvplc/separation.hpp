#pragma once

#include <span>
#include <vector>

#include "mvplc/instance.hpp"
#include "mvplc/lp.hpp"

namespace mvplc {

// Minimum violation for a separated row to be reported.
inline constexpr double kCutTolerance = 1e-6;
// Support-graph edges carry x_e > kSupportTolerance.
inline constexpr double kSupportTolerance = 1e-9;
// Target-target edges within this distance of 1 are shrunk.
inline constexpr double kUnitTolerance = 1e-9;

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

// Undirected weighted graph. Edge endpoints are positions into `vertices`,
// which holds the original vertex ids.
struct SupportGraph {
  std::vector<int> vertices;
  std::vector<WeightedEdge> edges;

  int size() const { return static_cast<int>(vertices.size()); }
};

// Support graph on the targets only, with edges {e : x_e > 0} between targets.
SupportGraph target_support_graph(const EdgeIndex& edges, std::span<const double> x);
// Support graph on all vertices (depots and targets).
SupportGraph full_support_graph(const EdgeIndex& edges, std::span<const double> x);

// Partition of vertex positions by positive-weight connectivity, each
// component sorted, components ordered by their smallest member.
std::vector<std::vector<int>> connected_components(const SupportGraph& g);

struct Cut {
  std::vector<int> side;  // vertex positions on one shore
  double value = 0.0;
};

// Stoer-Wagner global minimum cut. Throws std::invalid_argument on graphs
// with fewer than two vertices or that are disconnected.
Cut global_min_cut(const SupportGraph& g);

// x(delta(S)) for a target subset S given as original vertex ids.
double cut_value(const EdgeIndex& edges, std::span<const double> x, std::span<const int> subset);
// The row x(delta(S)) >= 2 over edge variables.
lp::ConstraintRow subtour_row(const EdgeIndex& edges, std::span<const int> subset);

// Violated subtour elimination rows x(delta(S)) >= 2, S a set of at least two
// targets. Connected components of the target support graph are tried
// first; if none yields a violated row, the depots are merged into a single
// vertex and a global minimum cut gives the most violated set.
std::vector<lp::ConstraintRow> separate_subtour(const EdgeIndex& edges, std::span<const double> x);

// A maximal target path whose edges all have unit weight, contracted to one
// vertex. For a single target first == last. For a unit cycle is_cycle is
// set and first/last are meaningless.
struct ShrunkVertex {
  std::vector<int> path;  // original vertex ids in path order
  int first = -1;
  int last = -1;
  bool is_cycle = false;
};

struct ShrunkGraph {
  SupportGraph graph;               // contracted graph
  std::vector<ShrunkVertex> groups;  // groups[pos] for graph.vertices[pos]
};

// Contracts target-target edges of weight 1 until none remain. Depots are
// never merged. Each shrunk vertex's id in graph.vertices is its first
// path vertex.
ShrunkGraph shrink_support_graph(const SupportGraph& g, int num_depots);

struct PathViolation {
  int j = -1;
  int l = -1;
  std::vector<int> interior;      // S, empty for the two-target form
  std::vector<int> depot_subset;  // I'
  double lhs = 0.0;
  double rhs = 0.0;
};

// Left-hand side of the path elimination inequality for (j, l, S, I'):
// sum_{i in I'} x_ij + 2 x(gamma(S + {j, l})) + sum_{k not in I'} x_kl when S
// is nonempty, and sum_{i in I'} x_ij + 3 x_jl + sum_{k not in I'} x_kl
// otherwise.
double path_elimination_lhs(const EdgeIndex& edges, std::span<const double> x, const PathViolation& tuple);
// Right-hand side: 2|S| + 3, or 4 when S is empty.
double path_elimination_rhs(const PathViolation& tuple);
lp::ConstraintRow path_elimination_row(const EdgeIndex& edges, const PathViolation& tuple);

// Path violations found by shrinking unit target paths and, for each path
// with distinct extremes j and l, choosing the proper depot subset I' that
// maximizes the left-hand side.
std::vector<PathViolation> find_path_violations(const EdgeIndex& edges, std::span<const double> x);
std::vector<lp::ConstraintRow> separate_path_elim(const EdgeIndex& edges, std::span<const double> x);

}  // namespace mvplc
