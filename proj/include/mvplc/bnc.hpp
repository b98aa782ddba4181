#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mvplc/instance.hpp"
#include "mvplc/lp.hpp"
#include "mvplc/model.hpp"

namespace mvplc {

inline constexpr double kIntegralityTolerance = 1e-6;
inline constexpr double kObjectiveTolerance = 1e-6;

// Default time limit in seconds when neither the caller nor the
// MVPLC_TIME_LIMIT environment variable sets one.
inline constexpr double kDefaultTimeLimit = 600.0;

enum class BranchRule {
  kRoutesFirst,    // edge variables before landmark variables
  kClosestToHalf,  // any variable, fractional part closest to 0.5
};

struct SolverConfig {
  double time_limit_s = kDefaultTimeLimit;
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  double integrality_tolerance = kIntegralityTolerance;
  double cut_tolerance = 1e-6;
  // Separation rounds on a fractional point before branching anyway.
  int max_cut_rounds = 200;
  BranchRule branch_rule = BranchRule::kRoutesFirst;
  ModelOptions model;
};

// Time limit from MVPLC_TIME_LIMIT if set to a positive number, otherwise
// kDefaultTimeLimit.
double default_time_limit();

struct BoundChange {
  int var = -1;
  double lower = 0.0;
  double upper = 0.0;
};

// A subproblem: the root bounds tightened by `changes`, applied in order.
struct Node {
  std::vector<BoundChange> changes;
  double parent_bound = -lp::kInfinity;
  std::int64_t id = 0;
  std::int64_t parent = -1;
  int depth = 0;
};

// Root bounds of `model` with the node's changes applied.
std::pair<std::vector<double>, std::vector<double>> node_bounds(const Model& model, const Node& node);

// Index of the variable whose fractional part is closest to 0.5, ties to the
// lowest index; nullopt when every value is within `tol` of an integer. When
// `preferred` > 0 and one of the first `preferred` variables is fractional,
// only those are considered.
std::optional<int> branching_variable(std::span<const double> values, double tol = kIntegralityTolerance, int preferred = 0);

// Down child (upper = floor) first, up child (lower = ceil) second. Throws
// std::invalid_argument if no variable is fractional.
std::pair<Node, Node> branch(const Node& node, std::span<const double> values, double tol = kIntegralityTolerance,
                             int preferred = 0);

struct FeasibilityCheck {
  bool integral = false;
  std::vector<lp::ConstraintRow> subtour_rows;
  std::vector<lp::ConstraintRow> path_rows;
  // A target joined to two different depots by one edge each (the path
  // depot-target-depot). Holds the two x variables.
  std::optional<std::pair<int, int>> cross_depot;
  // A static model row violated after rounding.
  bool static_row_violated = false;

  bool feasible() const {
    return integral && subtour_rows.empty() && path_rows.empty() && !cross_depot && !static_row_violated;
  }
};

// Feasibility of an LP point for the integer program. Separation runs on the
// rounded point.
FeasibilityCheck check_feasible(const Model& model, std::span<const double> values, double tol = kIntegralityTolerance);

// One closed walk per depot, starting and ending at the depot. A depot with
// several cycles gets them concatenated; an unused depot gets an empty route.
// `x` holds integer edge values. Throws std::invalid_argument if some edge is
// not reachable from a depot or a vertex has odd degree.
std::vector<std::vector<int>> extract_routes(const EdgeIndex& edges, std::span<const double> x);

// Edge vector of a list of routes (inverse of extract_routes).
std::vector<double> routes_to_edges(const EdgeIndex& edges, const std::vector<std::vector<int>>& routes);

enum class SolveStatus { kOptimal, kLimit, kInfeasible };

std::string to_string(SolveStatus status);
std::optional<SolveStatus> parse_status(const std::string& text);

struct SolveStats {
  std::int64_t subtour_cuts = 0;
  std::int64_t path_cuts = 0;
  std::int64_t nodes = 0;
  double time_s = 0.0;
};

struct Solution {
  SolveStatus status = SolveStatus::kInfeasible;
  bool has_incumbent = false;
  double objective = 0.0;
  std::vector<std::vector<int>> routes;
  std::vector<int> landmarks;
  SolveStats stats;
  int n_depots = 0;
  int n_vertices = 0;
};

// Optional record of the search for testing.
struct SearchLog {
  struct NodeRecord {
    std::int64_t id = 0;
    std::int64_t parent = -1;
    double bound = 0.0;  // final LP bound of the node, +inf if infeasible
  };
  std::vector<NodeRecord> nodes;
  std::vector<double> incumbents;  // objective of each accepted incumbent
  double root_bound = 0.0;
};

Solution solve(const Instance& instance, const SolverConfig& config = {}, SearchLog* log = nullptr);

// Objective of routes plus placed landmarks, computed from coordinates.
double solution_cost(const Instance& instance, const std::vector<std::vector<int>>& routes,
                     std::span<const int> landmarks);

// Problems with a solution relative to its instance: targets not visited
// exactly once, routes not starting and ending at their depot, and traversed
// edges with fewer placed covering landmarks than required.
std::vector<std::string> check_solution(const Instance& instance, const Solution& solution,
                                        Localization localization = Localization::kLiteral);

}  // namespace mvplc
