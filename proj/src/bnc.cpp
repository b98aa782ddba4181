#include "mvplc/bnc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <stdexcept>

#include "mvplc/separation.hpp"

namespace mvplc {

double default_time_limit() {
  if (const char* env = std::getenv("MVPLC_TIME_LIMIT")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0 && std::isfinite(v)) return v;
  }
  return kDefaultTimeLimit;
}

std::pair<std::vector<double>, std::vector<double>> node_bounds(const Model& model, const Node& node) {
  std::vector<double> lower = model.program.lower;
  std::vector<double> upper = model.program.upper;
  for (const BoundChange& c : node.changes) {
    auto& lo = lower[static_cast<std::size_t>(c.var)];
    auto& hi = upper[static_cast<std::size_t>(c.var)];
    lo = std::max(lo, c.lower);
    hi = std::min(hi, c.upper);
  }
  return {std::move(lower), std::move(upper)};
}

namespace {

std::optional<int> closest_to_half(std::span<const double> values, double tol) {
  std::optional<int> best;
  double best_distance = 0.0;
  for (std::size_t v = 0; v < values.size(); ++v) {
    const double frac = values[v] - std::floor(values[v]);
    if (frac <= tol || frac >= 1.0 - tol) continue;
    const double dist = std::abs(frac - 0.5);
    if (!best || dist < best_distance - 1e-12) {
      best = static_cast<int>(v);
      best_distance = dist;
    }
  }
  return best;
}

}  // namespace

std::optional<int> branching_variable(std::span<const double> values, double tol, int preferred) {
  if (preferred > 0) {
    const auto head = values.first(std::min(values.size(), static_cast<std::size_t>(preferred)));
    if (const auto v = closest_to_half(head, tol)) return v;
  }
  return closest_to_half(values, tol);
}

std::pair<Node, Node> branch(const Node& node, std::span<const double> values, double tol, int preferred) {
  const auto var = branching_variable(values, tol, preferred);
  if (!var) throw std::invalid_argument("branch called on an integral point");
  const double v = values[static_cast<std::size_t>(*var)];
  Node down = node;
  Node up = node;
  down.changes.push_back({*var, -lp::kInfinity, std::floor(v)});
  up.changes.push_back({*var, std::ceil(v), lp::kInfinity});
  for (Node* child : {&down, &up}) {
    child->parent = node.id;
    child->depth = node.depth + 1;
  }
  return {std::move(down), std::move(up)};
}

FeasibilityCheck check_feasible(const Model& model, std::span<const double> values, double tol) {
  FeasibilityCheck out;
  out.integral = !branching_variable(values, tol).has_value();
  if (!out.integral) return out;

  std::vector<double> rounded(values.begin(), values.end());
  for (double& v : rounded) v = std::round(v);
  for (const auto& row : model.program.rows) {
    if (row.violation(rounded) > 1e-9) out.static_row_violated = true;
  }
  const std::span<const double> x(rounded.data(), static_cast<std::size_t>(model.num_edges()));
  out.subtour_rows = separate_subtour(model.edges, x);
  out.path_rows = separate_path_elim(model.edges, x);

  const EdgeIndex& edges = model.edges;
  for (int j = edges.num_depots(); j < edges.num_vertices() && !out.cross_depot; ++j) {
    int first = -1;
    for (int i = 0; i < edges.num_depots(); ++i) {
      const int e = edges.index(i, j);
      if (x[static_cast<std::size_t>(e)] < 0.5) continue;
      if (first < 0) {
        first = e;
      } else {
        out.cross_depot = std::make_pair(model.x_var(first), model.x_var(e));
        break;
      }
    }
  }
  return out;
}

std::vector<std::vector<int>> extract_routes(const EdgeIndex& edges, std::span<const double> x) {
  std::vector<int> count(static_cast<std::size_t>(edges.size()));
  for (int e = 0; e < edges.size(); ++e) {
    const double r = std::round(x[static_cast<std::size_t>(e)]);
    if (r < 0.0) throw std::invalid_argument("negative edge value");
    count[static_cast<std::size_t>(e)] = static_cast<int>(r);
  }
  auto other = [&](int e, int v) {
    const EdgeId& id = edges.edge(e);
    return id.u == v ? id.v : id.u;
  };

  std::vector<std::vector<int>> routes(static_cast<std::size_t>(edges.num_depots()));
  for (int depot = 0; depot < edges.num_depots(); ++depot) {
    auto& route = routes[static_cast<std::size_t>(depot)];
    for (;;) {
      // Start each cycle towards the lowest-numbered neighbour.
      int start_edge = -1;
      for (int e : edges.incident(depot)) {
        if (count[static_cast<std::size_t>(e)] > 0 && (start_edge < 0 || other(e, depot) < other(start_edge, depot))) start_edge = e;
      }
      if (start_edge < 0) break;
      if (route.empty()) route.push_back(depot);
      int cur = depot;
      int e = start_edge;
      for (;;) {
        --count[static_cast<std::size_t>(e)];
        cur = other(e, cur);
        route.push_back(cur);
        if (cur == depot) break;
        e = -1;
        for (int f : edges.incident(cur)) {
          if (count[static_cast<std::size_t>(f)] > 0) {
            e = f;
            break;
          }
        }
        if (e < 0) throw std::invalid_argument("route walk stuck at vertex " + std::to_string(cur));
        if (edges.is_depot(other(e, cur)) && other(e, cur) != depot) {
          throw std::invalid_argument("route connects two depots");
        }
      }
    }
  }
  for (int e = 0; e < edges.size(); ++e) {
    if (count[static_cast<std::size_t>(e)] != 0) throw std::invalid_argument("edges not reachable from any depot");
  }
  return routes;
}

std::vector<double> routes_to_edges(const EdgeIndex& edges, const std::vector<std::vector<int>>& routes) {
  std::vector<double> x(static_cast<std::size_t>(edges.size()), 0.0);
  for (const auto& r : routes) {
    for (std::size_t t = 0; t + 1 < r.size(); ++t) x[static_cast<std::size_t>(edges.index(r[t], r[t + 1]))] += 1.0;
  }
  return x;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kLimit:
      return "limit";
    case SolveStatus::kInfeasible:
      return "infeasible";
  }
  return "infeasible";
}

std::optional<SolveStatus> parse_status(const std::string& text) {
  for (SolveStatus s : {SolveStatus::kOptimal, SolveStatus::kLimit, SolveStatus::kInfeasible}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

double solution_cost(const Instance& instance, const std::vector<std::vector<int>>& routes,
                     std::span<const int> landmarks) {
  double total = 0.0;
  for (const auto& r : routes) {
    for (std::size_t t = 0; t + 1 < r.size(); ++t) total += edge_cost(instance, EdgeId::between(r[t], r[t + 1]));
  }
  return total + instance.lm_cost * static_cast<double>(landmarks.size());
}

std::vector<std::string> check_solution(const Instance& instance, const Solution& solution, Localization localization) {
  std::vector<std::string> problems;
  const int p = instance.num_depots();
  if (static_cast<int>(solution.routes.size()) != p) {
    problems.push_back("expected " + std::to_string(p) + " routes, got " + std::to_string(solution.routes.size()));
    return problems;
  }
  std::vector<int> visits(static_cast<std::size_t>(instance.num_vertices()), 0);
  const EdgeIndex edges(instance);
  std::vector<double> x(static_cast<std::size_t>(edges.size()), 0.0);
  for (int i = 0; i < p; ++i) {
    const auto& r = solution.routes[static_cast<std::size_t>(i)];
    if (r.empty()) continue;
    if (r.size() < 3 || r.front() != i || r.back() != i) {
      problems.push_back("route " + std::to_string(i) + " does not start and end at its depot");
      continue;
    }
    for (std::size_t t = 0; t < r.size(); ++t) {
      const int v = r[t];
      if (v < 0 || v >= instance.num_vertices()) {
        problems.push_back("route " + std::to_string(i) + " has out-of-range vertex " + std::to_string(v));
        break;
      }
      if (instance.is_depot(v) && v != i) problems.push_back("route " + std::to_string(i) + " visits depot " + std::to_string(v));
      if (!instance.is_depot(v)) ++visits[static_cast<std::size_t>(v)];
      if (t + 1 < r.size()) {
        const int e = edges.find(v, r[t + 1]);
        if (e < 0) {
          problems.push_back("route " + std::to_string(i) + " uses non-edge " + std::to_string(v) + "-" + std::to_string(r[t + 1]));
        } else {
          x[static_cast<std::size_t>(e)] += 1.0;
        }
      }
    }
  }
  for (int j = p; j < instance.num_vertices(); ++j) {
    if (visits[static_cast<std::size_t>(j)] != 1) {
      problems.push_back("target " + std::to_string(j) + " visited " + std::to_string(visits[static_cast<std::size_t>(j)]) + " times");
    }
  }
  std::vector<char> placed(static_cast<std::size_t>(instance.num_landmarks()), 0);
  for (int k : solution.landmarks) {
    if (k < 0 || k >= instance.num_landmarks()) {
      problems.push_back("landmark index " + std::to_string(k) + " out of range");
    } else {
      placed[static_cast<std::size_t>(k)] = 1;
    }
  }
  for (int e = 0; e < edges.size(); ++e) {
    const double xe = x[static_cast<std::size_t>(e)];
    if (xe == 0.0) continue;
    const EdgeId& id = edges.edge(e);
    if (xe > (edges.is_depot(id.u) ? 2.0 : 1.0)) problems.push_back("edge " + std::to_string(id.u) + "-" + std::to_string(id.v) + " used too often");
    int covering = 0;
    for (int k = 0; k < instance.num_landmarks(); ++k) {
      if (placed[static_cast<std::size_t>(k)] &&
          covers_segment(instance.landmark_candidates[static_cast<std::size_t>(k)], instance.vertex(id.u), instance.vertex(id.v), instance.sensing_range)) {
        ++covering;
      }
    }
    const double need = localization == Localization::kLiteral ? 2.0 * xe : 2.0;
    if (covering < need) {
      problems.push_back("edge " + std::to_string(id.u) + "-" + std::to_string(id.v) + " covered by " + std::to_string(covering) + " landmarks");
    }
  }
  return problems;
}

namespace {

struct QueueEntry {
  double bound;
  std::int64_t id;
  std::size_t slot;
};

struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class BranchAndCut {
 public:
  BranchAndCut(const Instance& instance, const SolverConfig& config, SearchLog* log)
      : config_(config),
        log_(log),
        model_(build_model(instance, build_coverage_sets(instance), config.model)),
        solver_(model_.program),
        start_(std::chrono::steady_clock::now()) {}

  Solution run() {
    Node root;
    push(std::move(root), -lp::kInfinity);
    bool stopped = false;
    while (!queue_.empty()) {
      if (out_of_budget()) {
        stopped = true;
        break;
      }
      const QueueEntry top = queue_.top();
      queue_.pop();
      Node node = std::move(nodes_[top.slot]);
      nodes_[top.slot] = Node{};
      if (prunable(top.bound)) continue;
      if (!process(node)) {
        stopped = true;
        break;
      }
    }
    Solution sol;
    sol.n_depots = model_.instance.num_depots();
    sol.n_vertices = model_.instance.num_vertices();
    sol.stats = stats_;
    sol.stats.time_s = elapsed();
    sol.has_incumbent = has_incumbent_;
    if (has_incumbent_) {
      sol.objective = incumbent_objective_;
      sol.routes = incumbent_routes_;
      sol.landmarks = incumbent_landmarks_;
    }
    if (stopped) {
      sol.status = SolveStatus::kLimit;
    } else {
      sol.status = has_incumbent_ ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
    }
    return sol;
  }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  bool out_of_budget() const {
    return elapsed() >= config_.time_limit_s || stats_.nodes >= config_.node_limit;
  }

  bool prunable(double bound) const {
    return has_incumbent_ && bound >= incumbent_objective_ - kObjectiveTolerance;
  }

  void push(Node node, double bound) {
    node.id = next_id_++;
    node.parent_bound = bound;
    const std::size_t slot = nodes_.size();
    queue_.push({bound, node.id, slot});
    nodes_.push_back(std::move(node));
  }

  void add_cuts(const std::vector<lp::ConstraintRow>& subtour, const std::vector<lp::ConstraintRow>& path) {
    stats_.subtour_cuts += static_cast<std::int64_t>(subtour.size());
    stats_.path_cuts += static_cast<std::int64_t>(path.size());
    std::vector<lp::ConstraintRow> rows = subtour;
    rows.insert(rows.end(), path.begin(), path.end());
    solver_.add_rows(rows);
  }

  void record(const Node& node, double bound) {
    if (log_) log_->nodes.push_back({node.id, node.parent, bound});
    if (log_ && node.id == 0) log_->root_bound = bound;
  }

  // Solves one node with its cut loop. Returns false when the budget ran out
  // before the node finished.
  bool process(const Node& node) {
    ++stats_.nodes;
    const auto [lower, upper] = node_bounds(model_, node);
    solver_.set_bounds(lower, upper);
    int rounds = 0;
    for (;;) {
      const lp::LpResult res = solver_.solve();
      if (res.status == lp::LpStatus::kInfeasible) {
        record(node, lp::kInfinity);
        return true;
      }
      if (res.status == lp::LpStatus::kUnbounded) throw std::logic_error("relaxation unbounded");
      const double bound = res.objective;
      if (prunable(bound)) {
        record(node, bound);
        return true;
      }
      const std::span<const double> values(res.values);
      const std::span<const double> x = values.first(static_cast<std::size_t>(model_.num_edges()));
      const bool fractional = branching_variable(values, config_.integrality_tolerance).has_value();

      if (fractional) {
        if (rounds < config_.max_cut_rounds) {
          auto subtour = separate_subtour(model_.edges, x);
          auto path = separate_path_elim(model_.edges, x);
          if (!subtour.empty() || !path.empty()) {
            add_cuts(subtour, path);
            ++rounds;
            if (out_of_budget()) return false;
            continue;
          }
        }
        record(node, bound);
        const int preferred = config_.branch_rule == BranchRule::kRoutesFirst ? model_.num_edges() : 0;
        auto [down, up] = branch(node, values, config_.integrality_tolerance, preferred);
        push(std::move(down), bound);
        push(std::move(up), bound);
        return true;
      }

      const FeasibilityCheck check = check_feasible(model_, values, config_.integrality_tolerance);
      if (!check.subtour_rows.empty() || !check.path_rows.empty()) {
        add_cuts(check.subtour_rows, check.path_rows);
        if (out_of_budget()) return false;
        continue;
      }
      record(node, bound);
      if (check.cross_depot) {
        // At most one depot can be adjacent to a target in any feasible
        // solution, so one of the two edges must be unused.
        for (int var : {check.cross_depot->first, check.cross_depot->second}) {
          if (lower[static_cast<std::size_t>(var)] > 0.0) continue;
          Node child = node;
          child.parent = node.id;
          child.depth = node.depth + 1;
          child.changes.push_back({var, -lp::kInfinity, 0.0});
          push(std::move(child), bound);
        }
        return true;
      }
      if (check.static_row_violated) return true;
      accept(values);
      return true;
    }
  }

  void accept(std::span<const double> values) {
    std::vector<double> rounded(values.begin(), values.end());
    for (double& v : rounded) v = std::round(v);
    const std::span<const double> x(rounded.data(), static_cast<std::size_t>(model_.num_edges()));
    std::vector<int> landmarks;
    for (int k = 0; k < model_.num_landmarks(); ++k) {
      if (rounded[static_cast<std::size_t>(model_.d_var(k))] > 0.5) landmarks.push_back(k);
    }
    double objective = 0.0;
    for (int e = 0; e < model_.num_edges(); ++e) objective += model_.program.objective[static_cast<std::size_t>(e)] * x[static_cast<std::size_t>(e)];
    objective += model_.instance.lm_cost * static_cast<double>(landmarks.size());
    if (has_incumbent_ && objective >= incumbent_objective_) return;
    has_incumbent_ = true;
    incumbent_objective_ = objective;
    incumbent_routes_ = extract_routes(model_.edges, x);
    incumbent_landmarks_ = std::move(landmarks);
    if (log_) log_->incumbents.push_back(objective);
  }

  SolverConfig config_;
  SearchLog* log_;
  Model model_;
  lp::SimplexSolver solver_;
  std::chrono::steady_clock::time_point start_;

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> queue_;
  std::vector<Node> nodes_;
  std::int64_t next_id_ = 0;

  SolveStats stats_;
  bool has_incumbent_ = false;
  double incumbent_objective_ = 0.0;
  std::vector<std::vector<int>> incumbent_routes_;
  std::vector<int> incumbent_landmarks_;
};

}  // namespace

Solution solve(const Instance& instance, const SolverConfig& config, SearchLog* log) {
  if (!(config.time_limit_s > 0.0) || config.node_limit <= 0 || config.max_cut_rounds < 0) {
    throw std::invalid_argument("solver limits must be positive");
  }
  if (const auto problems = validate_instance(instance); !problems.empty()) {
    throw std::invalid_argument("invalid instance: " + problems.front().field + ": " + problems.front().rule);
  }
  BranchAndCut bnc(instance, config, log);
  return bnc.run();
}

}  // namespace mvplc
