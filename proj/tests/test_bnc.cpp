#include <algorithm>
#include <cmath>
#include <numeric>
#include <map>
#include <stdexcept>

#include "doctest.h"
#include "mvplc/bnc.hpp"
#include "mvplc/random.hpp"
#include "mvplc/separation.hpp"
#include "mvplc/solution_io.hpp"
#include "oracles/brute_force.hpp"
#include "oracles/separation_oracles.hpp"

using namespace mvplc;

namespace {

Instance random_instance(int depots, int targets, int landmarks, std::int64_t seed, double range = 35.0) {
  GeneratorParams params{.n_depots = depots, .n_vertices = depots + targets, .sensing_range = range, .seed = seed};
  Instance inst = generate_instance(params);
  Rng rng(static_cast<std::uint64_t>(seed) * 7919 + 1);
  inst.landmark_candidates.clear();
  // Candidates near the vertices keep most instances feasible at small sizes.
  for (int k = 0; k < landmarks; ++k) {
    const Point v = inst.vertex(static_cast<int>(rng.below(static_cast<std::uint64_t>(inst.num_vertices()))));
    inst.landmark_candidates.push_back({v.x + rng.uniform(-20.0, 20.0), v.y + rng.uniform(-20.0, 20.0)});
  }
  return inst;
}

std::vector<double> encode(const EdgeIndex& edges, const oracle::Routing& routing) {
  std::vector<double> x(static_cast<std::size_t>(edges.size()), 0.0);
  for (const auto& r : routing) {
    int prev = r.depot;
    for (int v : r.targets) {
      x[static_cast<std::size_t>(edges.index(prev, v))] += 1.0;
      prev = v;
    }
    x[static_cast<std::size_t>(edges.index(prev, r.depot))] += 1.0;
  }
  return x;
}

}  // namespace

TEST_CASE("build_model counts and bounds") {
  Instance inst = random_instance(2, 3, 10, 1);
  const Model m = build_model(inst, build_coverage_sets(inst));
  CHECK(m.num_edges() == 9);
  CHECK(m.num_variables() == 19);
  CHECK(m.program.num_rows() == 14);
  for (int e = 0; e < m.num_edges(); ++e) {
    CHECK(m.program.upper[static_cast<std::size_t>(e)] == (m.edges.is_depot(m.edges.edge(e).u) ? 2.0 : 1.0));
  }
  const std::vector<double> zero(static_cast<std::size_t>(m.num_variables()), 0.0);
  CHECK(model_objective(m, zero) == 0.0);

  const Model no_depot_rows = build_model(inst, build_coverage_sets(inst), {.depot_degree_rows = false});
  CHECK(no_depot_rows.program.num_rows() == 12);

  const Model two = build_model(inst, build_coverage_sets(inst), {.localization = Localization::kTwoPerEdge});
  CHECK(two.num_variables() == 19 + 6);
  CHECK(two.aux_offset == 19);
  CHECK(two.program.num_rows() == 3 + 9 + 6 + 2);
}

TEST_CASE("instance without landmarks is infeasible") {
  Instance inst = random_instance(2, 3, 0, 2);
  const Solution s = solve(inst);
  CHECK(s.status == SolveStatus::kInfeasible);
  CHECK_FALSE(s.has_incumbent);
}

TEST_CASE("single return trip") {
  Instance inst;
  inst.depots = {{0.0, 0.0}};
  inst.targets = {{10.0, 0.0}};
  inst.landmark_candidates = {{5.0, 1.0}, {5.0, -1.0}, {3.0, 0.0}, {7.0, 0.0}};
  const Solution s = solve(inst);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(24.0));
  REQUIRE(s.routes.size() == 1);
  CHECK(s.routes[0] == std::vector<int>{0, 1, 0});
  CHECK(s.landmarks.size() == 4);
  CHECK(check_solution(inst, s).empty());

  // Two landmarks suffice when a traversed edge needs only two.
  SolverConfig cfg;
  cfg.model.localization = Localization::kTwoPerEdge;
  const Solution t = solve(inst, cfg);
  REQUIRE(t.status == SolveStatus::kOptimal);
  CHECK(t.objective == doctest::Approx(22.0));
  CHECK(check_solution(inst, t, Localization::kTwoPerEdge).empty());
}

TEST_CASE("two depots with one nearby target each") {
  Instance inst;
  inst.depots = {{0.0, 0.0}, {100.0, 100.0}};
  inst.targets = {{10.0, 0.0}, {90.0, 100.0}};
  for (double dx : {-2.0, 0.0, 2.0, 4.0, 6.0}) {
    inst.landmark_candidates.push_back({5.0 + dx, 1.0});
    inst.landmark_candidates.push_back({95.0 + dx, 99.0});
  }
  const Solution s = solve(inst);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.routes[0] == std::vector<int>{0, 2, 0});
  CHECK(s.routes[1] == std::vector<int>{1, 3, 1});
  CHECK(s.landmarks.size() == 8);
  const auto oracle = oracle::brute_force_optimum(inst);
  REQUIRE(oracle);
  CHECK(std::abs(s.objective - oracle->objective) <= 1e-6);
  CHECK(s.objective == doctest::Approx(40.0 + 8.0));
}

TEST_CASE("branch selection") {
  Node root;
  SUBCASE("half-integral edge") {
    const std::vector<double> v = {1.0, 0.5, 0.0};
    const auto [down, up] = branch(root, v);
    REQUIRE(down.changes.size() == 1);
    CHECK(down.changes[0].var == 1);
    CHECK(down.changes[0].upper == 0.0);
    CHECK(up.changes[0].lower == 1.0);
    CHECK(down.parent == root.id);
    CHECK(up.depth == 1);
  }
  SUBCASE("depot edge at 1.5") {
    const std::vector<double> v = {1.5, 0.0};
    const auto [down, up] = branch(root, v);
    CHECK(down.changes[0].upper == 1.0);
    CHECK(up.changes[0].lower == 2.0);
  }
  SUBCASE("closest to one half wins") {
    const std::vector<double> v = {0.4, 0.49, 1.0};
    CHECK(branching_variable(v) == 1);
    const std::vector<double> tie = {0.3, 0.7};
    CHECK(branching_variable(tie) == 0);
  }
  SUBCASE("preferred variables first") {
    const std::vector<double> v = {0.1, 1.0, 0.5, 0.45};
    CHECK(branching_variable(v, kIntegralityTolerance, 2) == 0);
    CHECK(branching_variable(v) == 2);
    const std::vector<double> head_integral = {1.0, 0.0, 0.3, 0.5};
    CHECK(branching_variable(head_integral, kIntegralityTolerance, 2) == 3);
    const auto [down, up] = branch(root, v, kIntegralityTolerance, 2);
    CHECK(down.changes[0].var == 0);
  }
  SUBCASE("integral point") {
    const std::vector<double> v = {1.0, 2.0, 1e-9};
    CHECK_FALSE(branching_variable(v).has_value());
    CHECK_THROWS_AS(branch(root, v), std::invalid_argument);
  }
  SUBCASE("bounds only tighten") {
    Instance inst = random_instance(1, 3, 5, 4);
    const Model m = build_model(inst, build_coverage_sets(inst));
    Node n;
    n.changes = {{0, -lp::kInfinity, 1.0}, {0, 1.0, lp::kInfinity}, {0, -lp::kInfinity, 5.0}};
    const auto [lo, hi] = node_bounds(m, n);
    CHECK(lo[0] == 1.0);
    CHECK(hi[0] == 1.0);
  }
}

TEST_CASE("check_feasible") {
  Instance inst = random_instance(2, 5, 10, 5, 1000.0);
  const Model m = build_model(inst, build_coverage_sets(inst));
  std::vector<double> values(static_cast<std::size_t>(m.num_variables()), 1.0);
  auto set_routes = [&](const std::vector<std::vector<int>>& walks) {
    std::fill(values.begin(), values.end(), 1.0);
    std::fill(values.begin(), values.begin() + m.num_edges(), 0.0);
    for (const auto& w : walks) {
      for (std::size_t t = 0; t + 1 < w.size(); ++t) values[static_cast<std::size_t>(m.edges.index(w[t], w[t + 1]))] += 1.0;
    }
  };

  set_routes({{0, 2, 3, 0}, {1, 4, 5, 6, 1}});
  CHECK(check_feasible(m, values).feasible());

  values[0] = 0.5;
  CHECK_FALSE(check_feasible(m, values).integral);
  CHECK_FALSE(check_feasible(m, values).feasible());

  set_routes({{0, 2, 0}, {1, 3, 1}, {4, 5, 6, 4}});
  const auto sub = check_feasible(m, values);
  CHECK_FALSE(sub.feasible());
  CHECK(sub.subtour_rows.size() == 1);

  set_routes({{0, 2, 3, 1}, {1, 4, 5, 6, 0}});
  const auto path = check_feasible(m, values);
  CHECK_FALSE(path.feasible());
  CHECK_FALSE(path.path_rows.empty());

  set_routes({{0, 2, 1}, {1, 3, 4, 5, 6, 0}});
  const auto cross = check_feasible(m, values);
  CHECK_FALSE(cross.feasible());
  REQUIRE(cross.cross_depot.has_value());
  CHECK(cross.cross_depot->first == m.edges.index(0, 2));
  CHECK(cross.cross_depot->second == m.edges.index(1, 2));
}

TEST_CASE("extract_routes") {
  const EdgeIndex edges(2, 3);
  std::vector<double> x(static_cast<std::size_t>(edges.size()), 0.0);
  x[static_cast<std::size_t>(edges.index(0, 2))] = 2.0;
  x[static_cast<std::size_t>(edges.index(1, 3))] = 1.0;
  x[static_cast<std::size_t>(edges.index(3, 4))] = 1.0;
  x[static_cast<std::size_t>(edges.index(1, 4))] = 1.0;
  const auto routes = extract_routes(edges, x);
  REQUIRE(routes.size() == 2);
  CHECK(routes[0] == std::vector<int>{0, 2, 0});
  CHECK(routes[1] == std::vector<int>{1, 3, 4, 1});

  // Unused depot.
  std::vector<double> y(static_cast<std::size_t>(edges.size()), 0.0);
  for (auto [a, b] : {std::pair{0, 2}, {2, 3}, {3, 4}, {4, 0}}) y[static_cast<std::size_t>(edges.index(a, b))] = 1.0;
  const auto single = extract_routes(edges, y);
  CHECK(single[0] == std::vector<int>{0, 2, 3, 4, 0});
  CHECK(single[1].empty());

  // Target-only cycle is not reachable.
  std::vector<double> z(static_cast<std::size_t>(edges.size()), 0.0);
  for (auto [a, b] : {std::pair{2, 3}, {3, 4}, {2, 4}}) z[static_cast<std::size_t>(edges.index(a, b))] = 1.0;
  CHECK_THROWS_AS(extract_routes(edges, z), std::invalid_argument);
}

TEST_CASE("extracted routes re-encode to the same edge vector") {
  for (bool one_per_depot : {true, false}) {
    const int p = 2;
    const int q = 4;
    const EdgeIndex edges(p, q);
    for (const auto& routing : oracle::enumerate_routings(p, q, one_per_depot)) {
      const auto x = encode(edges, routing);
      const auto routes = extract_routes(edges, x);
      CHECK(routes_to_edges(edges, routes) == x);
    }
  }
}

TEST_CASE("separated rows are valid for every feasible routing") {
  Rng rng(12);
  const int p = 2;
  const int q = 5;
  const EdgeIndex edges(p, q);
  std::vector<std::vector<double>> feasible;
  for (const auto& r : oracle::enumerate_routings(p, q, false)) feasible.push_back(encode(edges, r));
  int rows_checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(edges.size()), 0.0);
    const int parts = 1 + static_cast<int>(rng.below(2));
    for (int k = 0; k < parts; ++k) {
      const auto cfg = oracle::random_route_config(edges, rng, {.subtour_probability = 0.3, .cross_path_probability = 0.5});
      for (std::size_t e = 0; e < x.size(); ++e) x[e] += cfg[e] / parts;
    }
    auto rows = separate_subtour(edges, x);
    const auto path = separate_path_elim(edges, x);
    rows.insert(rows.end(), path.begin(), path.end());
    for (const auto& row : rows) {
      ++rows_checked;
      for (const auto& f : feasible) CHECK(row.violation(f) <= 1e-9);
    }
  }
  CHECK(rows_checked > 50);
}

TEST_CASE("branch-and-cut matches the brute-force optimum") {
  int compared = 0;
  for (std::int64_t seed = 100; seed < 130; ++seed) {
    const int p = 1 + static_cast<int>(seed % 3);
    const int q = 1 + static_cast<int>((seed / 3) % 5);
    const Instance inst = random_instance(p, q, 16, seed, 60.0);
    const auto oracle = oracle::brute_force_optimum(inst);
    const Solution s = solve(inst);
    if (!oracle) {
      CHECK(s.status == SolveStatus::kInfeasible);
      continue;
    }
    ++compared;
    REQUIRE(s.status == SolveStatus::kOptimal);
    CHECK(std::abs(s.objective - oracle->objective) <= 1e-6);
    CHECK(check_solution(inst, s).empty());
    SolverConfig half;
    half.branch_rule = BranchRule::kClosestToHalf;
    const Solution h = solve(inst, half);
    REQUIRE(h.status == SolveStatus::kOptimal);
    CHECK(std::abs(h.objective - oracle->objective) <= 1e-6);
    CHECK(std::abs(solution_cost(inst, s.routes, s.landmarks) - s.objective) <= 1e-9);
  }
  CHECK(compared >= 15);
}

TEST_CASE("brute-force agreement without depot-degree rows and with two landmarks per edge") {
  int compared = 0;
  for (std::int64_t seed = 200; seed < 216; ++seed) {
    const Instance inst = random_instance(2, 2 + static_cast<int>(seed % 3), 16, seed, 60.0);
    SolverConfig free_depots;
    free_depots.model.depot_degree_rows = false;
    const auto a = oracle::brute_force_optimum(inst, {.one_route_per_depot = false});
    const Solution sa = solve(inst, free_depots);
    if (a) {
      REQUIRE(sa.status == SolveStatus::kOptimal);
      CHECK(std::abs(sa.objective - a->objective) <= 1e-6);
      CHECK(check_solution(inst, sa).empty());
      ++compared;
    } else {
      CHECK(sa.status == SolveStatus::kInfeasible);
    }

    SolverConfig prose;
    prose.model.localization = Localization::kTwoPerEdge;
    const auto b = oracle::brute_force_optimum(inst, {.two_per_edge = true});
    const Solution sb = solve(inst, prose);
    if (b) {
      REQUIRE(sb.status == SolveStatus::kOptimal);
      CHECK(std::abs(sb.objective - b->objective) <= 1e-6);
      CHECK(check_solution(inst, sb, Localization::kTwoPerEdge).empty());
    } else {
      CHECK(sb.status == SolveStatus::kInfeasible);
    }
  }
  CHECK(compared >= 8);
}

TEST_CASE("optimum is invariant under target relabeling") {
  Rng rng(5);
  for (std::int64_t seed = 300; seed < 306; ++seed) {
    const Instance inst = generate_instance({.n_depots = 2, .n_vertices = 10, .seed = seed});
    const Solution a = solve(inst);
    Instance perm = inst;
    for (std::size_t i = perm.targets.size() - 1; i > 0; --i) std::swap(perm.targets[i], perm.targets[rng.below(i + 1)]);
    const Solution b = solve(perm);
    REQUIRE(a.status == b.status);
    if (a.status == SolveStatus::kOptimal) CHECK(std::abs(a.objective - b.objective) <= 1e-6);
  }
}

TEST_CASE("free landmarks leave the routing unconstrained") {
  int compared = 0;
  for (std::int64_t seed = 400; seed < 410; ++seed) {
    Instance inst = generate_instance({.n_depots = 2, .n_vertices = 8, .lm_factor = 4, .sensing_range = 80.0, .seed = seed});
    inst.lm_cost = 0.0;
    const CoverageSets cov = build_coverage_sets(inst);
    bool rich = true;
    for (int e = 0; e < cov.size(); ++e) rich = rich && cov[e].size() >= 4;
    if (!rich) continue;
    ++compared;
    const Solution a = solve(inst);
    Instance full = inst;
    full.sensing_range = 1e4;
    const Solution b = solve(full);
    REQUIRE(a.status == SolveStatus::kOptimal);
    REQUIRE(b.status == SolveStatus::kOptimal);
    CHECK(std::abs(a.objective - b.objective) <= 1e-6);
  }
  CHECK(compared >= 3);
}

TEST_CASE("search log: bounds monotone along paths, incumbents decreasing") {
  for (std::int64_t seed = 500; seed < 504; ++seed) {
    const Instance inst = generate_instance({.n_depots = 2, .n_vertices = 14, .seed = seed});
    SearchLog log;
    const Solution s = solve(inst, {}, &log);
    REQUIRE(!log.nodes.empty());
    std::map<std::int64_t, double> bound_of;
    for (const auto& n : log.nodes) bound_of[n.id] = n.bound;
    for (const auto& n : log.nodes) {
      if (n.parent >= 0) CHECK(n.bound >= bound_of.at(n.parent) - 1e-6);
    }
    for (std::size_t i = 1; i < log.incumbents.size(); ++i) CHECK(log.incumbents[i] < log.incumbents[i - 1]);
    if (s.status == SolveStatus::kOptimal) {
      CHECK(log.incumbents.back() == s.objective);
      CHECK(s.objective >= log.root_bound - 1e-6);
    }
    CHECK(s.stats.nodes == static_cast<std::int64_t>(log.nodes.size()));
  }
}

TEST_CASE("limits") {
  const Instance inst = generate_instance({.n_depots = 2, .n_vertices = 16, .seed = 77});
  SolverConfig cfg;
  cfg.node_limit = 1;
  const Solution s = solve(inst, cfg);
  CHECK((s.status == SolveStatus::kLimit || s.status == SolveStatus::kOptimal));
  CHECK(s.stats.nodes <= 1);
  cfg.node_limit = 0;
  CHECK_THROWS_AS(solve(inst, cfg), std::invalid_argument);
}

TEST_CASE("solution JSON round trip") {
  const Instance inst = generate_instance({.n_depots = 2, .n_vertices = 8, .seed = 3});
  const Solution s = solve(inst);
  const Solution back = solution_from_json(solution_to_json(s));
  CHECK(back.status == s.status);
  CHECK(back.has_incumbent == s.has_incumbent);
  CHECK(back.objective == s.objective);
  CHECK(back.routes == s.routes);
  CHECK(back.landmarks == s.landmarks);
  CHECK(back.stats.nodes == s.stats.nodes);
  CHECK(back.stats.time_s == s.stats.time_s);
  CHECK(back.n_depots == 2);
  CHECK(back.n_vertices == 8);
  CHECK(solution_to_json(back) == solution_to_json(s));

  Solution none;
  const Solution nb = solution_from_json(solution_to_json(none));
  CHECK_FALSE(nb.has_incumbent);
  CHECK(nb.status == SolveStatus::kInfeasible);
  CHECK_THROWS_AS(solution_from_json(R"({"status": "maybe"})"), std::invalid_argument);
  CHECK_THROWS_AS(solution_from_json("[]"), std::invalid_argument);
}
