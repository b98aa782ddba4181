#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

#include "mvplc/separation.hpp"

namespace mvplc {

namespace {

SupportGraph support_graph(const EdgeIndex& edges, std::span<const double> x, bool with_depots) {
  SupportGraph g;
  const int first = with_depots ? 0 : edges.num_depots();
  for (int v = first; v < edges.num_vertices(); ++v) g.vertices.push_back(v);
  for (int k = 0; k < edges.size(); ++k) {
    const EdgeId& e = edges.edge(k);
    const double w = x[static_cast<std::size_t>(k)];
    if (w <= kSupportTolerance) continue;
    if (!with_depots && edges.is_depot(e.u)) continue;
    g.edges.push_back({e.u - first, e.v - first, w});
  }
  return g;
}

std::vector<int> to_vertex_ids(const SupportGraph& g, std::span<const int> positions) {
  std::vector<int> out;
  out.reserve(positions.size());
  for (int p : positions) out.push_back(g.vertices[static_cast<std::size_t>(p)]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SupportGraph target_support_graph(const EdgeIndex& edges, std::span<const double> x) {
  return support_graph(edges, x, false);
}

SupportGraph full_support_graph(const EdgeIndex& edges, std::span<const double> x) {
  return support_graph(edges, x, true);
}

double cut_value(const EdgeIndex& edges, std::span<const double> x, std::span<const int> subset) {
  std::vector<char> in(static_cast<std::size_t>(edges.num_vertices()), 0);
  for (int v : subset) in[static_cast<std::size_t>(v)] = 1;
  double sum = 0.0;
  for (int k = 0; k < edges.size(); ++k) {
    const EdgeId& e = edges.edge(k);
    if (in[static_cast<std::size_t>(e.u)] != in[static_cast<std::size_t>(e.v)]) sum += x[static_cast<std::size_t>(k)];
  }
  return sum;
}

lp::ConstraintRow subtour_row(const EdgeIndex& edges, std::span<const int> subset) {
  std::vector<char> in(static_cast<std::size_t>(edges.num_vertices()), 0);
  for (int v : subset) in[static_cast<std::size_t>(v)] = 1;
  lp::ConstraintRow row;
  row.sense = lp::Sense::kGreaterEqual;
  row.rhs = 2.0;
  for (int k = 0; k < edges.size(); ++k) {
    const EdgeId& e = edges.edge(k);
    if (in[static_cast<std::size_t>(e.u)] != in[static_cast<std::size_t>(e.v)]) row.coefficients.emplace_back(k, 1.0);
  }
  return row;
}

std::vector<lp::ConstraintRow> separate_subtour(const EdgeIndex& edges, std::span<const double> x) {
  std::vector<lp::ConstraintRow> rows;
  if (edges.num_targets() < 2) return rows;

  const SupportGraph targets = target_support_graph(edges, x);
  for (const auto& component : connected_components(targets)) {
    if (component.size() < 2) continue;
    const std::vector<int> subset = to_vertex_ids(targets, component);
    if (cut_value(edges, x, subset) < 2.0 - kCutTolerance) rows.push_back(subtour_row(edges, subset));
  }
  if (!rows.empty()) return rows;

  // Merge all depots into one extra vertex so that a cut's value is the full
  // x(delta(S)) of the target shore S.
  SupportGraph merged = targets;
  const int depot_pos = merged.size();
  merged.vertices.push_back(-1);
  std::vector<double> to_depot(static_cast<std::size_t>(edges.num_targets()), 0.0);
  for (int k = 0; k < edges.size(); ++k) {
    const EdgeId& e = edges.edge(k);
    if (edges.is_depot(e.u)) to_depot[static_cast<std::size_t>(e.v - edges.num_depots())] += x[static_cast<std::size_t>(k)];
  }
  for (int t = 0; t < edges.num_targets(); ++t) {
    if (to_depot[static_cast<std::size_t>(t)] > kSupportTolerance) {
      merged.edges.push_back({t, depot_pos, to_depot[static_cast<std::size_t>(t)]});
    }
  }
  if (connected_components(merged).size() != 1) return rows;
  const Cut cut = global_min_cut(merged);
  if (!(cut.value < 2.0 - kCutTolerance)) return rows;

  std::vector<int> shore;
  const bool depot_side = std::binary_search(cut.side.begin(), cut.side.end(), depot_pos);
  for (int p = 0; p < merged.size(); ++p) {
    const bool on_side = std::binary_search(cut.side.begin(), cut.side.end(), p);
    if (p != depot_pos && on_side != depot_side) shore.push_back(p);
  }
  if (shore.size() < 2) return rows;
  const std::vector<int> subset = to_vertex_ids(merged, shore);
  if (cut_value(edges, x, subset) < 2.0 - kCutTolerance) rows.push_back(subtour_row(edges, subset));
  return rows;
}

ShrunkGraph shrink_support_graph(const SupportGraph& g, int num_depots) {
  const int n = g.size();
  auto is_target = [&](int pos) { return g.vertices[static_cast<std::size_t>(pos)] >= num_depots; };
  auto is_unit = [&](const WeightedEdge& e) {
    return is_target(e.u) && is_target(e.v) && e.u != e.v && std::abs(e.weight - 1.0) <= kUnitTolerance;
  };

  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  std::vector<std::vector<int>> unit_adj(static_cast<std::size_t>(n));
  for (const WeightedEdge& e : g.edges) {
    if (!is_unit(e)) continue;
    unit_adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    unit_adj[static_cast<std::size_t>(e.v)].push_back(e.u);
    const int a = find(e.u);
    const int b = find(e.v);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }

  std::vector<std::vector<int>> members;
  std::vector<int> group_of(static_cast<std::size_t>(n), -1);
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    const int r = find(v);
    if (slot[static_cast<std::size_t>(r)] < 0) {
      slot[static_cast<std::size_t>(r)] = static_cast<int>(members.size());
      members.emplace_back();
    }
    group_of[static_cast<std::size_t>(v)] = slot[static_cast<std::size_t>(r)];
    members[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(v);
  }

  ShrunkGraph out;
  for (const auto& group : members) {
    ShrunkVertex sv;
    auto id = [&](int pos) { return g.vertices[static_cast<std::size_t>(pos)]; };
    if (group.size() == 1) {
      sv.path = {id(group[0])};
      sv.first = sv.last = sv.path[0];
    } else {
      // Walk from the lowest-id endpoint of degree one; anything that is
      // not a simple path (a unit cycle) is flagged.
      int start = -1;
      bool simple = true;
      for (int v : group) {
        const auto deg = unit_adj[static_cast<std::size_t>(v)].size();
        if (deg > 2) simple = false;
        if (deg == 1 && (start < 0 || id(v) < id(start))) start = v;
      }
      if (start < 0 || !simple) {
        sv.is_cycle = true;
        for (int v : group) sv.path.push_back(id(v));
        std::sort(sv.path.begin(), sv.path.end());
        sv.first = sv.last = -1;
      } else {
        int prev = -1;
        int cur = start;
        while (cur >= 0) {
          sv.path.push_back(id(cur));
          int next = -1;
          for (int w : unit_adj[static_cast<std::size_t>(cur)]) {
            if (w != prev) next = w;
          }
          prev = cur;
          cur = next;
        }
        sv.first = sv.path.front();
        sv.last = sv.path.back();
      }
    }
    out.graph.vertices.push_back(sv.path.front());
    out.groups.push_back(std::move(sv));
  }

  std::map<std::pair<int, int>, double> merged;
  for (const WeightedEdge& e : g.edges) {
    const int a = group_of[static_cast<std::size_t>(e.u)];
    const int b = group_of[static_cast<std::size_t>(e.v)];
    if (a == b) continue;
    merged[{std::min(a, b), std::max(a, b)}] += e.weight;
  }
  for (const auto& [key, w] : merged) out.graph.edges.push_back({key.first, key.second, w});
  return out;
}

double path_elimination_lhs(const EdgeIndex& edges, std::span<const double> x, const PathViolation& t) {
  auto val = [&](int a, int b) {
    const int k = edges.find(a, b);
    return k < 0 ? 0.0 : x[static_cast<std::size_t>(k)];
  };
  std::vector<char> in_subset(static_cast<std::size_t>(edges.num_depots()), 0);
  for (int i : t.depot_subset) in_subset[static_cast<std::size_t>(i)] = 1;
  double lhs = 0.0;
  for (int i = 0; i < edges.num_depots(); ++i) lhs += in_subset[static_cast<std::size_t>(i)] ? val(i, t.j) : val(i, t.l);
  if (t.interior.empty()) return lhs + 3.0 * val(t.j, t.l);
  std::vector<int> inner = t.interior;
  inner.push_back(t.j);
  inner.push_back(t.l);
  for (std::size_t a = 0; a < inner.size(); ++a) {
    for (std::size_t b = a + 1; b < inner.size(); ++b) lhs += 2.0 * val(inner[a], inner[b]);
  }
  return lhs;
}

double path_elimination_rhs(const PathViolation& t) {
  return t.interior.empty() ? 4.0 : 2.0 * static_cast<double>(t.interior.size()) + 3.0;
}

lp::ConstraintRow path_elimination_row(const EdgeIndex& edges, const PathViolation& t) {
  std::map<int, double> coef;
  std::vector<char> in_subset(static_cast<std::size_t>(edges.num_depots()), 0);
  for (int i : t.depot_subset) in_subset[static_cast<std::size_t>(i)] = 1;
  for (int i = 0; i < edges.num_depots(); ++i) {
    coef[edges.index(i, in_subset[static_cast<std::size_t>(i)] ? t.j : t.l)] += 1.0;
  }
  if (t.interior.empty()) {
    coef[edges.index(t.j, t.l)] += 3.0;
  } else {
    std::vector<int> inner = t.interior;
    inner.push_back(t.j);
    inner.push_back(t.l);
    for (std::size_t a = 0; a < inner.size(); ++a) {
      for (std::size_t b = a + 1; b < inner.size(); ++b) coef[edges.index(inner[a], inner[b])] += 2.0;
    }
  }
  lp::ConstraintRow row;
  row.sense = lp::Sense::kLessEqual;
  row.rhs = path_elimination_rhs(t);
  row.coefficients.assign(coef.begin(), coef.end());
  return row;
}

std::vector<PathViolation> find_path_violations(const EdgeIndex& edges, std::span<const double> x) {
  std::vector<PathViolation> out;
  const int p = edges.num_depots();
  if (p < 2) return out;
  const ShrunkGraph shrunk = shrink_support_graph(full_support_graph(edges, x), p);
  auto val = [&](int a, int b) {
    const int k = edges.find(a, b);
    return k < 0 ? 0.0 : x[static_cast<std::size_t>(k)];
  };
  for (const ShrunkVertex& sv : shrunk.groups) {
    if (sv.is_cycle || sv.path.size() < 2 || edges.is_depot(sv.first)) continue;
    PathViolation t;
    t.j = std::min(sv.first, sv.last);
    t.l = std::max(sv.first, sv.last);
    t.interior.assign(sv.path.begin() + 1, sv.path.end() - 1);
    std::sort(t.interior.begin(), t.interior.end());

    // Each depot contributes x_ij if in I', x_il otherwise; take the larger,
    // then repair I' to be a proper nonempty subset at least loss.
    std::vector<double> gain(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
      gain[static_cast<std::size_t>(i)] = val(i, t.j) - val(i, t.l);
      if (gain[static_cast<std::size_t>(i)] > 0.0) t.depot_subset.push_back(i);
    }
    if (t.depot_subset.empty()) {
      t.depot_subset.push_back(static_cast<int>(std::max_element(gain.begin(), gain.end()) - gain.begin()));
    } else if (static_cast<int>(t.depot_subset.size()) == p) {
      const int drop = static_cast<int>(std::min_element(gain.begin(), gain.end()) - gain.begin());
      t.depot_subset.erase(std::find(t.depot_subset.begin(), t.depot_subset.end(), drop));
    }
    t.lhs = path_elimination_lhs(edges, x, t);
    t.rhs = path_elimination_rhs(t);
    if (t.lhs > t.rhs + kCutTolerance) out.push_back(std::move(t));
  }
  return out;
}

std::vector<lp::ConstraintRow> separate_path_elim(const EdgeIndex& edges, std::span<const double> x) {
  std::vector<lp::ConstraintRow> rows;
  for (const PathViolation& t : find_path_violations(edges, x)) rows.push_back(path_elimination_row(edges, t));
  return rows;
}

}  // namespace mvplc
