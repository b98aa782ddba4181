#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mvplc/separation.hpp"

namespace mvplc {

std::vector<std::vector<int>> connected_components(const SupportGraph& g) {
  const int n = g.size();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (const WeightedEdge& e : g.edges) {
    if (!(e.weight > 0.0)) continue;
    const int a = find(e.u);
    const int b = find(e.v);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> out;
  for (int v = 0; v < n; ++v) {
    const int root = find(v);
    if (slot[static_cast<std::size_t>(root)] < 0) {
      slot[static_cast<std::size_t>(root)] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[static_cast<std::size_t>(root)])].push_back(v);
  }
  return out;
}

Cut global_min_cut(const SupportGraph& g) {
  const int n = g.size();
  if (n < 2) throw std::invalid_argument("minimum cut needs at least two vertices");
  if (connected_components(g).size() != 1) throw std::invalid_argument("minimum cut needs a connected graph");

  std::vector<double> w(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  auto at = [&](int a, int b) -> double& { return w[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)]; };
  for (const WeightedEdge& e : g.edges) {
    if (e.u == e.v) continue;
    at(e.u, e.v) += e.weight;
    at(e.v, e.u) += e.weight;
  }

  // members[v]: original positions merged into super-vertex v.
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) members[static_cast<std::size_t>(v)] = {v};
  std::vector<int> active(static_cast<std::size_t>(n));
  std::iota(active.begin(), active.end(), 0);

  Cut best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<double> key(static_cast<std::size_t>(n));
  std::vector<char> added(static_cast<std::size_t>(n));

  while (active.size() > 1) {
    // Maximum adjacency ordering; ties go to the earliest active vertex.
    for (int v : active) {
      key[static_cast<std::size_t>(v)] = 0.0;
      added[static_cast<std::size_t>(v)] = 0;
    }
    int prev = -1;
    int last = -1;
    for (std::size_t step = 0; step < active.size(); ++step) {
      int pick = -1;
      for (int v : active) {
        if (added[static_cast<std::size_t>(v)]) continue;
        if (pick < 0 || key[static_cast<std::size_t>(v)] > key[static_cast<std::size_t>(pick)]) pick = v;
      }
      if (pick < 0) break;
      added[static_cast<std::size_t>(pick)] = 1;
      prev = last;
      last = pick;
      for (int v : active) {
        if (!added[static_cast<std::size_t>(v)]) key[static_cast<std::size_t>(v)] += at(pick, v);
      }
    }
    const double phase_cut = key[static_cast<std::size_t>(last)];
    if (phase_cut < best.value) {
      best.value = phase_cut;
      best.side = members[static_cast<std::size_t>(last)];
    }
    // Merge `last` into `prev`.
    auto& into = members[static_cast<std::size_t>(prev)];
    const auto& from = members[static_cast<std::size_t>(last)];
    into.insert(into.end(), from.begin(), from.end());
    for (int v : active) {
      if (v == prev || v == last) continue;
      at(prev, v) += at(last, v);
      at(v, prev) = at(prev, v);
    }
    active.erase(std::find(active.begin(), active.end(), last));
  }
  std::sort(best.side.begin(), best.side.end());
  return best;
}

}  // namespace mvplc
