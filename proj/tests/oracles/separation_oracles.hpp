#pragma once

#include <span>
#include <vector>

#include "mvplc/instance.hpp"
#include "mvplc/random.hpp"
#include "mvplc/separation.hpp"

namespace mvplc::oracle {

// Minimum over all 2^(n-1) - 1 bipartitions.
double exhaustive_min_cut(const SupportGraph& g);

// True iff some target set S with |S| >= 2 has x(delta(S)) < 2 - tol.
bool exhaustive_subtour_violated(const EdgeIndex& edges, std::span<const double> x, double tol = kCutTolerance);

// True iff some tuple (j, l, S, I') violates a path elimination inequality by
// more than tol. Left-hand sides are evaluated from scratch here.
bool exhaustive_path_violated(const EdgeIndex& edges, std::span<const double> x, double tol = kCutTolerance);

struct RouteConfigOptions {
  double subtour_probability = 0.2;
  double cross_path_probability = 0.3;
};

// Random integer edge vector in which every target has degree 2: targets are
// split into depot cycles (return trips when alone), depot-to-depot paths
// and target-only cycles.
std::vector<double> random_route_config(const EdgeIndex& edges, Rng& rng, const RouteConfigOptions& options = {});

}  // namespace mvplc::oracle
