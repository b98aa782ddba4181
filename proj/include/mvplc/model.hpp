#pragma once

#include "mvplc/instance.hpp"
#include "mvplc/lp.hpp"

namespace mvplc {

// How the landmark requirement of a traversed edge is modelled.
//   kLiteral:    sum_{k in L_e} d_k >= 2 x_e (a return trip needs four).
//   kTwoPerEdge: sum_{k in L_e} d_k >= 2 y_e with x_e <= 2 y_e, y_e binary,
//                so any traversed edge needs two.
enum class Localization { kLiteral, kTwoPerEdge };

struct ModelOptions {
  bool depot_degree_rows = true;
  Localization localization = Localization::kLiteral;
};

// Static part of the MVPLC integer program. Variable layout: one x per edge
// (same index as EdgeIndex), then one d per landmark candidate, then (only
// with kTwoPerEdge) one y per depot-target edge.
struct Model {
  Model(const Instance& inst, CoverageSets cov) : instance(inst), edges(inst), coverage(std::move(cov)) {}

  Instance instance;
  EdgeIndex edges;
  CoverageSets coverage;
  ModelOptions options;
  lp::LinearProgram program;
  int landmark_offset = 0;
  int aux_offset = -1;  // first y variable, -1 without kTwoPerEdge

  int num_edges() const { return edges.size(); }
  int num_landmarks() const { return instance.num_landmarks(); }
  int num_variables() const { return program.num_variables(); }
  int x_var(int edge) const { return edge; }
  int d_var(int landmark) const { return landmark_offset + landmark; }
};

Model build_model(const Instance& instance, const CoverageSets& coverage, const ModelOptions& options = {});

// Routing cost plus landmark cost of a point given over all model variables.
double model_objective(const Model& model, std::span<const double> values);

}  // namespace mvplc
