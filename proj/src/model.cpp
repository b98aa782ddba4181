#include "mvplc/model.hpp"

namespace mvplc {

Model build_model(const Instance& instance, const CoverageSets& coverage, const ModelOptions& options) {
  Model model(instance, coverage);
  model.options = options;
  const EdgeIndex& edges = model.edges;
  lp::LinearProgram& lp = model.program;

  for (int e = 0; e < edges.size(); ++e) {
    const EdgeId& id = edges.edge(e);
    lp.add_variable(edge_cost(instance, id), 0.0, edges.is_depot(id.u) ? 2.0 : 1.0);
  }
  model.landmark_offset = lp.num_variables();
  for (int k = 0; k < instance.num_landmarks(); ++k) lp.add_variable(instance.lm_cost, 0.0, 1.0);

  // Target degree.
  for (int j = instance.num_depots(); j < instance.num_vertices(); ++j) {
    lp::ConstraintRow row{.coefficients = {}, .sense = lp::Sense::kEqual, .rhs = 2.0};
    for (int e : edges.incident(j)) row.coefficients.emplace_back(model.x_var(e), 1.0);
    lp.rows.push_back(std::move(row));
  }

  // Localization.
  if (options.localization == Localization::kTwoPerEdge) {
    model.aux_offset = lp.num_variables();
    for (int e = 0; e < edges.size(); ++e) {
      if (edges.is_depot(edges.edge(e).u)) lp.add_variable(0.0, 0.0, 1.0);
    }
  }
  int aux = model.aux_offset;
  for (int e = 0; e < edges.size(); ++e) {
    lp::ConstraintRow row{.coefficients = {}, .sense = lp::Sense::kGreaterEqual, .rhs = 0.0};
    for (int k : coverage[e]) row.coefficients.emplace_back(model.d_var(k), 1.0);
    const bool depot_edge = edges.is_depot(edges.edge(e).u);
    if (options.localization == Localization::kTwoPerEdge && depot_edge) {
      row.coefficients.emplace_back(aux, -2.0);
      lp.rows.push_back(std::move(row));
      lp.rows.push_back({.coefficients = {{model.x_var(e), -1.0}, {aux, 2.0}}, .sense = lp::Sense::kGreaterEqual, .rhs = 0.0});
      ++aux;
    } else {
      row.coefficients.emplace_back(model.x_var(e), -2.0);
      lp.rows.push_back(std::move(row));
    }
  }

  if (options.depot_degree_rows) {
    for (int i = 0; i < instance.num_depots(); ++i) {
      lp::ConstraintRow row{.coefficients = {}, .sense = lp::Sense::kEqual, .rhs = 2.0};
      for (int e : edges.incident(i)) row.coefficients.emplace_back(model.x_var(e), 1.0);
      lp.rows.push_back(std::move(row));
    }
  }
  lp.validate();
  return model;
}

double model_objective(const Model& model, std::span<const double> values) {
  double total = 0.0;
  for (int v = 0; v < model.num_variables(); ++v) total += model.program.objective[static_cast<std::size_t>(v)] * values[static_cast<std::size_t>(v)];
  return total;
}

}  // namespace mvplc
