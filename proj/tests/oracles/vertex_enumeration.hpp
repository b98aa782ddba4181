#pragma once

#include <optional>

#include "mvplc/lp.hpp"

namespace mvplc::oracle {

// Minimum of a box-bounded LP by enumerating basic solutions: choose k
// active rows and k free variables, pin every other variable to a bound and
// solve the k x k system. Exponential; only for programs with ~10 variables.
// Returns nullopt when no feasible vertex exists.
std::optional<double> vertex_enumeration_minimum(const lp::LinearProgram& program, double tol = 1e-9);

}  // namespace mvplc::oracle
