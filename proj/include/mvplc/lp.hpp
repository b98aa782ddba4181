#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace mvplc::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTolerance = 1e-7;
inline constexpr double kObjectiveTolerance = 1e-7;

enum class Sense { kGreaterEqual, kLessEqual, kEqual };

struct ConstraintRow {
  std::vector<std::pair<int, double>> coefficients;  // (variable, coefficient)
  Sense sense = Sense::kGreaterEqual;
  double rhs = 0.0;

  double activity(std::span<const double> values) const;
  // Amount by which `values` violates the row (0 when satisfied).
  double violation(std::span<const double> values) const;
};

struct LinearProgram {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<ConstraintRow> rows;

  int num_variables() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  // Adds a variable and returns its index.
  int add_variable(double cost, double lo, double hi);

  // Throws std::invalid_argument if bounds are inverted, vector sizes
  // disagree, or a row references a bad or duplicated variable index.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;
  std::int64_t iterations = 0;
};

// Cold solve from the all-slack basis.
LpResult solve_lp(const LinearProgram& program);

// Returns `program` with `rows` appended. Throws std::invalid_argument if a
// row references a variable outside the program.
LinearProgram append_rows(LinearProgram program, std::span<const ConstraintRow> rows);

// Bounded-variable primal simplex over the form  A x - s = 0,  l <= (x, s) <= u,
// where each row owns one logical variable s whose bounds encode the sense
// and right-hand side. Keeps a dense explicit basis inverse and its basis
// across calls, so re-solves after add_rows or set_bounds start from the
// previous basis.
class SimplexSolver {
 public:
  explicit SimplexSolver(LinearProgram program);

  const LinearProgram& program() const { return program_; }

  void add_rows(std::span<const ConstraintRow> rows);
  // Replaces the structural variable bounds.
  void set_bounds(std::span<const double> lower, std::span<const double> upper);

  LpResult solve();

  // Number of pivots after which Bland's rule replaces Dantzig pricing.
  static constexpr int kDegenerateStreak = 50;

 private:
  enum class VarState : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

  int num_structural() const { return program_.num_variables(); }
  int num_rows() const { return static_cast<int>(basis_.size()); }
  int num_total() const { return num_structural() + num_rows(); }

  void append_logicals(std::span<const ConstraintRow> rows);
  void place_nonbasic(int var);
  bool reinvert();
  void reset_to_slack_basis();
  void recompute_basic_values();
  double column_dot(int var, std::span<const double> y) const;
  void ftran_column(int var, std::vector<double>& out) const;
  void pivot(int row, std::span<const double> alpha);
  void refactor();
  // Largest |A x - s| over the rows at the current values.
  double row_residual() const;
  void phase_two_duals(std::vector<double>& y) const;
  double reduced_cost(int var, std::span<const double> y) const;

  enum class DualOutcome { kPrimalFeasible, kInfeasible, kNotApplicable };
  // Dual simplex from a dual feasible basis; used after rows are added or
  // bounds tightened. Leaves the basis for the primal phase to finish.
  DualOutcome dual_phase(std::int64_t& iterations);

  LinearProgram program_;
  // Column-wise copy of the structural part of A.
  std::vector<std::vector<std::pair<int, double>>> columns_;
  std::vector<double> lower_;  // size num_total()
  std::vector<double> upper_;
  std::vector<double> value_;
  std::vector<VarState> state_;
  std::vector<int> basis_;          // basic variable per row position
  std::vector<double> inverse_;     // dense row-major basis inverse
  int pivots_since_reinvert_ = 0;
};

}  // namespace mvplc::lp
