#include "mvplc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mvplc::lp {

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kSingularTol = 1e-11;
constexpr int kReinvertInterval = 200;

bool is_finite(double v) { return std::isfinite(v); }

void logical_bounds(const ConstraintRow& row, double& lo, double& hi) {
  switch (row.sense) {
    case Sense::kGreaterEqual:
      lo = row.rhs;
      hi = kInfinity;
      break;
    case Sense::kLessEqual:
      lo = -kInfinity;
      hi = row.rhs;
      break;
    case Sense::kEqual:
      lo = row.rhs;
      hi = row.rhs;
      break;
  }
}

void validate_row(const ConstraintRow& row, int num_variables, std::vector<char>& seen) {
  if (!is_finite(row.rhs)) throw std::invalid_argument("row right-hand side must be finite");
  for (const auto& [var, coef] : row.coefficients) {
    if (var < 0 || var >= num_variables) {
      throw std::invalid_argument("row references variable " + std::to_string(var) + " outside the program");
    }
    if (!is_finite(coef)) throw std::invalid_argument("row coefficient must be finite");
    if (seen[static_cast<std::size_t>(var)]) {
      throw std::invalid_argument("row lists variable " + std::to_string(var) + " twice");
    }
    seen[static_cast<std::size_t>(var)] = 1;
  }
  for (const auto& [var, coef] : row.coefficients) seen[static_cast<std::size_t>(var)] = 0;
}

}  // namespace

double ConstraintRow::activity(std::span<const double> values) const {
  double sum = 0.0;
  for (const auto& [var, coef] : coefficients) sum += coef * values[static_cast<std::size_t>(var)];
  return sum;
}

double ConstraintRow::violation(std::span<const double> values) const {
  const double a = activity(values);
  switch (sense) {
    case Sense::kGreaterEqual:
      return std::max(0.0, rhs - a);
    case Sense::kLessEqual:
      return std::max(0.0, a - rhs);
    case Sense::kEqual:
      return std::abs(a - rhs);
  }
  return 0.0;
}

int LinearProgram::add_variable(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  return num_variables() - 1;
}

void LinearProgram::validate() const {
  const auto n = objective.size();
  if (lower.size() != n || upper.size() != n) throw std::invalid_argument("bound vectors must match objective size");
  for (std::size_t j = 0; j < n; ++j) {
    if (!is_finite(objective[j])) throw std::invalid_argument("objective coefficients must be finite");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j]) {
      throw std::invalid_argument("variable " + std::to_string(j) + " has inverted bounds");
    }
    if (lower[j] == kInfinity || upper[j] == -kInfinity) {
      throw std::invalid_argument("variable " + std::to_string(j) + " has an infinite bound on the wrong side");
    }
  }
  std::vector<char> seen(n, 0);
  for (const ConstraintRow& row : rows) validate_row(row, num_variables(), seen);
}

LpResult solve_lp(const LinearProgram& program) { return SimplexSolver(program).solve(); }

LinearProgram append_rows(LinearProgram program, std::span<const ConstraintRow> rows) {
  std::vector<char> seen(static_cast<std::size_t>(program.num_variables()), 0);
  for (const ConstraintRow& row : rows) validate_row(row, program.num_variables(), seen);
  program.rows.insert(program.rows.end(), rows.begin(), rows.end());
  return program;
}

SimplexSolver::SimplexSolver(LinearProgram program) : program_(std::move(program)) {
  program_.validate();
  const int n = num_structural();
  columns_.resize(static_cast<std::size_t>(n));
  lower_ = program_.lower;
  upper_ = program_.upper;
  value_.assign(static_cast<std::size_t>(n), 0.0);
  state_.assign(static_cast<std::size_t>(n), VarState::kAtLower);
  for (int j = 0; j < n; ++j) place_nonbasic(j);

  std::vector<ConstraintRow> rows = std::move(program_.rows);
  program_.rows.clear();
  append_logicals(rows);
}

void SimplexSolver::place_nonbasic(int var) {
  const auto j = static_cast<std::size_t>(var);
  const bool prefer_upper = state_[j] == VarState::kAtUpper;
  if (is_finite(lower_[j]) && (!prefer_upper || !is_finite(upper_[j]))) {
    state_[j] = VarState::kAtLower;
    value_[j] = lower_[j];
  } else if (is_finite(upper_[j])) {
    state_[j] = VarState::kAtUpper;
    value_[j] = upper_[j];
  } else {
    state_[j] = VarState::kFree;
    value_[j] = 0.0;
  }
}

void SimplexSolver::append_logicals(std::span<const ConstraintRow> rows) {
  if (rows.empty()) return;
  const int n = num_structural();
  const int m_old = num_rows();
  const int k = static_cast<int>(rows.size());
  const int m_new = m_old + k;

  // Logical variables are stored after the structural ones; inserting rows
  // shifts nothing because structurals come first and logicals are indexed
  // by row.
  for (int t = 0; t < k; ++t) {
    const ConstraintRow& row = rows[static_cast<std::size_t>(t)];
    const int r = m_old + t;
    for (const auto& [var, coef] : row.coefficients) {
      if (coef != 0.0) columns_[static_cast<std::size_t>(var)].emplace_back(r, coef);
    }
    double lo = 0.0;
    double hi = 0.0;
    logical_bounds(row, lo, hi);
    lower_.push_back(lo);
    upper_.push_back(hi);
    value_.push_back(0.0);
    state_.push_back(VarState::kBasic);
    basis_.push_back(n + r);
    program_.rows.push_back(row);
  }

  // Extend the inverse: [[B, 0], [R, -I]]^-1 = [[B^-1, 0], [R B^-1, -I]],
  // where R holds the new rows restricted to the old basic columns.
  std::vector<double> grown(static_cast<std::size_t>(m_new) * static_cast<std::size_t>(m_new), 0.0);
  for (int i = 0; i < m_old; ++i) {
    std::copy_n(inverse_.begin() + static_cast<std::ptrdiff_t>(i) * m_old, m_old,
                grown.begin() + static_cast<std::ptrdiff_t>(i) * m_new);
  }
  std::vector<int> position_of(static_cast<std::size_t>(n), -1);
  for (int pos = 0; pos < m_old; ++pos) {
    const int var = basis_[static_cast<std::size_t>(pos)];
    if (var < n) position_of[static_cast<std::size_t>(var)] = pos;
  }
  for (int t = 0; t < k; ++t) {
    const int r = m_old + t;
    double* out = grown.data() + static_cast<std::ptrdiff_t>(r) * m_new;
    for (const auto& [var, coef] : rows[static_cast<std::size_t>(t)].coefficients) {
      const int pos = position_of[static_cast<std::size_t>(var)];
      if (pos < 0 || coef == 0.0) continue;
      const double* src = inverse_.data() + static_cast<std::ptrdiff_t>(pos) * m_old;
      for (int c = 0; c < m_old; ++c) out[c] += coef * src[c];
    }
    out[r] = -1.0;
  }
  inverse_ = std::move(grown);
}

void SimplexSolver::add_rows(std::span<const ConstraintRow> rows) {
  std::vector<char> seen(static_cast<std::size_t>(num_structural()), 0);
  for (const ConstraintRow& row : rows) validate_row(row, num_structural(), seen);
  append_logicals(rows);
}

void SimplexSolver::set_bounds(std::span<const double> lower, std::span<const double> upper) {
  const int n = num_structural();
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n) {
    throw std::invalid_argument("bound vectors must match variable count");
  }
  for (int j = 0; j < n; ++j) {
    const auto u = static_cast<std::size_t>(j);
    if (std::isnan(lower[u]) || std::isnan(upper[u]) || lower[u] > upper[u]) {
      throw std::invalid_argument("variable " + std::to_string(j) + " has inverted bounds");
    }
    lower_[u] = lower[u];
    upper_[u] = upper[u];
    program_.lower[u] = lower[u];
    program_.upper[u] = upper[u];
    if (state_[u] != VarState::kBasic) place_nonbasic(j);
  }
}

bool SimplexSolver::reinvert() {
  const int m = num_rows();
  const int n = num_structural();
  const auto mm = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  std::vector<double> work(mm, 0.0);
  for (int pos = 0; pos < m; ++pos) {
    const int var = basis_[static_cast<std::size_t>(pos)];
    if (var < n) {
      for (const auto& [row, coef] : columns_[static_cast<std::size_t>(var)]) {
        work[static_cast<std::size_t>(row) * m + pos] = coef;
      }
    } else {
      work[static_cast<std::size_t>(var - n) * m + pos] = -1.0;
    }
  }
  std::vector<double> inv(mm, 0.0);
  for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(i) * m + i] = 1.0;

  // Gauss-Jordan with partial pivoting on [B | I]; rows are swapped
  // physically so that row c ends up holding the pivot for column c.
  for (int c = 0; c < m; ++c) {
    int best = -1;
    double best_abs = kSingularTol;
    for (int r = c; r < m; ++r) {
      const double a = std::abs(work[static_cast<std::size_t>(r) * m + c]);
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (best < 0) return false;
    if (best != c) {
      std::swap_ranges(work.begin() + static_cast<std::ptrdiff_t>(best) * m,
                       work.begin() + static_cast<std::ptrdiff_t>(best + 1) * m,
                       work.begin() + static_cast<std::ptrdiff_t>(c) * m);
      std::swap_ranges(inv.begin() + static_cast<std::ptrdiff_t>(best) * m,
                       inv.begin() + static_cast<std::ptrdiff_t>(best + 1) * m,
                       inv.begin() + static_cast<std::ptrdiff_t>(c) * m);
    }
    double* wc = work.data() + static_cast<std::ptrdiff_t>(c) * m;
    double* ic = inv.data() + static_cast<std::ptrdiff_t>(c) * m;
    const double scale = 1.0 / wc[c];
    for (int k = 0; k < m; ++k) {
      wc[k] *= scale;
      ic[k] *= scale;
    }
    for (int r = 0; r < m; ++r) {
      if (r == c) continue;
      double* wr = work.data() + static_cast<std::ptrdiff_t>(r) * m;
      const double f = wr[c];
      if (f == 0.0) continue;
      double* ir = inv.data() + static_cast<std::ptrdiff_t>(r) * m;
      for (int k = c; k < m; ++k) wr[k] -= f * wc[k];
      for (int k = 0; k < m; ++k) {
        if (ic[k] != 0.0) ir[k] -= f * ic[k];
      }
    }
  }
  // inv is B^-1 with rows indexed by basis position.
  inverse_ = std::move(inv);
  pivots_since_reinvert_ = 0;
  return true;
}

void SimplexSolver::reset_to_slack_basis() {
  const int m = num_rows();
  const int n = num_structural();
  for (int pos = 0; pos < m; ++pos) {
    const int var = basis_[static_cast<std::size_t>(pos)];
    if (var < n) {
      state_[static_cast<std::size_t>(var)] = VarState::kAtLower;
      place_nonbasic(var);
    }
    basis_[static_cast<std::size_t>(pos)] = n + pos;
    state_[static_cast<std::size_t>(n + pos)] = VarState::kBasic;
  }
  inverse_.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) inverse_[static_cast<std::size_t>(i) * m + i] = -1.0;
  pivots_since_reinvert_ = 0;
}

void SimplexSolver::recompute_basic_values() {
  const int m = num_rows();
  const int n = num_structural();
  std::vector<double> rhs(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < n; ++j) {
    const auto u = static_cast<std::size_t>(j);
    if (state_[u] == VarState::kBasic || value_[u] == 0.0) continue;
    for (const auto& [row, coef] : columns_[u]) rhs[static_cast<std::size_t>(row)] += coef * value_[u];
  }
  for (int i = 0; i < m; ++i) {
    const auto u = static_cast<std::size_t>(n + i);
    if (state_[u] != VarState::kBasic) rhs[static_cast<std::size_t>(i)] -= value_[u];
  }
  for (int pos = 0; pos < m; ++pos) {
    const double* row = inverse_.data() + static_cast<std::ptrdiff_t>(pos) * m;
    double sum = 0.0;
    for (int c = 0; c < m; ++c) sum += row[c] * rhs[static_cast<std::size_t>(c)];
    value_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(pos)])] = -sum;
  }
}

double SimplexSolver::column_dot(int var, std::span<const double> y) const {
  const int n = num_structural();
  if (var >= n) return -y[static_cast<std::size_t>(var - n)];
  double sum = 0.0;
  for (const auto& [row, coef] : columns_[static_cast<std::size_t>(var)]) sum += coef * y[static_cast<std::size_t>(row)];
  return sum;
}

void SimplexSolver::ftran_column(int var, std::vector<double>& out) const {
  const int m = num_rows();
  const int n = num_structural();
  out.assign(static_cast<std::size_t>(m), 0.0);
  if (var >= n) {
    const int i = var - n;
    for (int pos = 0; pos < m; ++pos) out[static_cast<std::size_t>(pos)] = -inverse_[static_cast<std::size_t>(pos) * m + i];
    return;
  }
  for (const auto& [row, coef] : columns_[static_cast<std::size_t>(var)]) {
    for (int pos = 0; pos < m; ++pos) {
      out[static_cast<std::size_t>(pos)] += coef * inverse_[static_cast<std::size_t>(pos) * m + row];
    }
  }
}

void SimplexSolver::pivot(int row, std::span<const double> alpha) {
  const int m = num_rows();
  double* pr = inverse_.data() + static_cast<std::ptrdiff_t>(row) * m;
  const double scale = 1.0 / alpha[static_cast<std::size_t>(row)];
  for (int c = 0; c < m; ++c) pr[c] *= scale;
  for (int pos = 0; pos < m; ++pos) {
    const double f = alpha[static_cast<std::size_t>(pos)];
    if (pos == row || f == 0.0) continue;
    double* p = inverse_.data() + static_cast<std::ptrdiff_t>(pos) * m;
    for (int c = 0; c < m; ++c) p[c] -= f * pr[c];
  }
  ++pivots_since_reinvert_;
}

void SimplexSolver::refactor() {
  if (!reinvert()) reset_to_slack_basis();
  recompute_basic_values();
}

double SimplexSolver::row_residual() const {
  const int m = num_rows();
  const int n = num_structural();
  std::vector<double> activity(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < n; ++j) {
    const double v = value_[static_cast<std::size_t>(j)];
    if (v == 0.0) continue;
    for (const auto& [row, coef] : columns_[static_cast<std::size_t>(j)]) activity[static_cast<std::size_t>(row)] += coef * v;
  }
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    worst = std::max(worst, std::abs(activity[static_cast<std::size_t>(i)] - value_[static_cast<std::size_t>(n + i)]));
  }
  return worst;
}

void SimplexSolver::phase_two_duals(std::vector<double>& y) const {
  const int m = num_rows();
  const int n = num_structural();
  y.assign(static_cast<std::size_t>(m), 0.0);
  for (int pos = 0; pos < m; ++pos) {
    const int v = basis_[static_cast<std::size_t>(pos)];
    const double c = v < n ? program_.objective[static_cast<std::size_t>(v)] : 0.0;
    if (c == 0.0) continue;
    const double* row = inverse_.data() + static_cast<std::ptrdiff_t>(pos) * m;
    for (int k = 0; k < m; ++k) y[static_cast<std::size_t>(k)] += c * row[k];
  }
}

double SimplexSolver::reduced_cost(int var, std::span<const double> y) const {
  const double c = var < num_structural() ? program_.objective[static_cast<std::size_t>(var)] : 0.0;
  return c - column_dot(var, y);
}

SimplexSolver::DualOutcome SimplexSolver::dual_phase(std::int64_t& iterations) {
  const int m = num_rows();
  const int total = num_total();
  std::vector<double> y;
  std::vector<double> d(static_cast<std::size_t>(total), 0.0);
  std::vector<double> alpha;
  std::vector<double> rho(static_cast<std::size_t>(m));
  const std::int64_t limit = iterations + 20LL * (total + m);
  int degenerate_streak = 0;
  bool checked_infeasible = false;

  for (;;) {
    if (iterations >= limit) return DualOutcome::kNotApplicable;
    if (pivots_since_reinvert_ >= kReinvertInterval) refactor();

    // Leaving row: largest bound violation, lowest position on ties.
    int r = -1;
    double worst = kPrimalTol;
    for (int pos = 0; pos < m; ++pos) {
      const auto v = static_cast<std::size_t>(basis_[static_cast<std::size_t>(pos)]);
      const double viol = std::max(lower_[v] - value_[v], value_[v] - upper_[v]);
      if (viol > worst) {
        worst = viol;
        r = pos;
      }
    }
    if (r < 0) return DualOutcome::kPrimalFeasible;

    // Boxed nonbasic variables on the wrong bound for their reduced cost
    // are moved to the other bound; anything else means the basis is not
    // dual feasible.
    phase_two_duals(y);
    bool flipped = false;
    for (int j = 0; j < total; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (state_[u] == VarState::kBasic) continue;
      d[u] = reduced_cost(j, y);
      if (lower_[u] == upper_[u]) continue;
      const bool boxed = is_finite(lower_[u]) && is_finite(upper_[u]);
      if (state_[u] == VarState::kAtLower && d[u] < -kDualTol) {
        if (!boxed) return DualOutcome::kNotApplicable;
        state_[u] = VarState::kAtUpper;
        value_[u] = upper_[u];
        flipped = true;
      } else if (state_[u] == VarState::kAtUpper && d[u] > kDualTol) {
        if (!boxed) return DualOutcome::kNotApplicable;
        state_[u] = VarState::kAtLower;
        value_[u] = lower_[u];
        flipped = true;
      } else if (state_[u] == VarState::kFree && std::abs(d[u]) > kDualTol) {
        return DualOutcome::kNotApplicable;
      }
    }
    if (flipped) {
      recompute_basic_values();
      continue;
    }

    const auto lv = static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)]);
    const bool increase = value_[lv] < lower_[lv];
    const double target = increase ? lower_[lv] : upper_[lv];
    std::copy_n(inverse_.begin() + static_cast<std::ptrdiff_t>(r) * m, m, rho.begin());

    // Harris two-pass ratio test over the pivot row.
    const bool bland = degenerate_streak > kDegenerateStreak;
    auto eligible = [&](int j, double a) {
      const VarState s = state_[static_cast<std::size_t>(j)];
      // x_r changes by -a per unit increase of z_j.
      const bool can_up = s == VarState::kAtLower || s == VarState::kFree;
      const bool can_down = s == VarState::kAtUpper || s == VarState::kFree;
      if (increase) return (can_up && a < -kPivotTol) || (can_down && a > kPivotTol);
      return (can_up && a > kPivotTol) || (can_down && a < -kPivotTol);
    };
    std::vector<std::pair<int, double>> candidates;
    double bound = kInfinity;
    for (int j = 0; j < total; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (state_[u] == VarState::kBasic || lower_[u] == upper_[u]) continue;
      const double a = column_dot(j, rho);
      if (!eligible(j, a)) continue;
      candidates.emplace_back(j, a);
      bound = std::min(bound, (std::abs(d[u]) + kDualTol) / std::abs(a));
    }
    if (candidates.empty()) {
      // Dual unbounded: primal infeasible, unless the factorization drifted.
      if (!checked_infeasible && pivots_since_reinvert_ > 0) {
        checked_infeasible = true;
        refactor();
        continue;
      }
      return DualOutcome::kInfeasible;
    }
    int q = -1;
    double q_abs = 0.0;
    double q_ratio = kInfinity;
    for (const auto& [j, a] : candidates) {
      const double ratio = std::abs(d[static_cast<std::size_t>(j)]) / std::abs(a);
      if (bland) {
        if (ratio < q_ratio - 1e-12 || (ratio <= q_ratio + 1e-12 && q < 0)) {
          q = j;
          q_ratio = ratio;
          q_abs = std::abs(a);
        }
        continue;
      }
      if (ratio <= bound && std::abs(a) > q_abs) {
        q = j;
        q_abs = std::abs(a);
        q_ratio = ratio;
      }
    }

    ftran_column(q, alpha);
    const double pivot_value = alpha[static_cast<std::size_t>(r)];
    if (std::abs(pivot_value) < kPivotTol) {
      refactor();
      continue;
    }
    const double change = (value_[lv] - target) / pivot_value;
    const auto qu = static_cast<std::size_t>(q);
    value_[qu] += change;
    for (int pos = 0; pos < m; ++pos) {
      const double a = alpha[static_cast<std::size_t>(pos)];
      if (a != 0.0) value_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(pos)])] -= change * a;
    }
    value_[lv] = target;
    state_[lv] = increase ? VarState::kAtLower : VarState::kAtUpper;
    basis_[static_cast<std::size_t>(r)] = q;
    state_[qu] = VarState::kBasic;
    pivot(r, alpha);
    ++iterations;
    degenerate_streak = q_ratio <= 1e-12 ? degenerate_streak + 1 : 0;
  }
}

LpResult SimplexSolver::solve() {
  const int n = num_structural();
  const int m = num_rows();
  const int total = num_total();

  recompute_basic_values();
  if (pivots_since_reinvert_ > 0 && row_residual() > kPrimalTol) refactor();

  std::vector<double> cost(static_cast<std::size_t>(m));
  std::vector<double> y(static_cast<std::size_t>(m));
  std::vector<double> alpha;
  const std::int64_t max_iterations = 50000 + 100LL * (n + m);
  std::int64_t iterations = 0;
  int degenerate_streak = 0;
  int refreshes = 0;
  bool verified = false;

  LpResult result;
  switch (dual_phase(iterations)) {
    case DualOutcome::kInfeasible:
      result.status = LpStatus::kInfeasible;
      result.iterations = iterations;
      result.values.assign(value_.begin(), value_.begin() + n);
      return result;
    case DualOutcome::kPrimalFeasible:
    case DualOutcome::kNotApplicable:
      break;
  }
  for (;;) {
    if (iterations >= max_iterations) throw std::runtime_error("simplex iteration limit exceeded");
    if (pivots_since_reinvert_ >= kReinvertInterval) {
      if (!reinvert()) reset_to_slack_basis();
      recompute_basic_values();
    }

    // Phase 1 prices the sum of bound violations of basic variables;
    // phase 2 prices the true objective.
    bool phase_one = false;
    for (int pos = 0; pos < m; ++pos) {
      const auto v = static_cast<std::size_t>(basis_[static_cast<std::size_t>(pos)]);
      double c = 0.0;
      if (value_[v] < lower_[v] - kPrimalTol) {
        c = -1.0;
      } else if (value_[v] > upper_[v] + kPrimalTol) {
        c = 1.0;
      }
      if (c != 0.0) phase_one = true;
      cost[static_cast<std::size_t>(pos)] = c;
    }
    if (!phase_one) {
      for (int pos = 0; pos < m; ++pos) {
        const int v = basis_[static_cast<std::size_t>(pos)];
        cost[static_cast<std::size_t>(pos)] = v < n ? program_.objective[static_cast<std::size_t>(v)] : 0.0;
      }
    }
    std::fill(y.begin(), y.end(), 0.0);
    for (int pos = 0; pos < m; ++pos) {
      const double c = cost[static_cast<std::size_t>(pos)];
      if (c == 0.0) continue;
      const double* row = inverse_.data() + static_cast<std::ptrdiff_t>(pos) * m;
      for (int k = 0; k < m; ++k) y[static_cast<std::size_t>(k)] += c * row[k];
    }

    // Pricing: Dantzig, or lowest index once a degenerate streak is seen.
    const bool bland = degenerate_streak > kDegenerateStreak;
    int entering = -1;
    double entering_dir = 0.0;
    double best_score = 0.0;
    for (int j = 0; j < total; ++j) {
      const auto u = static_cast<std::size_t>(j);
      const VarState s = state_[u];
      if (s == VarState::kBasic || lower_[u] == upper_[u]) continue;
      const double c = (!phase_one && j < n) ? program_.objective[u] : 0.0;
      const double d = c - column_dot(j, y);
      double dir = 0.0;
      if ((s == VarState::kAtLower || s == VarState::kFree) && d < -kDualTol) {
        dir = 1.0;
      } else if ((s == VarState::kAtUpper || s == VarState::kFree) && d > kDualTol) {
        dir = -1.0;
      }
      if (dir == 0.0) continue;
      if (bland) {
        entering = j;
        entering_dir = dir;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        entering = j;
        entering_dir = dir;
      }
    }

    if (entering < 0) {
      if (phase_one) {
        // No improving direction for the infeasibility sum: either truly
        // infeasible or the factorization drifted. Refresh once to decide.
        if (refreshes < 2 && pivots_since_reinvert_ > 0) {
          ++refreshes;
          if (!reinvert()) reset_to_slack_basis();
          recompute_basic_values();
          continue;
        }
        result.status = LpStatus::kInfeasible;
        break;
      }
      // Recompute the basic values (refactoring if they have drifted) and
      // price once more before declaring optimality.
      if (pivots_since_reinvert_ > 0 && !verified) {
        verified = true;
        recompute_basic_values();
        if (row_residual() > kPrimalTol) refactor();
        continue;
      }
      result.status = LpStatus::kOptimal;
      break;
    }

    ftran_column(entering, alpha);

    // Ratio test. delta[pos] is the rate of change of the basic variable at
    // pos per unit step of the entering variable.
    const auto eu = static_cast<std::size_t>(entering);
    double step = kInfinity;
    int leaving_pos = -1;
    bool leaving_to_upper = false;
    if (is_finite(lower_[eu]) && is_finite(upper_[eu])) step = upper_[eu] - lower_[eu];
    double best_pivot = 0.0;
    int best_var = total;
    for (int pos = 0; pos < m; ++pos) {
      const double a = alpha[static_cast<std::size_t>(pos)];
      if (std::abs(a) < kPivotTol) continue;
      const auto v = static_cast<std::size_t>(basis_[static_cast<std::size_t>(pos)]);
      const double delta = -entering_dir * a;
      const double x = value_[v];
      double ratio = kInfinity;
      bool to_upper = false;
      if (delta > 0.0) {
        if (x < lower_[v] - kPrimalTol) {
          ratio = (lower_[v] - x) / delta;
        } else if (is_finite(upper_[v])) {
          ratio = std::max(0.0, upper_[v] - x) / delta;
          to_upper = true;
        }
      } else {
        if (x > upper_[v] + kPrimalTol) {
          ratio = (x - upper_[v]) / -delta;
          to_upper = true;
        } else if (is_finite(lower_[v])) {
          ratio = std::max(0.0, x - lower_[v]) / -delta;
        }
      }
      if (ratio == kInfinity) continue;
      bool take = false;
      if (ratio < step - 1e-12) {
        take = true;
      } else if (ratio <= step + 1e-12 && leaving_pos >= 0) {
        take = bland ? static_cast<int>(v) < best_var : std::abs(a) > best_pivot;
      }
      if (take) {
        step = ratio;
        leaving_pos = pos;
        leaving_to_upper = to_upper;
        best_pivot = std::abs(a);
        best_var = static_cast<int>(v);
      }
    }

    if (step == kInfinity) {
      if (!phase_one) {
        result.status = LpStatus::kUnbounded;
        break;
      }
      if (!reinvert()) reset_to_slack_basis();
      recompute_basic_values();
      if (++refreshes > 5) throw std::runtime_error("simplex phase 1 found an unbounded ray");
      continue;
    }

    ++iterations;
    verified = false;
    degenerate_streak = step <= 1e-12 ? degenerate_streak + 1 : 0;
    value_[eu] += entering_dir * step;
    for (int pos = 0; pos < m; ++pos) {
      const double a = alpha[static_cast<std::size_t>(pos)];
      if (a != 0.0) value_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(pos)])] -= entering_dir * step * a;
    }
    if (leaving_pos < 0) {
      // Bound flip of the entering variable.
      const bool up = entering_dir > 0.0;
      state_[eu] = up ? VarState::kAtUpper : VarState::kAtLower;
      value_[eu] = up ? upper_[eu] : lower_[eu];
      continue;
    }
    const auto lv = static_cast<std::size_t>(basis_[static_cast<std::size_t>(leaving_pos)]);
    if (leaving_to_upper) {
      state_[lv] = VarState::kAtUpper;
      value_[lv] = upper_[lv];
    } else {
      state_[lv] = VarState::kAtLower;
      value_[lv] = lower_[lv];
    }
    basis_[static_cast<std::size_t>(leaving_pos)] = entering;
    state_[eu] = VarState::kBasic;
    pivot(leaving_pos, alpha);
  }

  result.iterations = iterations;
  result.values.assign(value_.begin(), value_.begin() + n);
  if (result.status == LpStatus::kOptimal) {
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += program_.objective[static_cast<std::size_t>(j)] * result.values[static_cast<std::size_t>(j)];
    result.objective = obj;
  }
  return result;
}

}  // namespace mvplc::lp
