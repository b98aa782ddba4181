#pragma once

#include <span>
#include <string>
#include <vector>

#include "mvplc/bnc.hpp"

namespace mvplc {

struct NamedSolution {
  std::string name;
  Solution solution;
};

// Means over the solved (optimal) instances of one (depot count, |V|) group.
struct ReportRow {
  int vehicles = 0;
  int n_vertices = 0;
  double mean_user_cuts = 0.0;  // subtour + path rows
  double mean_landmarks = 0.0;
  double mean_time_s = 0.0;
  int count = 0;
};

struct UnsolvedEntry {
  std::string name;
  int vehicles = 0;
  int n_vertices = 0;
  SolveStatus status = SolveStatus::kLimit;
};

struct Report {
  std::vector<ReportRow> rows;  // sorted by (vehicles, n_vertices)
  std::vector<UnsolvedEntry> unsolved;
};

Report build_report(std::span<const NamedSolution> solutions);

// Fixed-width table: vehicles, |V|, cuts, landmarks, time, count; then one
// line per unsolved instance.
std::string format_report(const Report& report);

// Loads every *.json file in a directory (sorted by name) that parses as a
// solution. Files that do not are listed in `skipped`. Throws
// std::runtime_error if the directory cannot be read.
std::vector<NamedSolution> load_solution_directory(const std::string& dir, std::vector<std::string>* skipped = nullptr);

}  // namespace mvplc
