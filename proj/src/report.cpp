#include "mvplc/report.hpp"

#include <algorithm>
#include <filesystem>
#include <iterator>
#include <map>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

#include "mvplc/solution_io.hpp"

namespace mvplc {

Report build_report(std::span<const NamedSolution> solutions) {
  struct Sums {
    double cuts = 0.0;
    double landmarks = 0.0;
    double time_s = 0.0;
    int count = 0;
  };
  std::map<std::pair<int, int>, Sums> groups;
  Report report;
  for (const auto& [name, sol] : solutions) {
    if (sol.status != SolveStatus::kOptimal) {
      report.unsolved.push_back({name, sol.n_depots, sol.n_vertices, sol.status});
      continue;
    }
    Sums& s = groups[{sol.n_depots, sol.n_vertices}];
    s.cuts += static_cast<double>(sol.stats.subtour_cuts + sol.stats.path_cuts);
    s.landmarks += static_cast<double>(sol.landmarks.size());
    s.time_s += sol.stats.time_s;
    ++s.count;
  }
  for (const auto& [key, s] : groups) {
    const double n = s.count;
    report.rows.push_back({key.first, key.second, s.cuts / n, s.landmarks / n, s.time_s / n, s.count});
  }
  std::sort(report.unsolved.begin(), report.unsolved.end(), [](const UnsolvedEntry& a, const UnsolvedEntry& b) {
    return std::tie(a.vehicles, a.n_vertices, a.name) < std::tie(b.vehicles, b.n_vertices, b.name);
  });
  return report;
}

std::string format_report(const Report& report) {
  std::string out;
  auto it = std::back_inserter(out);
  fmt::format_to(it, "{:>8} {:>4} {:>10} {:>10} {:>10} {:>6}\n", "vehicles", "|V|", "cuts", "landmarks", "time_s", "count");
  for (const ReportRow& r : report.rows) {
    fmt::format_to(it, "{:>8} {:>4} {:>10.2f} {:>10.2f} {:>10.3f} {:>6}\n", r.vehicles, r.n_vertices, r.mean_user_cuts, r.mean_landmarks,
                   r.mean_time_s, r.count);
  }
  if (!report.unsolved.empty()) {
    fmt::format_to(it, "unsolved: {}\n", report.unsolved.size());
    for (const UnsolvedEntry& u : report.unsolved) {
      fmt::format_to(it, "  {} vehicles={} |V|={} status={}\n", u.name, u.vehicles, u.n_vertices, to_string(u.status));
    }
  }
  return out;
}

std::vector<NamedSolution> load_solution_directory(const std::string& dir, std::vector<std::string>* skipped) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw std::runtime_error("not a readable directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) throw std::runtime_error("cannot list directory " + dir + ": " + ec.message());
  std::sort(files.begin(), files.end());

  std::vector<NamedSolution> out;
  for (const fs::path& path : files) {
    try {
      out.push_back({path.filename().string(), load_solution(path.string())});
    } catch (const std::invalid_argument&) {
      if (skipped) skipped->push_back(path.filename().string());
    }
  }
  return out;
}

}  // namespace mvplc
