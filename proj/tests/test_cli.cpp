#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mvplc/cli.hpp"
#include "mvplc/file_util.hpp"
#include "mvplc/instance.hpp"
#include "mvplc/random.hpp"
#include "mvplc/report.hpp"
#include "mvplc/solution_io.hpp"

using namespace mvplc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("mvplc_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& file) const { return (dir / file).string(); }
};

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("gen writes the requested instance") {
  Scratch s("gen");
  const Run r = run({"gen", "--depots", "2", "--vertices", "20", "--grid", "100", "--lm-factor", "5", "--rs", "35", "--seed", "1", "-o", s / "a.json"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out == s / "a.json" + "\n");
  const Instance inst = load_instance(s / "a.json");
  CHECK(inst.num_depots() == 2);
  CHECK(inst.num_targets() == 18);
  CHECK(inst.num_landmarks() == 100);

  REQUIRE(run({"gen", "--depots", "2", "--vertices", "20", "--seed", "1", "-o", s / "b.json"}).code == kExitOk);
  CHECK(read_text_file(s / "a.json") == read_text_file(s / "b.json"));

  CHECK(run({"gen", "--vertices", "2", "--depots", "2"}).code == kExitUsage);
  CHECK(run({"gen", "--depots", "x"}).code == kExitUsage);
  CHECK(run({"gen", "--grid", "-3"}).code == kExitUsage);
  CHECK(run({"gen", "--seed", "1", "-o", s / "missing_dir/a.json"}).code == kExitIo);
  CHECK(run({}).code == kExitUsage);
}

TEST_CASE("solve exit codes and output") {
  Scratch s("solve");
  Instance tiny;
  tiny.depots = {{0.0, 0.0}};
  tiny.targets = {{10.0, 0.0}};
  tiny.landmark_candidates = {{5.0, 5.0}, {5.0, -5.0}, {0.0, 8.0}, {10.0, -8.0}};
  save_instance(tiny, s / "tiny.json");
  Run r = run({"solve", s / "tiny.json", "-o", s / "tiny.sol.json", "--no-timing"});
  REQUIRE(r.code == kExitOk);
  const Solution sol = load_solution(s / "tiny.sol.json");
  CHECK(sol.status == SolveStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(24.0));
  CHECK(sol.stats.time_s == 0.0);

  r = run({"solve", s / "tiny.json", "--localization", "two-per-edge"});
  REQUIRE(r.code == kExitOk);
  CHECK(solution_from_json(r.out).objective == doctest::Approx(22.0));
  CHECK(run({"solve", s / "tiny.json", "--localization", "bogus"}).code == kExitUsage);

  Instance no_lm = tiny;
  no_lm.landmark_candidates.clear();
  save_instance(no_lm, s / "nolm.json");
  r = run({"solve", s / "nolm.json", "-o", s / "nolm.sol.json"});
  CHECK(r.code == kExitInfeasible);
  CHECK(load_solution(s / "nolm.sol.json").status == SolveStatus::kInfeasible);

  GeneratorParams gp{.n_depots = 2, .n_vertices = 14, .seed = 2};
  save_instance(generate_instance(gp), s / "mid.json");
  CHECK(run({"solve", s / "mid.json", "--node-limit", "1", "-o", s / "mid.sol.json"}).code == kExitLimit);

  write_text_file_atomic(s / "bad.json", "{\"depots\": 3}");
  r = run({"solve", s / "bad.json"});
  CHECK(r.code == kExitUsage);
  CHECK_FALSE(r.err.empty());
  CHECK(run({"solve", s / "nothere.json"}).code == kExitIo);
  CHECK(run({"solve"}).code == kExitUsage);
}

TEST_CASE("gen, solve and simulate pipeline is deterministic") {
  Scratch s("pipeline");
  const std::vector<std::string> gen = {"gen", "--depots", "2", "--vertices", "12", "--seed", "3", "-o"};
  auto with = [](std::vector<std::string> v, const std::string& extra) {
    v.push_back(extra);
    return v;
  };
  REQUIRE(run(with(gen, s / "a.json")).code == kExitOk);
  REQUIRE(run(with(gen, s / "b.json")).code == kExitOk);
  CHECK(read_text_file(s / "a.json") == read_text_file(s / "b.json"));

  REQUIRE(run({"solve", s / "a.json", "--no-timing", "-o", s / "a.sol.json"}).code == kExitOk);
  REQUIRE(run({"solve", s / "a.json", "--no-timing", "-o", s / "b.sol.json"}).code == kExitOk);
  CHECK(read_text_file(s / "a.sol.json") == read_text_file(s / "b.sol.json"));

  const Solution sol = load_solution(s / "a.sol.json");
  int vehicles = 0;
  for (const auto& r : sol.routes) vehicles += r.empty() ? 0 : 1;

  Run r = run({"simulate", s / "a.json", s / "a.sol.json", "--gain", "2.0", "--steps", "300", "--seed", "9", "-o", s / "t1.csv", "--svg", s / "t.svg"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("rows=" + std::to_string(300 * vehicles)) != std::string::npos);
  REQUIRE(run({"simulate", s / "a.json", s / "a.sol.json", "--gain", "2.0", "--steps", "300", "--seed", "9", "-o", s / "t2.csv"}).code == kExitOk);
  const std::string csv = read_text_file(s / "t1.csv");
  CHECK(csv == read_text_file(s / "t2.csv"));
  CHECK(count_lines(csv) == 1 + 300 * vehicles);
  CHECK(read_text_file(s / "t.svg").rfind("<svg", 0) == 0);

  r = run({"simulate", s / "a.json", s / "a.sol.json", "--steps", "1"});
  REQUIRE(r.code == kExitOk);
  CHECK(count_lines(r.out) == 1 + vehicles);
}

TEST_CASE("simulate rejects mismatched files") {
  Scratch s("mismatch");
  REQUIRE(run({"gen", "--depots", "2", "--vertices", "8", "--seed", "1", "-o", s / "a.json"}).code == kExitOk);
  REQUIRE(run({"gen", "--depots", "3", "--vertices", "9", "--seed", "2", "-o", s / "b.json"}).code == kExitOk);
  REQUIRE(run({"solve", s / "a.json", "-o", s / "a.sol.json"}).code == kExitOk);
  CHECK(run({"simulate", s / "b.json", s / "a.sol.json", "--steps", "5"}).code == kExitUsage);
  CHECK(run({"simulate", s / "a.json", s / "a.json", "--steps", "5"}).code == kExitUsage);
  CHECK(run({"simulate", s / "a.json", s / "a.sol.json", "--steps", "0"}).code == kExitUsage);
}

TEST_CASE("report groups and averages") {
  Scratch s("report");
  CHECK(run({"report", s.dir.string()}).code == kExitUsage);
  CHECK(run({"report", s / "nothere"}).code == kExitIo);

  // Synthetic solutions; the expected means are accumulated separately here.
  Rng rng(21);
  struct Acc {
    double cuts = 0, lms = 0, time = 0;
    int n = 0;
  };
  std::map<std::pair<int, int>, Acc> expected;
  int unsolved = 0;
  for (int f = 0; f < 30; ++f) {
    Solution sol;
    sol.n_depots = 2 + static_cast<int>(rng.below(2));
    sol.n_vertices = rng.below(2) ? 20 : 25;
    sol.status = f % 7 == 6 ? SolveStatus::kLimit : SolveStatus::kOptimal;
    sol.has_incumbent = sol.status == SolveStatus::kOptimal;
    sol.objective = 100.0;
    sol.routes.assign(static_cast<std::size_t>(sol.n_depots), {});
    sol.landmarks.resize(rng.below(12));
    sol.stats.subtour_cuts = static_cast<std::int64_t>(rng.below(40));
    sol.stats.path_cuts = static_cast<std::int64_t>(rng.below(10));
    sol.stats.time_s = rng.uniform(0.0, 3.0);
    save_solution(sol, s / ("s" + std::to_string(f) + ".json"));
    if (sol.status != SolveStatus::kOptimal) {
      ++unsolved;
      continue;
    }
    Acc& a = expected[{sol.n_depots, sol.n_vertices}];
    a.cuts += static_cast<double>(sol.stats.subtour_cuts + sol.stats.path_cuts);
    a.lms += static_cast<double>(sol.landmarks.size());
    a.time += sol.stats.time_s;
    ++a.n;
  }
  write_text_file_atomic(s / "notes.json", "[1, 2]");

  std::vector<std::string> skipped;
  const Report rep = build_report(load_solution_directory(s.dir.string(), &skipped));
  CHECK(skipped == std::vector<std::string>{"notes.json"});
  REQUIRE(rep.rows.size() == expected.size());
  auto it = expected.begin();
  for (const ReportRow& row : rep.rows) {
    CHECK(row.vehicles == it->first.first);
    CHECK(row.n_vertices == it->first.second);
    CHECK(row.count == it->second.n);
    CHECK(row.mean_user_cuts == doctest::Approx(it->second.cuts / it->second.n));
    CHECK(row.mean_landmarks == doctest::Approx(it->second.lms / it->second.n));
    CHECK(row.mean_time_s == doctest::Approx(it->second.time / it->second.n));
    ++it;
  }
  CHECK(static_cast<int>(rep.unsolved.size()) == unsolved);

  const Run r = run({"report", s.dir.string()});
  CHECK(r.code == kExitOk);
  CHECK(count_lines(r.out) == 1 + static_cast<int>(expected.size()) + 1 + unsolved);
  CHECK(r.out.find("unsolved: " + std::to_string(unsolved)) != std::string::npos);
  CHECK(run({"report", s.dir.string(), "-o", s / "table.txt"}).code == kExitOk);
  CHECK(read_text_file(s / "table.txt") == r.out);
}
