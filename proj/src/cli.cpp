#include "mvplc/cli.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "mvplc/bnc.hpp"
#include "mvplc/file_util.hpp"
#include "mvplc/instance.hpp"
#include "mvplc/report.hpp"
#include "mvplc/simulate.hpp"
#include "mvplc/solution_io.hpp"
#include "mvplc/trace_io.hpp"

namespace mvplc {

namespace {

// Malformed input or inconsistent files.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Instance read_instance(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return instance_from_json(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Solution read_solution(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return solution_from_json(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

struct GenArgs {
  GeneratorParams params;
  std::string output;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  Instance instance;
  try {
    instance = generate_instance(a.params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.output.empty()) {
    out << instance_to_json(instance);
  } else {
    save_instance(instance, a.output);
    out << a.output << "\n";
  }
  return kExitOk;
}

struct SolveArgs {
  std::string input;
  std::string output;
  double time_limit = 0.0;  // 0 means the environment default
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  bool no_timing = false;
  bool no_depot_rows = false;
  Localization localization = Localization::kLiteral;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const Instance instance = read_instance(a.input);
  if (const auto problems = validate_instance(instance); !problems.empty()) {
    for (const Violation& v : problems) err << a.input << ": " << v.field << ": " << v.rule << "\n";
    return kExitUsage;
  }
  SolverConfig config;
  config.time_limit_s = a.time_limit > 0.0 ? a.time_limit : default_time_limit();
  config.node_limit = a.node_limit;
  config.model.depot_degree_rows = !a.no_depot_rows;
  config.model.localization = a.localization;
  Solution sol = solve(instance, config);
  if (a.no_timing) sol.stats.time_s = 0.0;

  if (a.output.empty()) {
    out << solution_to_json(sol);
  } else {
    save_solution(sol, a.output);
    out << fmt::format("{} status={} objective={} landmarks={} cuts={} nodes={}\n", a.output, to_string(sol.status),
                       sol.has_incumbent ? fmt::format("{:.6f}", sol.objective) : std::string("none"), sol.landmarks.size(),
                       sol.stats.subtour_cuts + sol.stats.path_cuts, sol.stats.nodes);
  }
  switch (sol.status) {
    case SolveStatus::kOptimal:
      return kExitOk;
    case SolveStatus::kInfeasible:
      return kExitInfeasible;
    case SolveStatus::kLimit:
      return kExitLimit;
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string instance;
  std::string solution;
  std::string output;
  std::string svg;
  SimConfig config;
  bool no_noise = false;
};

int cmd_simulate(SimulateArgs a, std::ostream& out) {
  const Instance instance = read_instance(a.instance);
  const Solution sol = read_solution(a.solution);
  a.config.inject_noise = !a.no_noise;
  SimTrace trace;
  try {
    trace = run_simulation(instance, sol, a.config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::string csv = trace_to_csv(trace);
  if (a.output.empty()) {
    out << csv;
  } else {
    write_text_file_atomic(a.output, csv);
  }
  if (!a.svg.empty()) write_text_file_atomic(a.svg, trace_to_svg(instance, sol, trace));

  // Summary goes to stdout only when the CSV does not.
  if (!a.output.empty()) {
    out << fmt::format("{} vehicles={} rows={}\n", a.output, trace.vehicles, trace.rows.size());
    if (trace.low_visibility_steps > 0) {
      int first = -1;
      for (const TraceRow& r : trace.rows) {
        if (r.n_landmarks < 2) {
          first = r.step;
          break;
        }
      }
      out << fmt::format("warning: {} vehicle-steps with fewer than 2 visible landmarks (first at step {})\n",
                         trace.low_visibility_steps, first);
    } else {
      out << "every step had at least 2 visible landmarks\n";
    }
  }
  return kExitOk;
}

struct ReportArgs {
  std::string dir;
  std::string output;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> skipped;
  const auto solutions = load_solution_directory(a.dir, &skipped);
  for (const std::string& s : skipped) err << "skipping " << s << ": not a solution file\n";
  if (solutions.empty()) {
    err << "no solution files in " << a.dir << "\n";
    return kExitUsage;
  }
  const std::string table = format_report(build_report(solutions));
  if (a.output.empty()) {
    out << table;
  } else {
    write_text_file_atomic(a.output, table);
    out << a.output << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-vehicle routing with landmark placement: generate, solve, simulate, report"};
  app.name("mvplc");
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
  gen_cmd->add_option("--depots", gen.params.n_depots, "Number of depots (vehicles)")->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--vertices", gen.params.n_vertices, "Depots plus targets")->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--grid", gen.params.grid, "Side of the square area")->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--lm-factor", gen.params.lm_factor, "Landmark candidates per vertex")->capture_default_str()->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--rs", gen.params.sensing_range, "Sensing range")->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--lm-cost", gen.params.lm_cost, "Cost per placed landmark")->capture_default_str()->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--seed", gen.params.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("-o,--output", gen.output, "Output file (default: stdout)");

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance to optimality");
  solve_cmd->add_option("instance", solve_args.input, "Instance JSON")->required();
  solve_cmd->add_option("-o,--output", solve_args.output, "Solution file (default: stdout)");
  solve_cmd->add_option("--time-limit", solve_args.time_limit, "Seconds (default: MVPLC_TIME_LIMIT or 600)")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--node-limit", solve_args.node_limit, "Maximum search nodes")->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--no-timing", solve_args.no_timing, "Write time_s = 0 for byte-identical output");
  solve_cmd->add_flag("--no-depot-rows", solve_args.no_depot_rows, "Omit the depot degree rows");
  const std::map<std::string, Localization> localizations{{"literal", Localization::kLiteral},
                                                          {"two-per-edge", Localization::kTwoPerEdge}};
  solve_cmd->add_option("--localization", solve_args.localization, "Landmark rule for return trips: literal or two-per-edge")
      ->transform(CLI::CheckedTransformer(localizations, CLI::ignore_case));

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate vehicles following a solution");
  sim_cmd->add_option("instance", sim.instance, "Instance JSON")->required();
  sim_cmd->add_option("solution", sim.solution, "Solution JSON")->required();
  sim_cmd->add_option("-o,--output", sim.output, "Trace CSV (default: stdout)");
  sim_cmd->add_option("--svg", sim.svg, "Also write trajectory and error plots");
  sim_cmd->add_option("--gain", sim.config.gain, "Heading controller gain")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--steps", sim.config.steps, "Number of steps")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.config.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--dt", sim.config.dt, "Step length in seconds")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--speed", sim.config.speed, "Vehicle speed")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--omega-max", sim.config.omega_max, "Turn rate limit")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--switch-radius", sim.config.switch_radius, "Waypoint switch radius")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--sigma-v", sim.config.sigma_v, "Speed noise std")->capture_default_str()->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--sigma-omega", sim.config.sigma_omega, "Turn rate noise std")->capture_default_str()->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--sigma-bearing", sim.config.sigma_bearing, "Bearing noise std")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_flag("--no-noise", sim.no_noise, "Draw no noise (the filter keeps its noise model)");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Summarize a directory of solutions");
  report_cmd->add_option("dir", report.dir, "Directory of solution JSON files")->required();
  report_cmd->add_option("-o,--output", report.output, "Write the table to a file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*solve_cmd) return cmd_solve(solve_args, out, err);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*report_cmd) return cmd_report(report, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace mvplc
