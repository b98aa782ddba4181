#include "mvplc/solution_io.hpp"

#include <set>
#include <stdexcept>

#include "json.hpp"
#include "mvplc/file_util.hpp"

namespace mvplc {

using nlohmann::json;

std::string solution_to_json(const Solution& solution) {
  json doc;
  doc["status"] = to_string(solution.status);
  doc["objective"] = solution.has_incumbent ? json(solution.objective) : json(nullptr);
  doc["routes"] = solution.routes;
  doc["landmarks"] = solution.landmarks;
  doc["stats"] = {{"subtour_cuts", solution.stats.subtour_cuts},
                  {"path_cuts", solution.stats.path_cuts},
                  {"nodes", solution.stats.nodes},
                  {"time_s", solution.stats.time_s}};
  doc["n_depots"] = solution.n_depots;
  doc["n_vertices"] = solution.n_vertices;
  return doc.dump(2) + "\n";
}

namespace {

template <typename T>
T field(const json& obj, const char* key, const char* what) {
  if (!obj.contains(key)) throw std::invalid_argument(std::string("missing key '") + key + "' in " + what);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("bad value for '") + key + "' in " + what);
  }
}

}  // namespace

Solution solution_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("solution is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("solution must be a JSON object");
  static const std::set<std::string> known = {"status", "objective", "routes", "landmarks", "stats", "n_depots", "n_vertices"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw std::invalid_argument("unknown key '" + key + "' in solution");
  }

  Solution sol;
  const auto status = parse_status(field<std::string>(doc, "status", "solution"));
  if (!status) throw std::invalid_argument("unknown solution status");
  sol.status = *status;
  if (!doc.contains("objective")) throw std::invalid_argument("missing key 'objective' in solution");
  if (doc["objective"].is_null()) {
    sol.has_incumbent = false;
  } else if (doc["objective"].is_number()) {
    sol.has_incumbent = true;
    sol.objective = doc["objective"].get<double>();
  } else {
    throw std::invalid_argument("'objective' must be a number or null");
  }
  sol.routes = field<std::vector<std::vector<int>>>(doc, "routes", "solution");
  sol.landmarks = field<std::vector<int>>(doc, "landmarks", "solution");
  const json stats = field<json>(doc, "stats", "solution");
  if (!stats.is_object()) throw std::invalid_argument("'stats' must be an object");
  sol.stats.subtour_cuts = field<std::int64_t>(stats, "subtour_cuts", "stats");
  sol.stats.path_cuts = field<std::int64_t>(stats, "path_cuts", "stats");
  sol.stats.nodes = field<std::int64_t>(stats, "nodes", "stats");
  sol.stats.time_s = field<double>(stats, "time_s", "stats");
  if (doc.contains("n_depots")) sol.n_depots = field<int>(doc, "n_depots", "solution");
  if (doc.contains("n_vertices")) sol.n_vertices = field<int>(doc, "n_vertices", "solution");
  return sol;
}

Solution load_solution(const std::string& path) { return solution_from_json(read_text_file(path)); }

void save_solution(const Solution& solution, const std::string& path) {
  write_text_file_atomic(path, solution_to_json(solution));
}

}  // namespace mvplc
