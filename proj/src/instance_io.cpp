#include <set>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "mvplc/file_util.hpp"
#include "mvplc/instance.hpp"

namespace mvplc {

using nlohmann::json;

namespace {

json points_to_json(const std::vector<Point>& points) {
  json out = json::array();
  for (const Point& p : points) out.push_back(json::array({p.x, p.y}));
  return out;
}

std::vector<Point> points_from_json(const json& value, const char* key) {
  if (!value.is_array()) throw std::invalid_argument(std::string("'") + key + "' must be an array");
  std::vector<Point> out;
  out.reserve(value.size());
  for (const json& item : value) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number()) {
      throw std::invalid_argument(std::string("'") + key + "' entries must be [x, y] number pairs");
    }
    out.push_back({item[0].get<double>(), item[1].get<double>()});
  }
  return out;
}

}  // namespace

std::string instance_to_json(const Instance& instance) {
  json doc;
  doc["depots"] = points_to_json(instance.depots);
  doc["targets"] = points_to_json(instance.targets);
  doc["landmarks"] = points_to_json(instance.landmark_candidates);
  doc["sensing_range"] = instance.sensing_range;
  doc["lm_cost"] = instance.lm_cost;
  doc["seed"] = instance.seed;
  return doc.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("instance is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("instance must be a JSON object");

  static const std::set<std::string> known = {"depots", "targets", "landmarks", "sensing_range", "lm_cost", "seed"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw std::invalid_argument("unknown key '" + key + "' in instance");
  }
  for (const char* key : {"depots", "targets", "landmarks", "sensing_range"}) {
    if (!doc.contains(key)) throw std::invalid_argument(std::string("missing key '") + key + "' in instance");
  }

  Instance instance;
  instance.depots = points_from_json(doc["depots"], "depots");
  instance.targets = points_from_json(doc["targets"], "targets");
  instance.landmark_candidates = points_from_json(doc["landmarks"], "landmarks");
  if (!doc["sensing_range"].is_number()) throw std::invalid_argument("'sensing_range' must be a number");
  instance.sensing_range = doc["sensing_range"].get<double>();
  if (doc.contains("lm_cost")) {
    if (!doc["lm_cost"].is_number()) throw std::invalid_argument("'lm_cost' must be a number");
    instance.lm_cost = doc["lm_cost"].get<double>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) throw std::invalid_argument("'seed' must be an integer");
    instance.seed = doc["seed"].get<std::int64_t>();
  }
  return instance;
}

Instance load_instance(const std::string& path) { return instance_from_json(read_text_file(path)); }

void save_instance(const Instance& instance, const std::string& path) {
  write_text_file_atomic(path, instance_to_json(instance));
}

}  // namespace mvplc
