#pragma once

#include <string>

#include "mvplc/bnc.hpp"

namespace mvplc {

// Solution JSON. "objective" is null when there is no incumbent. Parsing
// throws std::invalid_argument on malformed input.
std::string solution_to_json(const Solution& solution);
Solution solution_from_json(const std::string& text);
Solution load_solution(const std::string& path);
void save_solution(const Solution& solution, const std::string& path);

}  // namespace mvplc
