#pragma once

#include <string>

#include "pwe/scenario.hpp"

namespace pwe {

// Parses a scenario file. Throws std::runtime_error naming the file and the
// offending field on parse problems; semantic checks live in
// validate_scenario and are not run here.
Scenario load_scenario(const std::string& path);

Scenario scenario_from_json_text(const std::string& text, const std::string& origin);

}  // namespace pwe
