#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "beamsched/scenario.hpp"

namespace beamsched {

// Scenario documents:
//   {"id"?, "targets": [...], "K", "beta", "horizon", "tau", "relax_probability_order"?}
// Each target:
//   {"tag"?, "modes": [{"label", "F" | "builder": "cv"|"ct", "q", "omega_deg"|"omega_rad"?,
//                       "Ts"?, "Q_base"?, "Q"?}],
//    "U": {"u0", "u1"}, "H", "R", "d", "h", "P0" | "P0_rule"}
// Matrices are row-major nested arrays; a bare number is a 1x1 matrix.
// P0_rule is {"uniform_scalar": [lo, hi]} or {"gram_uniform01": L}.
//
// Parsing only checks shape and types; call validate() for model invariants.

ScenarioSpec parse_scenario(const nlohmann::json& doc);
ScenarioSpec parse_scenario_text(const std::string& text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const ScenarioSpec& spec);
nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace beamsched
