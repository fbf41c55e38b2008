#pragma once

#include <string>

#include "json.hpp"
#include "scos/instance.hpp"
#include "scos/planner.hpp"
#include "scos/scenario.hpp"

namespace scos {

inline constexpr int kSchemaVersion = 1;

// Instance config. A relative `scenario_file` resolves against base_dir.
NetworkInstance instance_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
NetworkInstance load_instance(const std::string& path);

// num_stations < 0 infers the count from the first scenario vector.
ScenarioTree tree_from_json(const nlohmann::json& j, int num_stations = -1);
ScenarioTree load_tree(const std::string& path, int num_stations = -1);
nlohmann::json tree_to_json(const ScenarioTree& tree);

nlohmann::json phase1_plan_json(const NetworkInstance& inst, const Phase1Plan& plan);
nlohmann::json phase2_plan_json(const NetworkInstance& inst, const Phase2Plan& plan);
nlohmann::json histogram_json(const DemandHistogram& h);

// Numbers emitted to files go through round_sig12.
nlohmann::json emit_number(double v);

std::string read_file(const std::string& path);
// temp file in the same directory, then rename
void write_atomic(const std::string& path, const std::string& content);

} // namespace scos
