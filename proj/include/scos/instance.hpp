#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scos/cdc.hpp"
#include "scos/cost.hpp"
#include "scos/milp.hpp"
#include "scos/physics.hpp"
#include "scos/scenario.hpp"

namespace scos {

struct Station {
    std::string name;
    double a = 0;
    double b = 0;
};

struct BaseStation {
    std::string name;
    double a = 0;
    double b = 0;
    double h = 0;
    long long servers = 1;       // q_f
    double server_cpu_rate = 0;  // informational, offload cost does not use it
};

struct Phase2Options {
    // Charge the stage-2 hover threshold only when the station offloads
    // (later stages always gate it).
    bool gate_stage2_threshold = false;
    double hover_multiplier = 1.0;
    // Upper bound 0 on every local-copy variable.
    bool force_no_local = false;
};

struct NetworkInstance {
    std::string name;
    std::vector<Station> stations;
    std::vector<UavType> uav_types; // ascending battery, last one is type X
    std::vector<BaseStation> base_stations;
    Environment env;
    CostCoefficients costs;
    CodeSplit split;
    ScenarioTree tree; // tree.z is the stage count
    Phase2Options phase2;
    // UAV type id per station for standalone phase-2 runs; empty means type X.
    std::vector<int> phase2_types;
    SolveOptions solver;
    std::uint64_t seed = 0; // every random draw of a run derives from this
};

// Throws InputError listing every problem found.
void validate_instance(const NetworkInstance& inst);

int num_slots(const NetworkInstance& inst);
// Index of the type with the given id, throws InputError if unknown.
std::size_t type_index(const NetworkInstance& inst, int id);
const UavType& largest_type(const NetworkInstance& inst);

// [slot][station] -> index into uav_types
using TypeAssignment = std::vector<std::vector<int>>;
TypeAssignment default_phase2_types(const NetworkInstance& inst);
TypeAssignment uniform_types(const NetworkInstance& inst, int type_index);

// Copy of the instance restricted to one time slot.
NetworkInstance slot_instance(const NetworkInstance& inst, int slot);

// Weather scenarios of a slot; an empty set means one calm scenario.
std::vector<WeatherScenario> weather_set(const NetworkInstance& inst, int slot);

Position3D uav_position(const NetworkInstance& inst, std::size_t station, const UavType& uav);
Position3D bs_position(const BaseStation& bs);

} // namespace scos
