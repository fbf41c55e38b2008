#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scos/instance.hpp"
#include "scos/milp.hpp"

namespace scos {

// ---- phase 1: UAV type reservation under weather uncertainty ----

struct Phase1Layout {
    std::vector<std::vector<std::vector<int>>> reserve;  // [slot][station][type]
    std::vector<std::vector<std::vector<int>>> recourse; // [slot][weather][station]
};

struct Phase1Model {
    IPModel model;
    Phase1Layout layout;
};

struct Phase1Plan {
    std::vector<std::vector<int>> reserved_type;             // [slot][station] type id
    std::vector<std::vector<std::vector<int>>> recourse;     // [slot][weather][station] 0/1
    double reservation_cost = 0;
    double expected_recourse_cost = 0;
    double expected_cost = 0;
    SolveStatus status = SolveStatus::optimal;
    long long nodes = 0;
};

Phase1Model build_phase1(const NetworkInstance& inst);
Phase1Plan solve_phase1(const NetworkInstance& inst);

// Phase-2 type index per station of one slot in a weather scenario: the
// reserved type, or type X when the station crashes and the recourse UAV flies.
std::vector<int> phase2_types_for_weather(const NetworkInstance& inst, const Phase1Plan& plan,
                                          int slot, int weather);

// ---- phase 2: coded task allocation ----

struct StationCosts {
    double local = 0;     // per local copy
    std::vector<double> offload; // per offloaded copy, per BS
    double threshold = 0; // hover threshold cost (already scaled by the hover multiplier)
    double decode = 0;
};

// Per-copy costs for a station of the given type at demand n.
StationCosts station_costs(const NetworkInstance& inst, std::size_t station, const UavType& uav,
                           long long n);

struct StageDecision {
    long long local = 0;
    std::vector<long long> offload; // per BS
    std::vector<int> threshold;     // per BS
    int exposed = 0;                // offloaded at an earlier stage (stage >= 3 only)
};

struct Phase2Plan {
    std::string formulation; // sip | dip | evf | random
    SolveStatus status = SolveStatus::optimal;
    long long nodes = 0;
    int z = 2;
    TypeAssignment types;
    std::vector<std::vector<int>> subscriptions; // [slot][bs]
    // [slot][stage - 2][path prefix id][station]
    std::vector<std::vector<std::vector<std::vector<StageDecision>>>> decisions;
    // For dip plans: the deterministic demand and shortfall used, [slot][station]
    std::vector<std::vector<long long>> dip_demand;
    std::vector<std::vector<double>> dip_shortfall;
    double expected_cost = 0;
    std::vector<double> stage_costs; // [0] = stage 1 (subscriptions), [i] = stage i + 1
    std::string note;
    bool optimal() const { return status == SolveStatus::optimal; }
};

struct Phase2Ids {
    int local = -1;
    std::vector<int> offload;
    std::vector<int> threshold;
    int exposed = -1;
};

struct Phase2Layout {
    int z = 2;
    std::vector<std::vector<int>> subscribe; // [slot][bs]
    std::vector<std::vector<std::vector<std::vector<Phase2Ids>>>> ids; // like Phase2Plan::decisions
    // objective accounting: stage (1..z) of each variable's objective term and
    // the constant part charged at each stage
    std::vector<int> var_stage;
    std::vector<double> stage_constant; // index stage - 1
};

struct Phase2Model {
    IPModel model;
    Phase2Layout layout;
};

double big_m(const NetworkInstance& inst);

// Deterministic problem for one slot of the instance (uses its stations and BSs).
Phase2Model build_phase2_dip(const NetworkInstance& inst, const TypeAssignment& types,
                             const std::vector<std::vector<long long>>& demand,
                             const std::vector<std::vector<double>>& shortfall);
Phase2Model build_phase2_sip(const NetworkInstance& inst, const TypeAssignment& types);

enum class Formulation { dip, sip };

// dip uses the expected-value demand and shortfall of the tree.
Phase2Plan solve_phase2(const NetworkInstance& inst, const TypeAssignment& types, Formulation f);
Phase2Plan solve_phase2(const NetworkInstance& inst, Formulation f);

Phase2Plan decode_phase2(const Phase2Model& built, const Solution& sol, const std::string& formulation);

// Expected-value inputs used by dip and evf.
std::vector<std::vector<long long>> mean_demand(const ScenarioTree& tree);
std::vector<std::vector<double>> mean_shortfall(const ScenarioTree& tree);

Phase2Plan evf_plan(const NetworkInstance& inst, const TypeAssignment& types);
Phase2Plan random_plan(const NetworkInstance& inst, const TypeAssignment& types, std::uint64_t seed);

// Assignment of the SIP variables described by a plan (for feasibility checks).
std::vector<double> plan_assignment(const Phase2Layout& layout, const Phase2Plan& plan, int num_vars);

// Every broken constraint of the SIP reading on every path; empty when feasible.
std::vector<std::string> check_plan(const NetworkInstance& inst, const Phase2Plan& plan);

} // namespace scos
