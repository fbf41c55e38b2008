#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scos/instance.hpp"
#include "scos/planner.hpp"

namespace scos {

// Expected cost per stage of a plan, by enumerating every path of the tree.
// Index 0 is stage 1 (subscriptions).
std::vector<double> exact_stage_costs(const NetworkInstance& inst, const Phase2Plan& plan);
double exact_expected_cost(const NetworkInstance& inst, const Phase2Plan& plan);

struct EvaluationReport {
    double mean_cost = 0;
    double std_error = 0;
    long long n_samples = 0;
    std::vector<double> stage_costs; // sample means, sum to mean_cost
    std::uint64_t seed = 0;
};

// Monte Carlo over paths drawn with the branch probabilities.
EvaluationReport evaluate_plan(const Phase2Plan& plan, const NetworkInstance& inst, long long n_samples,
                               std::uint64_t seed);

inline const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> p = {"penalty_C_p", "weather_prob", "z", "hover_multiplier",
                                               "shortfall_prob", "split_s", "uav_type", "offload_price"};
    return p;
}

struct SweepPoint {
    double value = 0;
    std::string status; // optimal | node_limit | skipped
    double objective = 0;
    std::vector<double> stage_costs; // phase-2 sweeps only
    std::string summary;
};

struct SweepResult {
    std::string parameter;
    std::vector<double> grid;
    std::vector<SweepPoint> points;
};

// Instance modified for one grid point (exposed for tests).
NetworkInstance apply_sweep_value(const NetworkInstance& inst, const std::string& parameter, double value);

SweepResult sweep(const NetworkInstance& inst, const std::string& parameter, const std::vector<double>& grid);
std::string sweep_csv(const SweepResult& r);

struct CompareRow {
    double offload_price = 0;
    double phase1_cost = 0;
    double sip_cost = 0;
    double evf_cost = 0;
    double random_cost = 0;     // mean over seeds
    double random_std_error = 0;
    double sip_exact = 0;       // SIP plan re-evaluated by tree enumeration
};

// Exact expectations of the three plans; phase-2 types come from the phase-1 plan
// with every station on its reserved type.
CompareRow compare(const NetworkInstance& inst, const std::vector<std::uint64_t>& seeds);
// One row per offload price (per-copy service fee).
std::vector<CompareRow> compare_sweep(const NetworkInstance& inst, const std::vector<double>& prices,
                                      const std::vector<std::uint64_t>& seeds);
std::string compare_csv(const std::vector<CompareRow>& rows);

} // namespace scos
