#pragma once

#include <vector>

#include "scos/cdc.hpp"
#include "scos/physics.hpp"

namespace scos {

struct CostCoefficients {
    double alpha1 = 0.001;  // reservation, $/mAh
    double alpha2 = 0.0015; // on-demand, $/mAh
    double alpha3 = 0.5;    // $/s of UAV compute/transmit time
    double alpha4 = 0.5;    // $/J of receive energy
    double alpha5 = 0.0001; // $/(W s) of hovering
    double service = 0.05;  // per offloaded copy
    double subscription = 0; // per subscribed BS
    double crash_penalty = 0;
    double terminal_penalty = 0;
};

void validate_coefficients(const CostCoefficients& c);

double reservation_cost(const UavType& uav, const CostCoefficients& c);

// `types` is the full fleet; uav must hold the unique largest battery.
double on_demand_cost(const UavType& uav, const std::vector<UavType>& types,
                      const CostCoefficients& c);

double local_copy_cost(const UavType& uav, const Environment& env, long long n,
                       const CodeSplit& split, const CostCoefficients& c);

double offload_copy_cost(const UavType& uav, const Environment& env, long long n,
                         const CodeSplit& split, const Position3D& uav_pos,
                         const Position3D& bs_pos, const CostCoefficients& c);

// Same as above with precomputed rates (both directions).
double offload_copy_cost_at_rate(const UavType& uav, const Environment& env, long long n,
                                 const CodeSplit& split, double rate_to, double rate_from,
                                 const CostCoefficients& c);

// Waiting budget is the time to compute all k copies locally, one after another.
double hover_threshold_time(const UavType& uav, const Environment& env, long long n,
                            const CodeSplit& split);

double hover_threshold_cost(const UavType& uav, const Environment& env, long long n,
                            const CodeSplit& split, const CostCoefficients& c);

double decode_cost(const UavType& uav, const Environment& env, long long n,
                   const CodeSplit& split, const CostCoefficients& c);

// Round to 12 significant digits; used for every coefficient that is emitted.
double round_sig12(double v);

} // namespace scos
