#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace scos {

struct WeatherScenario {
    std::vector<int> g; // 1 = strong wind at the station (reserved small UAV crashes)
    double p = 0;
};

struct DemandScenario {
    std::vector<long long> d; // matrix dimension per station
    double p = 0;
};

struct ShortfallScenario {
    std::vector<int> f;       // 1 = copies missing after the previous stage
    std::vector<long long> a; // copies lost when f = 1
    double p = 0;
};

struct SlotScenarios {
    std::vector<WeatherScenario> weather;
    std::vector<DemandScenario> demand;
    // shortfall[0] holds the stage-3 set, shortfall[j-3] the stage-j set
    std::vector<std::vector<ShortfallScenario>> shortfall;
};

struct ScenarioTree {
    int z = 2;
    int num_stations = 0;
    // When set, a station without shortfall at some stage is treated as free of
    // shortfall for the rest of the path (flags are multiplied along the path),
    // instead of rejecting such paths.
    bool masked_propagation = false;
    std::vector<SlotScenarios> slots;
};

inline constexpr double kProbTol = 1e-9;

// Every violation, each naming its location. Empty means valid.
std::vector<std::string> validate_tree(const ScenarioTree& tree);
void require_valid(const ScenarioTree& tree); // throws InputError listing violations

// Number of path prefixes that end at `stage` (stage 2 = demand only).
long long prefix_count(const SlotScenarios& slot, int stage);
// Scenario indices along a prefix: [lambda, omega3, ..., omega_stage].
std::vector<int> decode_prefix(const SlotScenarios& slot, int stage, long long id);
double prefix_probability(const SlotScenarios& slot, int stage, long long id);
// Flag product for a station over stages 3..stage of the prefix.
int path_flag(const SlotScenarios& slot, int stage, long long id, int station);
// Loss at `stage` on the prefix: flag product times that stage's magnitude.
long long path_loss(const SlotScenarios& slot, int stage, long long id, int station);

struct DemandHistogram {
    std::vector<long long> values; // sorted unique dimensions
    std::vector<double> probabilities;
    std::vector<long long> counts;
};

struct DimRow {
    long long rows = 0;
    long long cols = 0;
    long long line = 0; // 1-based source line, 0 if unknown
};

DemandHistogram demand_hist_from_csv(const std::vector<DimRow>& rows);
// Parses the `rows,cols` CSV format; errors name the offending line.
std::vector<DimRow> read_dim_csv(std::istream& in);

struct ModelSize {
    long long variables = 0;
    long long constraints = 0;
    bool operator==(const ModelSize&) const = default;
};

ModelSize model_size_phase1(long long t, long long y, long long x, long long mu);
// Compact closed forms, chain-product reading of the constraint sum.
ModelSize model_size_phase2(long long t, long long f, long long y, long long lambda,
                            const std::vector<long long>& omegas);
// Exact dimensions of the model produced by the phase-2 SIP builder
// (constraints count rows plus binary domains).
ModelSize model_size_phase2_extensive(long long t, long long f, long long y, long long lambda,
                                      const std::vector<long long>& omegas);

} // namespace scos
