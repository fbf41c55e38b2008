#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "scos/errors.hpp"
#include "scos/planner.hpp"
#include "scos/scenario.hpp"

using namespace scos;
using namespace scos::testing;

namespace {

long long count_binaries(const IPModel& m) {
    long long n = 0;
    for (const auto& v : m.variables())
        if (v.kind == VarKind::binary)
            ++n;
    return n;
}

SlotScenarios two_stage_slot() {
    SlotScenarios s;
    s.demand = {{{240, 480}, 0.4}, {{1080, 360}, 0.6}};
    s.shortfall = {{{{1, 0}, {2, 0}, 0.5}, {{0, 0}, {0, 0}, 0.5}},
                   {{{1, 0}, {3, 0}, 0.25}, {{0, 1}, {0, 1}, 0.75}}};
    return s;
}

bool mentions(const std::vector<std::string>& v, const std::string& what) {
    for (const auto& s : v)
        if (s.find(what) != std::string::npos)
            return true;
    return false;
}

} // namespace

TEST(ModelSize, Phase1ReferenceCount) {
    EXPECT_EQ(model_size_phase1(6, 6, 3, 10), (ModelSize{468, 864}));
    EXPECT_EQ(model_size_phase1(1, 1, 1, 1), (ModelSize{2, 4}));
    EXPECT_THROW(model_size_phase1(0, 6, 3, 10), InputError);
}

TEST(ModelSize, Phase2CompactVariables) {
    // t f + t lambda y f + t omega y f with one BS pair, four demands, one shortfall set
    EXPECT_EQ(model_size_phase2(1, 2, 6, 4, {1}).variables, 2 + 48 + 12);
    EXPECT_EQ(model_size_phase2(1, 1, 1, 1, {}).variables, 2);
    EXPECT_THROW(model_size_phase2(1, 1, 1, 1, {0}), InputError);
}

TEST(ModelSize, Phase1BuilderMatchesFormula) {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const Shape s = random_shape(gen);
        const NetworkInstance inst = instance_with_shape(s, gen);
        const auto built = build_phase1(inst);
        const ModelSize want = model_size_phase1(s.slots, s.stations, s.types, s.weather);
        EXPECT_EQ(built.model.num_variables(), want.variables) << "trial " << trial;
        EXPECT_EQ(built.model.num_constraints() + count_binaries(built.model), want.constraints) << "trial " << trial;
    }
}

TEST(ModelSize, Phase2BuilderMatchesExtensiveFormula) {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 50; ++trial) {
        const Shape s = random_shape(gen);
        const NetworkInstance inst = instance_with_shape(s, gen);
        const auto built = build_phase2_sip(inst, default_phase2_types(inst));
        std::vector<long long> omegas(s.shortfall.begin(), s.shortfall.end());
        const ModelSize want = model_size_phase2_extensive(s.slots, s.base_stations, s.stations, s.demand, omegas);
        EXPECT_EQ(built.model.num_variables(), want.variables) << "trial " << trial;
        EXPECT_EQ(built.model.num_constraints() + count_binaries(built.model), want.constraints) << "trial " << trial;
    }
}

TEST(Tree, PrefixEncodingCoversEveryPath) {
    const SlotScenarios slot = two_stage_slot();
    EXPECT_EQ(prefix_count(slot, 2), 2);
    EXPECT_EQ(prefix_count(slot, 3), 4);
    EXPECT_EQ(prefix_count(slot, 4), 8);
    for (int stage = 2; stage <= 4; ++stage) {
        double total = 0;
        for (long long id = 0; id < prefix_count(slot, stage); ++id)
            total += prefix_probability(slot, stage, id);
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
    // id 5 at stage 4 = lambda 1, omega3 0, omega4 1
    EXPECT_EQ(decode_prefix(slot, 4, 5), (std::vector<int>{1, 0, 1}));
    EXPECT_NEAR(prefix_probability(slot, 4, 5), 0.6 * 0.5 * 0.75, 1e-15);
}

TEST(Tree, FlagsMultiplyAlongThePath) {
    const SlotScenarios slot = two_stage_slot();
    // lambda 0, omega3 0 (station 1 short), omega4 0 (station 1 short)
    EXPECT_EQ(path_flag(slot, 4, 0, 0), 1);
    EXPECT_EQ(path_loss(slot, 4, 0, 0), 3);
    // omega3 1 clears station 1, so omega4 0 cannot reintroduce it
    EXPECT_EQ(path_flag(slot, 4, 2, 0), 0);
    EXPECT_EQ(path_loss(slot, 4, 2, 0), 0);
    EXPECT_EQ(path_loss(slot, 3, 0, 0), 2);
    EXPECT_EQ(path_loss(slot, 2, 0, 0), 0);
}

TEST(Tree, ValidationReportsEachProblem) {
    ScenarioTree tree;
    tree.z = 4;
    tree.num_stations = 2;
    tree.slots = {two_stage_slot()};
    // omega4[1] flags station 2 after omega3 cleared it
    auto v = validate_tree(tree);
    EXPECT_TRUE(mentions(v, "station 2 has a shortfall at stage 4"));
    tree.masked_propagation = true;
    EXPECT_TRUE(validate_tree(tree).empty());

    tree.slots[0].demand[0].p = 0.5;
    tree.slots[0].demand[1].d = {240};
    tree.slots[0].shortfall[0][0].a[1] = 3;
    tree.slots[0].shortfall[1][1].f[0] = 2;
    v = validate_tree(tree);
    EXPECT_TRUE(mentions(v, "demand: probabilities sum to 1.1"));
    EXPECT_TRUE(mentions(v, "demand[1]: expected 2 dimensions"));
    EXPECT_TRUE(mentions(v, "magnitude 3 with flag 0 at station 2"));
    EXPECT_TRUE(mentions(v, "flag for station 1 is not 0/1"));
    EXPECT_THROW(require_valid(tree), InputError);

    tree = ScenarioTree{};
    tree.z = 3;
    tree.num_stations = 1;
    tree.slots = {SlotScenarios{{}, {{{240}, 1.0}}, {}}};
    EXPECT_TRUE(mentions(validate_tree(tree), "expected 1 shortfall stages, got 0"));
}

TEST(DemandCsv, HistogramCounts) {
    std::istringstream in("rows,cols\n240,240\n480,480\n240,240\n\n1080,1080\n");
    const auto h = demand_hist_from_csv(read_dim_csv(in));
    EXPECT_EQ(h.values, (std::vector<long long>{240, 480, 1080}));
    EXPECT_EQ(h.counts, (std::vector<long long>{2, 1, 1}));
    EXPECT_EQ(h.probabilities, (std::vector<double>{0.5, 0.25, 0.25}));
}

TEST(DemandCsv, ErrorsNameTheLine) {
    auto fails_with = [](const std::string& text, const std::string& what) {
        std::istringstream in(text);
        try {
            demand_hist_from_csv(read_dim_csv(in));
        } catch (const InputError& e) {
            return std::string(e.what()).find(what) != std::string::npos;
        }
        return false;
    };
    EXPECT_TRUE(fails_with("rows,cols\n240,240\n240,480\n", "line 3: non-square matrix 240x480"));
    EXPECT_TRUE(fails_with("rows,cols\n240;240\n", "line 2: expected two comma-separated fields"));
    EXPECT_TRUE(fails_with("rows,cols\n-4,4\n", "line 2: '-4' is not a positive integer"));
    EXPECT_TRUE(fails_with("rows,cols\n0,0\n", "line 2: dimensions must be positive"));
    EXPECT_TRUE(fails_with("n,m\n4,4\n", "line 1: expected header"));
    EXPECT_TRUE(fails_with("", "missing 'rows,cols' header"));
    EXPECT_TRUE(fails_with("rows,cols\n", "no records"));
}

TEST(DemandCsv, BundledSyntheticFile) {
    std::ifstream in(data_path("synthetic_demand.csv"));
    ASSERT_TRUE(in.good());
    const auto rows = read_dim_csv(in);
    const auto h = demand_hist_from_csv(rows);
    long long total = 0;
    double mass = 0;
    for (std::size_t i = 0; i < h.values.size(); ++i) {
        total += h.counts[i];
        mass += h.probabilities[i];
    }
    EXPECT_EQ(total, static_cast<long long>(rows.size()));
    EXPECT_NEAR(mass, 1.0, 1e-12);
}
