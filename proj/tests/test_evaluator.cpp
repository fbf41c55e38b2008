#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "scos/errors.hpp"
#include "scos/evaluator.hpp"

using namespace scos;
using namespace scos::testing;

namespace {

std::vector<std::uint64_t> seeds(int n) {
    std::vector<std::uint64_t> s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), 1);
    return s;
}

} // namespace

TEST(Exact, ReproducesSipObjective) {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 10; ++trial) {
        Shape s;
        s.stations = 1 + trial % 3;
        s.base_stations = 1 + trial % 2;
        s.demand = 1 + trial % 4;
        s.shortfall.assign(static_cast<std::size_t>(trial % 3), 1 + trial % 2);
        const auto inst = instance_with_shape(s, gen);
        const auto plan = solve_phase2(inst, Formulation::sip);
        const auto stages = exact_stage_costs(inst, plan);
        EXPECT_NEAR(exact_expected_cost(inst, plan), plan.expected_cost, 1e-9) << "trial " << trial;
        ASSERT_EQ(stages.size(), plan.stage_costs.size());
        for (std::size_t j = 0; j < stages.size(); ++j)
            EXPECT_NEAR(stages[j], plan.stage_costs[j], 1e-9);
    }
}

TEST(MonteCarlo, ConvergesToExpectation) {
    const auto& inst = example_instance();
    const auto plan = solve_phase2(inst, Formulation::sip);
    const auto rep = evaluate_plan(plan, inst, 100000, 42);
    EXPECT_GT(rep.std_error, 0);
    EXPECT_LE(std::abs(rep.mean_cost - plan.expected_cost), 3 * rep.std_error);
    EXPECT_NEAR(std::accumulate(rep.stage_costs.begin(), rep.stage_costs.end(), 0.0), rep.mean_cost, 1e-6);
}

TEST(MonteCarlo, SingleScenarioHasNoSpread) {
    const auto inst = load_instance(data_path("forced_offload.json"));
    const auto plan = solve_phase2(inst, Formulation::sip);
    const auto rep = evaluate_plan(plan, inst, 500, 3);
    EXPECT_NEAR(rep.mean_cost, plan.expected_cost, 1e-9);
    EXPECT_EQ(rep.std_error, 0);
}

TEST(MonteCarlo, SameSeedSameReport) {
    const auto& inst = example_instance();
    const auto plan = random_plan(inst, default_phase2_types(inst), 5);
    const auto a = evaluate_plan(plan, inst, 2000, 9), b = evaluate_plan(plan, inst, 2000, 9);
    EXPECT_EQ(a.mean_cost, b.mean_cost);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_EQ(a.stage_costs, b.stage_costs);
    EXPECT_THROW(evaluate_plan(plan, inst, 0, 9), InputError);
}

TEST(Compare, SipDominatesBaselines) {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 20; ++trial) {
        Shape s;
        s.stations = 1 + trial % 3;
        s.base_stations = 1 + trial % 2;
        s.demand = 1 + trial % 4;
        s.shortfall.assign(static_cast<std::size_t>(trial % 3), 2);
        auto inst = instance_with_shape(s, gen);
        inst.costs.service = 0.02 * (trial % 6);
        const auto row = compare(inst, seeds(30));
        EXPECT_LE(row.sip_cost, row.evf_cost + 1e-9) << "trial " << trial;
        EXPECT_LE(row.sip_cost, row.random_cost + 1e-9) << "trial " << trial;
        EXPECT_NEAR(row.sip_exact, row.sip_cost, 1e-9);
    }
}

TEST(Compare, DeterministicTreeHasNoEvfGap) {
    auto inst = load_instance(data_path("forced_offload.json"));
    inst.phase2.force_no_local = false;
    inst.tree.slots[0].shortfall[0][0].f.assign(6, 0);
    inst.tree.slots[0].shortfall[0][0].a.assign(6, 0);
    const auto row = compare(inst, seeds(30));
    EXPECT_NEAR(row.sip_cost, row.evf_cost, 1e-9);
    EXPECT_LE(row.sip_cost, row.random_cost);
}

TEST(Sweep, DeterministicCsv) {
    const auto& inst = example_instance();
    const std::vector<double> grid{0.05, 0.2};
    EXPECT_EQ(sweep_csv(sweep(inst, "offload_price", grid)), sweep_csv(sweep(inst, "offload_price", grid)));
}

TEST(Sweep, PenaltyFlipIsBracketed) {
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i)
        grid.push_back(0.05 * i);
    const auto r = sweep(example_instance(), "penalty_C_p", grid);
    std::size_t first3 = grid.size();
    for (std::size_t i = 0; i < r.points.size(); ++i)
        if (r.points[i].summary.find("types=3") != std::string::npos) {
            first3 = i;
            break;
        }
    ASSERT_LT(first3, grid.size());
    ASSERT_GT(first3, 0u);
    EXPECT_LT(grid[first3 - 1], 1.617);
    EXPECT_GT(grid[first3], 1.617);
    EXPECT_NE(r.points[first3 - 1].summary.find("types=1"), std::string::npos);
}

TEST(Sweep, SplitSweepWithoutShortfall) {
    auto inst = example_instance();
    inst.split = make_split(1, 4);
    for (auto& stage : inst.tree.slots[0].shortfall)
        for (auto& sc : stage) {
            sc.f.assign(sc.f.size(), 0);
            sc.a.assign(sc.a.size(), 0);
        }
    const auto r = sweep(inst, "split_s", {1, 2, 3, 4, 5});
    EXPECT_EQ(r.points[2].status, "skipped");
    EXPECT_EQ(r.points[4].status, "skipped");
    for (std::size_t i : {0u, 1u, 3u}) {
        ASSERT_EQ(r.points[i].status, "optimal");
        EXPECT_NEAR(r.points[i].stage_costs[0], r.points[0].stage_costs[0], 1e-9);
        EXPECT_EQ(r.points[i].stage_costs[2], 0.0);
    }
}

TEST(Sweep, RejectsBadGrids) {
    const auto& inst = example_instance();
    EXPECT_THROW(sweep(inst, "nope", {1}), InputError);
    EXPECT_THROW(sweep(inst, "z", {}), InputError);
    EXPECT_THROW(sweep(inst, "z", {3, 3}), InputError);
    EXPECT_THROW(apply_sweep_value(inst, "penalty_C_p", -1), InputError);
    EXPECT_THROW(apply_sweep_value(inst, "uav_type", 9), InputError);
}
