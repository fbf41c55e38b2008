#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "scos/errors.hpp"
#include "scos/io.hpp"

using namespace scos;
using namespace scos::testing;
using nlohmann::json;

namespace {

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Io, TreeRoundTrip) {
    std::mt19937_64 gen(41);
    for (int trial = 0; trial < 10; ++trial) {
        const auto inst = instance_with_shape(random_shape(gen), gen);
        const json j = tree_to_json(inst.tree);
        const ScenarioTree back = tree_from_json(j, inst.tree.num_stations);
        EXPECT_EQ(tree_to_json(back), j);
        EXPECT_EQ(back.z, inst.tree.z);
        EXPECT_EQ(back.masked_propagation, inst.tree.masked_propagation);
    }
}

TEST(Io, BundledInstancesLoad) {
    const auto& ex = example_instance();
    EXPECT_EQ(ex.stations.size(), 6u);
    EXPECT_EQ(ex.base_stations.size(), 2u);
    EXPECT_EQ(ex.split.k, 4);
    EXPECT_EQ(ex.tree.slots[0].demand.size(), 4u);
    const auto forced = load_instance(data_path("forced_offload.json"));
    EXPECT_TRUE(forced.phase2.force_no_local);
    EXPECT_EQ(forced.base_stations.size(), 1u);
}

TEST(Io, ErrorsNameTheProblem) {
    EXPECT_NE(error_of([] { load_instance("/nonexistent/cfg.json"); }).find("/nonexistent/cfg.json"),
              std::string::npos);
    json j = json::parse(read_file(data_path("example_instance.json")));
    j["schema_version"] = 7;
    EXPECT_NE(error_of([&] { instance_from_json(j, SCOS_DATA_DIR); }).find("schema"), std::string::npos);
    j = json::parse(read_file(data_path("example_instance.json")));
    j["scenario_file"] = "missing.json";
    EXPECT_NE(error_of([&] { instance_from_json(j, SCOS_DATA_DIR); }).find("missing.json"), std::string::npos);
    j = json::parse(read_file(data_path("example_instance.json")));
    j["costs"]["alpha1"] = "cheap";
    EXPECT_NE(error_of([&] { instance_from_json(j, SCOS_DATA_DIR); }).find("alpha1"), std::string::npos);
}

TEST(Io, PlanJsonUsesVariableNames) {
    const auto& inst = example_instance();
    const auto plan = solve_phase2(inst, Formulation::sip);
    const json j = phase2_plan_json(inst, plan);
    EXPECT_EQ(j["formulation"], "sip");
    EXPECT_EQ(j["variables"]["M_L[stage=2][station=1][scenario=2]"], 4);
    EXPECT_TRUE(j["variables"].contains("M_S[bs=1]"));
    const json p1 = phase1_plan_json(inst, solve_phase1(inst));
    EXPECT_TRUE(p1["variables"].contains("T[station=1][type=3]"));
}

TEST(Io, AtomicWrite) {
    const auto dir = std::filesystem::temp_directory_path() / "scos_io_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "out.txt").string();
    write_atomic(path, "first");
    write_atomic(path, "second");
    EXPECT_EQ(read_file(path), "second");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir))
        ++files;
    EXPECT_EQ(files, 1u);
    std::filesystem::remove_all(dir);
}

TEST(Io, EmittedNumbersHaveTwelveDigits) {
    EXPECT_EQ(emit_number(0.1 + 0.2).dump(), "0.3");
    EXPECT_EQ(emit_number(292.02822109237).dump(), "292.028221092");
}
