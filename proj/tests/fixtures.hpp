#pragma once

// Bundled data paths and small random network instances built on top of the
// example config (its environment, costs and UAV fleet).

#include <random>
#include <string>
#include <vector>

#include "scos/io.hpp"

#ifndef SCOS_DATA_DIR
#define SCOS_DATA_DIR "data"
#endif

namespace scos::testing {

inline std::string data_path(const std::string& name) { return std::string(SCOS_DATA_DIR) + "/" + name; }

inline const NetworkInstance& example_instance() {
    static const NetworkInstance inst = load_instance(data_path("example_instance.json"));
    return inst;
}

struct Shape {
    int slots = 1;
    int stations = 1;
    int base_stations = 1;
    int types = 3;
    int weather = 1;
    int demand = 1;
    std::vector<int> shortfall; // scenario count per stage 3..z
    int z() const { return 2 + static_cast<int>(shortfall.size()); }
};

inline Shape random_shape(std::mt19937_64& gen) {
    auto draw = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
    Shape s;
    s.slots = draw(1, 3);
    s.stations = draw(1, 6);
    s.base_stations = draw(1, 3);
    s.types = draw(1, 3);
    s.weather = draw(1, 4);
    s.demand = draw(1, 4);
    const int stages = draw(0, 3);
    for (int j = 0; j < stages; ++j)
        s.shortfall.push_back(draw(1, 3));
    return s;
}

inline std::vector<double> equal_split(int n) {
    std::vector<double> p(static_cast<std::size_t>(n), 1.0 / n);
    double rest = 1.0;
    for (int i = 0; i + 1 < n; ++i)
        rest -= p[static_cast<std::size_t>(i)];
    p.back() = rest;
    return p;
}

// Uses masked shortfall propagation, so any flag pattern is legal.
inline NetworkInstance instance_with_shape(const Shape& shape, std::mt19937_64& gen,
                                           const std::vector<long long>& dims = {240, 360, 480, 1080}) {
    NetworkInstance inst = example_instance();
    auto draw = [&](long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(gen); };
    inst.name = "random";
    // keep the largest type last
    std::vector<UavType> fleet(inst.uav_types.begin(), inst.uav_types.begin() + (shape.types - 1));
    fleet.push_back(inst.uav_types.back());
    inst.uav_types = fleet;
    inst.phase2_types.clear();

    inst.stations.clear();
    for (int y = 0; y < shape.stations; ++y)
        inst.stations.push_back({"y" + std::to_string(y + 1), static_cast<double>(draw(0, 1000)),
                                 static_cast<double>(draw(0, 1000))});
    const auto base = inst.base_stations.front();
    inst.base_stations.clear();
    for (int f = 0; f < shape.base_stations; ++f) {
        BaseStation bs = base;
        bs.name = "bs" + std::to_string(f + 1);
        bs.a = static_cast<double>(draw(0, 1000));
        bs.b = static_cast<double>(draw(0, 1000));
        bs.servers = draw(8, 40);
        inst.base_stations.push_back(bs);
    }

    ScenarioTree tree;
    tree.z = shape.z();
    tree.num_stations = shape.stations;
    tree.masked_propagation = true;
    const auto ny = static_cast<std::size_t>(shape.stations);
    for (int t = 0; t < shape.slots; ++t) {
        SlotScenarios slot;
        const auto pw = equal_split(shape.weather);
        for (int i = 0; i < shape.weather; ++i) {
            WeatherScenario w;
            for (std::size_t y = 0; y < ny; ++y)
                w.g.push_back(static_cast<int>(draw(0, 1)));
            w.p = pw[static_cast<std::size_t>(i)];
            slot.weather.push_back(w);
        }
        const auto pd = equal_split(shape.demand);
        for (int i = 0; i < shape.demand; ++i) {
            DemandScenario d;
            for (std::size_t y = 0; y < ny; ++y)
                d.d.push_back(dims[static_cast<std::size_t>(draw(0, static_cast<long long>(dims.size()) - 1))]);
            d.p = pd[static_cast<std::size_t>(i)];
            slot.demand.push_back(d);
        }
        for (int n : shape.shortfall) {
            const auto ps = equal_split(n);
            std::vector<ShortfallScenario> set;
            for (int i = 0; i < n; ++i) {
                ShortfallScenario s;
                for (std::size_t y = 0; y < ny; ++y) {
                    const int f = static_cast<int>(draw(0, 1));
                    s.f.push_back(f);
                    s.a.push_back(f ? draw(1, 4) : 0);
                }
                s.p = ps[static_cast<std::size_t>(i)];
                set.push_back(s);
            }
            slot.shortfall.push_back(set);
        }
        tree.slots.push_back(slot);
    }
    inst.tree = tree;
    validate_instance(inst);
    return inst;
}

struct CurvePoint {
    long long offload = 0;
    SolveStatus status = SolveStatus::optimal;
    double total = 0;
    std::vector<double> stage_costs;
};

// Total cost of the SIP with the stage-2 offload count of one station (first
// demand scenario, first BS) pinned to each value in [lo, hi].
inline std::vector<CurvePoint> offload_curve(const NetworkInstance& inst, std::size_t station, long long lo,
                                             long long hi) {
    const auto built = build_phase2_sip(inst, default_phase2_types(inst));
    const int id = built.layout.ids[0][0][0][station].offload[0];
    std::vector<CurvePoint> out;
    for (long long o = lo; o <= hi; ++o) {
        Phase2Model pinned = built;
        pinned.model.set_bounds(id, static_cast<double>(o), static_cast<double>(o));
        const Solution sol = solve_exact(pinned.model, inst.solver);
        CurvePoint pt{o, sol.status, sol.objective, {}};
        if (sol.has_incumbent())
            pt.stage_costs = decode_phase2(pinned, sol, "sip").stage_costs;
        out.push_back(pt);
    }
    return out;
}

} // namespace scos::testing
