#include "scos/instance.hpp"

#include <set>

#include "scos/errors.hpp"

namespace scos {

void validate_instance(const NetworkInstance& inst) {
    std::vector<std::string> errs;
    auto guard = [&](auto&& fn, const std::string& what) {
        try {
            fn();
        } catch (const InputError& e) {
            errs.push_back(what + ": " + e.what());
        }
    };
    if (inst.stations.empty())
        errs.push_back("instance has no stations");
    if (inst.uav_types.empty())
        errs.push_back("instance has no UAV types");
    if (inst.base_stations.empty())
        errs.push_back("instance has no base stations");
    guard([&] { validate_environment(inst.env); }, "environment");
    guard([&] { validate_coefficients(inst.costs); }, "costs");
    guard([&] { validate_split(inst.split); }, "split");
    std::set<int> ids;
    for (std::size_t i = 0; i < inst.uav_types.size(); ++i) {
        const auto& u = inst.uav_types[i];
        guard([&] { validate_uav(u); }, "UAV type " + std::to_string(u.id));
        if (!ids.insert(u.id).second)
            errs.push_back("duplicate UAV type id " + std::to_string(u.id));
        if (i > 0 && !(u.battery_mah > inst.uav_types[i - 1].battery_mah))
            errs.push_back("UAV types must have strictly ascending battery capacity (type " + std::to_string(u.id) +
                           ")");
    }
    for (const auto& bs : inst.base_stations) {
        if (bs.servers < 1)
            errs.push_back("base station '" + bs.name + "' needs at least one server");
        if (!(bs.h >= 0))
            errs.push_back("base station '" + bs.name + "' has negative height");
        for (const auto& u : inst.uav_types)
            if (!(u.hover_height_m > bs.h))
                errs.push_back("UAV type " + std::to_string(u.id) + " hovers at " + std::to_string(u.hover_height_m) +
                               " m, not above base station '" + bs.name + "'");
    }
    if (inst.tree.num_stations != static_cast<int>(inst.stations.size()))
        errs.push_back("scenario tree covers " + std::to_string(inst.tree.num_stations) + " stations, instance has " +
                       std::to_string(inst.stations.size()));
    for (const auto& v : validate_tree(inst.tree))
        errs.push_back("scenarios: " + v);
    if (!inst.phase2_types.empty()) {
        if (inst.phase2_types.size() != inst.stations.size())
            errs.push_back("phase2 types must list one type per station");
        for (int id : inst.phase2_types)
            if (!ids.count(id))
                errs.push_back("phase2 types: unknown UAV type " + std::to_string(id));
    }
    if (!(inst.phase2.hover_multiplier >= 0))
        errs.push_back("hover multiplier must be >= 0");
    if (inst.solver.node_limit < 1)
        errs.push_back("node limit must be >= 1");
    if (errs.empty())
        return;
    std::string msg = "invalid instance:";
    for (const auto& e : errs)
        msg += "\n  " + e;
    throw InputError(msg);
}

int num_slots(const NetworkInstance& inst) { return static_cast<int>(inst.tree.slots.size()); }

std::size_t type_index(const NetworkInstance& inst, int id) {
    for (std::size_t i = 0; i < inst.uav_types.size(); ++i)
        if (inst.uav_types[i].id == id)
            return i;
    throw InputError("unknown UAV type " + std::to_string(id));
}

const UavType& largest_type(const NetworkInstance& inst) { return inst.uav_types.back(); }

TypeAssignment default_phase2_types(const NetworkInstance& inst) {
    if (inst.phase2_types.empty())
        return uniform_types(inst, static_cast<int>(inst.uav_types.size()) - 1);
    std::vector<int> row;
    for (int id : inst.phase2_types)
        row.push_back(static_cast<int>(type_index(inst, id)));
    return TypeAssignment(inst.tree.slots.size(), row);
}

TypeAssignment uniform_types(const NetworkInstance& inst, int idx) {
    if (idx < 0 || idx >= static_cast<int>(inst.uav_types.size()))
        throw InputError("UAV type index out of range");
    return TypeAssignment(inst.tree.slots.size(), std::vector<int>(inst.stations.size(), idx));
}

NetworkInstance slot_instance(const NetworkInstance& inst, int slot) {
    if (slot < 0 || slot >= num_slots(inst))
        throw InputError("slot " + std::to_string(slot + 1) + " out of range");
    NetworkInstance out = inst;
    out.tree.slots = {inst.tree.slots[static_cast<std::size_t>(slot)]};
    return out;
}

std::vector<WeatherScenario> weather_set(const NetworkInstance& inst, int slot) {
    const auto& w = inst.tree.slots.at(static_cast<std::size_t>(slot)).weather;
    if (!w.empty())
        return w;
    WeatherScenario calm;
    calm.g.assign(inst.stations.size(), 0);
    calm.p = 1.0;
    return {calm};
}

Position3D uav_position(const NetworkInstance& inst, std::size_t station, const UavType& uav) {
    const auto& s = inst.stations.at(station);
    return {s.a, s.b, uav.hover_height_m};
}

Position3D bs_position(const BaseStation& bs) { return {bs.a, bs.b, bs.h}; }

} // namespace scos
