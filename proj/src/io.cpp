#include "scos/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "scos/errors.hpp"

namespace scos {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json& need(const json& j, const char* key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key))
        throw InputError(ctx + ": missing field '" + key + "'");
    return j.at(key);
}

double num(const json& j, const std::string& ctx) {
    if (!j.is_number())
        throw InputError(ctx + ": expected a number");
    return j.get<double>();
}

long long integer(const json& j, const std::string& ctx) {
    if (j.is_number_integer())
        return j.get<long long>();
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (v == std::floor(v) && std::abs(v) < 9e15)
            return static_cast<long long>(v);
    }
    throw InputError(ctx + ": expected an integer");
}

double num_or(const json& j, const char* key, double def, const std::string& ctx) {
    if (!j.contains(key))
        return def;
    return num(j.at(key), ctx + "." + key);
}

bool bool_or(const json& j, const char* key, bool def, const std::string& ctx) {
    if (!j.contains(key))
        return def;
    if (!j.at(key).is_boolean())
        throw InputError(ctx + "." + key + ": expected true/false");
    return j.at(key).get<bool>();
}

std::string str_or(const json& j, const char* key, const std::string& def) {
    if (!j.contains(key) || !j.at(key).is_string())
        return def;
    return j.at(key).get<std::string>();
}

void check_version(const json& j, const std::string& ctx) {
    const long long v = integer(need(j, "schema_version", ctx), ctx + ".schema_version");
    if (v != kSchemaVersion)
        throw InputError(ctx + ": unsupported schema_version " + std::to_string(v) + " (expected " +
                         std::to_string(kSchemaVersion) + ")");
}

// vector or scalar broadcast to n entries
template <class T, class F>
std::vector<T> vec(const json& j, int& n, const std::string& ctx, F conv) {
    std::vector<T> out;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            out.push_back(conv(j[i], ctx + "[" + std::to_string(i) + "]"));
        if (n < 0)
            n = static_cast<int>(out.size());
        return out;
    }
    if (n < 0)
        throw InputError(ctx + ": scalar given before the station count is known");
    out.assign(static_cast<std::size_t>(n), conv(j, ctx));
    return out;
}

SlotScenarios slot_from_json(const json& j, int& ny, const std::string& ctx) {
    SlotScenarios s;
    auto as_int = [](const json& v, const std::string& c) { return static_cast<int>(integer(v, c)); };
    auto as_ll = [](const json& v, const std::string& c) { return integer(v, c); };
    if (j.contains("weather")) {
        const auto& w = j.at("weather");
        if (!w.is_array())
            throw InputError(ctx + ".weather: expected an array");
        for (std::size_t i = 0; i < w.size(); ++i) {
            const std::string c = ctx + ".weather[" + std::to_string(i) + "]";
            WeatherScenario ws;
            ws.g = vec<int>(need(w[i], "g", c), ny, c + ".g", as_int);
            ws.p = num(need(w[i], "p", c), c + ".p");
            s.weather.push_back(ws);
        }
    }
    const auto& d = need(j, "demand", ctx);
    if (!d.is_array())
        throw InputError(ctx + ".demand: expected an array");
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::string c = ctx + ".demand[" + std::to_string(i) + "]";
        DemandScenario ds;
        ds.d = vec<long long>(need(d[i], "d", c), ny, c + ".d", as_ll);
        ds.p = num(need(d[i], "p", c), c + ".p");
        s.demand.push_back(ds);
    }
    if (j.contains("shortfall")) {
        const auto& sh = j.at("shortfall");
        if (!sh.is_array())
            throw InputError(ctx + ".shortfall: expected an array of stages");
        for (std::size_t st = 0; st < sh.size(); ++st) {
            if (!sh[st].is_array())
                throw InputError(ctx + ".shortfall[" + std::to_string(st) + "]: expected an array");
            std::vector<ShortfallScenario> stage;
            for (std::size_t i = 0; i < sh[st].size(); ++i) {
                const std::string c = ctx + ".shortfall[" + std::to_string(st) + "][" + std::to_string(i) + "]";
                ShortfallScenario ss;
                ss.f = vec<int>(need(sh[st][i], "f", c), ny, c + ".f", as_int);
                ss.a = vec<long long>(need(sh[st][i], "a", c), ny, c + ".a", as_ll);
                ss.p = num(need(sh[st][i], "p", c), c + ".p");
                stage.push_back(ss);
            }
            s.shortfall.push_back(stage);
        }
    }
    return s;
}

UavType uav_from_json(const json& j, const std::string& ctx) {
    UavType u;
    u.id = static_cast<int>(integer(need(j, "id", ctx), ctx + ".id"));
    u.battery_mah = num(need(j, "battery_mah", ctx), ctx + ".battery_mah");
    u.mass_kg = num(need(j, "mass_kg", ctx), ctx + ".mass_kg");
    u.blade_angular_velocity = num(need(j, "blade_angular_velocity", ctx), ctx + ".blade_angular_velocity");
    u.cpu_rate = num(need(j, "cpu_rate_hz", ctx), ctx + ".cpu_rate_hz");
    u.cycles_per_bit = num(need(j, "cycles_per_bit", ctx), ctx + ".cycles_per_bit");
    u.bandwidth_hz = num(need(j, "bandwidth_hz", ctx), ctx + ".bandwidth_hz");
    if (j.contains("tx_power_mw"))
        u.tx_power_w = num(j.at("tx_power_mw"), ctx + ".tx_power_mw") * 1e-3;
    else
        u.tx_power_w = num(need(j, "tx_power_w", ctx), ctx + ".tx_power_w");
    if (j.contains("rx_power_mw"))
        u.rx_power_w = num(j.at("rx_power_mw"), ctx + ".rx_power_mw") * 1e-3;
    else
        u.rx_power_w = num(need(j, "rx_power_w", ctx), ctx + ".rx_power_w");
    u.hover_height_m = num(need(j, "hover_height_m", ctx), ctx + ".hover_height_m");
    return u;
}

Environment env_from_json(const json& j, const std::string& ctx) {
    Environment e;
    if (!j.is_object())
        throw InputError(ctx + ": expected an object");
    e.air_density = num_or(j, "air_density", e.air_density, ctx);
    e.rotor_radius = num_or(j, "rotor_radius", e.rotor_radius, ctx);
    e.rotor_disc_area = num_or(j, "rotor_disc_area", e.rotor_disc_area, ctx);
    e.tip_speed = num_or(j, "tip_speed", e.tip_speed, ctx);
    e.induced_velocity = num_or(j, "induced_velocity", e.induced_velocity, ctx);
    e.fuselage_drag_ratio = num_or(j, "fuselage_drag_ratio", e.fuselage_drag_ratio, ctx);
    e.rotor_solidity = num_or(j, "rotor_solidity", e.rotor_solidity, ctx);
    e.profile_drag = num_or(j, "profile_drag", e.profile_drag, ctx);
    e.induced_power_correction = num_or(j, "induced_power_correction", e.induced_power_correction, ctx);
    if (j.contains("channel_gain_ref_db"))
        e.channel_gain_ref = db_to_linear(num(j.at("channel_gain_ref_db"), ctx + ".channel_gain_ref_db"));
    else
        e.channel_gain_ref = num_or(j, "channel_gain_ref", e.channel_gain_ref, ctx);
    if (j.contains("noise_power_dbm"))
        e.noise_power_w = dbm_to_watts(num(j.at("noise_power_dbm"), ctx + ".noise_power_dbm"));
    else
        e.noise_power_w = num_or(j, "noise_power_w", e.noise_power_w, ctx);
    if (j.contains("bits_per_symbol"))
        e.bits_per_symbol = static_cast<int>(integer(j.at("bits_per_symbol"), ctx + ".bits_per_symbol"));
    return e;
}

CostCoefficients costs_from_json(const json& j, const std::string& ctx) {
    CostCoefficients c;
    if (!j.is_object())
        throw InputError(ctx + ": expected an object");
    c.alpha1 = num_or(j, "alpha1", c.alpha1, ctx);
    c.alpha2 = num_or(j, "alpha2", c.alpha2, ctx);
    c.alpha3 = num_or(j, "alpha3", c.alpha3, ctx);
    c.alpha4 = num_or(j, "alpha4", c.alpha4, ctx);
    c.alpha5 = num_or(j, "alpha5", c.alpha5, ctx);
    c.service = num_or(j, "service", c.service, ctx);
    c.crash_penalty = num_or(j, "crash_penalty", c.crash_penalty, ctx);
    // no sensible default exists, so these two must be stated
    c.subscription = num(need(j, "subscription", ctx), ctx + ".subscription");
    c.terminal_penalty = num(need(j, "terminal_penalty", ctx), ctx + ".terminal_penalty");
    return c;
}

CodeSplit split_from_json(const json& j, const std::string& ctx) {
    if (j.contains("s") || j.contains("t")) {
        const auto s = integer(need(j, "s", ctx), ctx + ".s");
        const auto t = integer(need(j, "t", ctx), ctx + ".t");
        if (s < 1 || t < 1)
            throw InputError(ctx + ": s and t must be >= 1");
        auto sp = make_split(s, t);
        if (j.contains("m") && integer(j.at("m"), ctx + ".m") != sp.m)
            throw InputError(ctx + ": m must equal s*t");
        return sp;
    }
    const auto m = integer(need(j, "m", ctx), ctx + ".m");
    if (m < 1)
        throw InputError(ctx + ": m must be >= 1");
    const auto obj = str_or(j, "objective", "max_k");
    if (obj != "max_k" && obj != "min_k")
        throw InputError(ctx + ".objective: expected max_k or min_k");
    return optimal_split(m, obj == "max_k" ? SplitObjective::max_k : SplitObjective::min_k);
}

} // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

static json parse_json_file(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError("'" + path + "': invalid JSON: " + e.what());
    }
}

ScenarioTree tree_from_json(const json& j, int ny) {
    const std::string ctx = "scenarios";
    if (!j.is_object())
        throw InputError(ctx + ": expected an object");
    check_version(j, ctx);
    ScenarioTree t;
    t.z = static_cast<int>(integer(need(j, "z", ctx), ctx + ".z"));
    t.masked_propagation = bool_or(j, "masked_propagation", false, ctx);
    if (j.contains("num_stations")) {
        const int n = static_cast<int>(integer(j.at("num_stations"), ctx + ".num_stations"));
        if (ny >= 0 && n != ny)
            throw InputError(ctx + ".num_stations: " + std::to_string(n) + " does not match the instance (" +
                             std::to_string(ny) + ")");
        ny = n;
    }
    if (j.contains("slots")) {
        const auto& sl = j.at("slots");
        if (!sl.is_array())
            throw InputError(ctx + ".slots: expected an array");
        for (std::size_t i = 0; i < sl.size(); ++i)
            t.slots.push_back(slot_from_json(sl[i], ny, ctx + ".slots[" + std::to_string(i) + "]"));
    } else {
        t.slots.push_back(slot_from_json(j, ny, ctx));
    }
    t.num_stations = std::max(ny, 0);
    return t;
}

ScenarioTree load_tree(const std::string& path, int ny) {
    if (!fs::exists(path))
        throw InputError("scenario file '" + path + "' does not exist");
    return tree_from_json(parse_json_file(path), ny);
}

json tree_to_json(const ScenarioTree& tree) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["z"] = tree.z;
    j["num_stations"] = tree.num_stations;
    j["masked_propagation"] = tree.masked_propagation;
    j["slots"] = json::array();
    for (const auto& s : tree.slots) {
        json js;
        js["weather"] = json::array();
        for (const auto& w : s.weather)
            js["weather"].push_back({{"g", w.g}, {"p", w.p}});
        js["demand"] = json::array();
        for (const auto& d : s.demand)
            js["demand"].push_back({{"d", d.d}, {"p", d.p}});
        js["shortfall"] = json::array();
        for (const auto& stage : s.shortfall) {
            json a = json::array();
            for (const auto& x : stage)
                a.push_back({{"f", x.f}, {"a", x.a}, {"p", x.p}});
            js["shortfall"].push_back(a);
        }
        j["slots"].push_back(js);
    }
    return j;
}

NetworkInstance instance_from_json(const json& j, const std::string& base_dir) {
    const std::string ctx = "config";
    if (!j.is_object())
        throw InputError(ctx + ": expected an object");
    check_version(j, ctx);
    NetworkInstance inst;
    inst.name = str_or(j, "name", "instance");
    if (j.contains("environment"))
        inst.env = env_from_json(j.at("environment"), ctx + ".environment");
    inst.costs = costs_from_json(need(j, "costs", ctx), ctx + ".costs");
    inst.split = split_from_json(need(j, "split", ctx), ctx + ".split");

    const auto& types = need(j, "uav_types", ctx);
    if (!types.is_array())
        throw InputError(ctx + ".uav_types: expected an array");
    for (std::size_t i = 0; i < types.size(); ++i)
        inst.uav_types.push_back(uav_from_json(types[i], ctx + ".uav_types[" + std::to_string(i) + "]"));

    const auto& st = need(j, "stations", ctx);
    if (!st.is_array())
        throw InputError(ctx + ".stations: expected an array");
    for (std::size_t i = 0; i < st.size(); ++i) {
        const std::string c = ctx + ".stations[" + std::to_string(i) + "]";
        Station s;
        s.name = str_or(st[i], "name", "station" + std::to_string(i + 1));
        s.a = num(need(st[i], "a", c), c + ".a");
        s.b = num(need(st[i], "b", c), c + ".b");
        inst.stations.push_back(s);
    }

    const auto& bss = need(j, "base_stations", ctx);
    if (!bss.is_array())
        throw InputError(ctx + ".base_stations: expected an array");
    for (std::size_t i = 0; i < bss.size(); ++i) {
        const std::string c = ctx + ".base_stations[" + std::to_string(i) + "]";
        BaseStation b;
        b.name = str_or(bss[i], "name", "bs" + std::to_string(i + 1));
        b.a = num(need(bss[i], "a", c), c + ".a");
        b.b = num(need(bss[i], "b", c), c + ".b");
        b.h = num(need(bss[i], "h", c), c + ".h");
        b.servers = integer(need(bss[i], "servers", c), c + ".servers");
        b.server_cpu_rate = num_or(bss[i], "server_cpu_rate_hz", 0.0, c);
        inst.base_stations.push_back(b);
    }

    if (j.contains("phase2")) {
        const auto& p = j.at("phase2");
        const std::string c = ctx + ".phase2";
        inst.phase2.gate_stage2_threshold = bool_or(p, "gate_stage2_threshold", false, c);
        inst.phase2.hover_multiplier = num_or(p, "hover_multiplier", 1.0, c);
        inst.phase2.force_no_local = bool_or(p, "force_no_local", false, c);
        if (p.contains("types")) {
            int n = static_cast<int>(inst.stations.size());
            inst.phase2_types =
                vec<int>(p.at("types"), n, c + ".types",
                         [](const json& v, const std::string& cc) { return static_cast<int>(integer(v, cc)); });
        }
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        if (s.contains("node_limit"))
            inst.solver.node_limit = integer(s.at("node_limit"), ctx + ".solver.node_limit");
    }

    if (j.contains("seed")) {
        const long long sd = integer(j.at("seed"), ctx + ".seed");
        if (sd < 0)
            throw InputError(ctx + ".seed: must be >= 0");
        inst.seed = static_cast<std::uint64_t>(sd);
    }

    const int ny = static_cast<int>(inst.stations.size());
    if (j.contains("scenario_file")) {
        fs::path p = j.at("scenario_file").get<std::string>();
        if (p.is_relative())
            p = fs::path(base_dir) / p;
        inst.tree = load_tree(p.string(), ny);
    } else {
        inst.tree = tree_from_json(need(j, "scenarios", ctx), ny);
    }
    validate_instance(inst);
    return inst;
}

NetworkInstance load_instance(const std::string& path) {
    if (!fs::exists(path))
        throw InputError("config file '" + path + "' does not exist");
    const auto base = fs::path(path).parent_path();
    return instance_from_json(parse_json_file(path), base.empty() ? "." : base.string());
}

json emit_number(double v) {
    if (!std::isfinite(v))
        return nullptr;
    return round_sig12(v);
}

namespace {

std::string b(const char* key, long long v) { return std::string("[") + key + "=" + std::to_string(v) + "]"; }

} // namespace

json phase1_plan_json(const NetworkInstance& inst, const Phase1Plan& plan) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["status"] = to_string(plan.status);
    j["optimal"] = plan.status == SolveStatus::optimal;
    j["nodes_explored"] = plan.nodes;
    j["expected_cost"] = emit_number(plan.expected_cost);
    j["reservation_cost"] = emit_number(plan.reservation_cost);
    j["expected_recourse_cost"] = emit_number(plan.expected_recourse_cost);
    j["reserved_type"] = plan.reserved_type;
    json vars = json::object();
    const bool multi = plan.reserved_type.size() > 1;
    for (std::size_t t = 0; t < plan.reserved_type.size(); ++t) {
        const std::string st = multi ? b("slot", static_cast<long long>(t) + 1) : "";
        for (std::size_t y = 0; y < plan.reserved_type[t].size(); ++y)
            for (const auto& u : inst.uav_types)
                vars["T" + st + b("station", static_cast<long long>(y) + 1) + b("type", u.id)] =
                    u.id == plan.reserved_type[t][y] ? 1 : 0;
        for (std::size_t mu = 0; mu < plan.recourse[t].size(); ++mu)
            for (std::size_t y = 0; y < plan.recourse[t][mu].size(); ++y)
                vars["T_X" + st + b("station", static_cast<long long>(y) + 1) +
                     b("weather", static_cast<long long>(mu) + 1)] = plan.recourse[t][mu][y];
    }
    j["variables"] = vars;
    return j;
}

json phase2_plan_json(const NetworkInstance& inst, const Phase2Plan& plan) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["formulation"] = plan.formulation;
    j["status"] = to_string(plan.status);
    j["optimal"] = plan.optimal();
    j["nodes_explored"] = plan.nodes;
    j["z"] = plan.z;
    j["expected_cost"] = emit_number(plan.expected_cost);
    json sc = json::array();
    for (double c : plan.stage_costs)
        sc.push_back(emit_number(c));
    j["stage_costs"] = sc;
    if (!plan.note.empty())
        j["note"] = plan.note;
    json types = json::array();
    for (const auto& row : plan.types) {
        json r = json::array();
        for (int t : row)
            r.push_back(inst.uav_types.at(t).id);
        types.push_back(r);
    }
    j["uav_types"] = types;
    if (!plan.dip_demand.empty()) {
        j["dip_demand"] = plan.dip_demand;
        json s = json::array();
        for (const auto& row : plan.dip_shortfall) {
            json r = json::array();
            for (double v : row)
                r.push_back(emit_number(v));
            s.push_back(r);
        }
        j["dip_shortfall"] = s;
    }
    json vars = json::object();
    const bool multi = plan.subscriptions.size() > 1;
    const bool dip = plan.formulation == "dip";
    for (std::size_t t = 0; t < plan.subscriptions.size(); ++t) {
        const std::string st = multi ? b("slot", static_cast<long long>(t) + 1) : "";
        for (std::size_t f = 0; f < plan.subscriptions[t].size(); ++f)
            vars["M_S" + st + b("bs", static_cast<long long>(f) + 1)] = plan.subscriptions[t][f];
        for (std::size_t jj = 0; jj < plan.decisions[t].size(); ++jj)
            for (std::size_t p = 0; p < plan.decisions[t][jj].size(); ++p)
                for (std::size_t y = 0; y < plan.decisions[t][jj][p].size(); ++y) {
                    const auto& d = plan.decisions[t][jj][p][y];
                    const std::string stage = dip ? "" : b("stage", static_cast<long long>(jj) + 2);
                    const std::string sy = b("station", static_cast<long long>(y) + 1);
                    const std::string sp = dip ? "" : b("scenario", static_cast<long long>(p) + 1);
                    vars["M_L" + st + stage + sy + sp] = d.local;
                    for (std::size_t f = 0; f < d.offload.size(); ++f) {
                        const std::string sf = b("bs", static_cast<long long>(f) + 1);
                        vars["M_O" + st + stage + sy + sf + sp] = d.offload[f];
                        vars["M_TH" + st + stage + sy + sf + sp] = d.threshold[f];
                    }
                    if (jj > 0)
                        vars["E" + st + stage + sy + sp] = d.exposed;
                }
    }
    j["variables"] = vars;
    // path prefixes: which scenario indices each [scenario=n] stands for
    if (!dip && plan.decisions.size() == inst.tree.slots.size()) {
        json paths = json::array();
        for (std::size_t t = 0; t < inst.tree.slots.size(); ++t)
            for (int stg = 2; stg <= plan.z; ++stg)
                for (long long p = 0; p < prefix_count(inst.tree.slots[t], stg); ++p) {
                    json e;
                    if (multi)
                        e["slot"] = t + 1;
                    e["stage"] = stg;
                    e["scenario"] = p + 1;
                    auto ix = decode_prefix(inst.tree.slots[t], stg, p);
                    e["demand_scenario"] = ix[0] + 1;
                    json om = json::array();
                    for (std::size_t k = 1; k < ix.size(); ++k)
                        om.push_back(ix[k] + 1);
                    e["shortfall_scenarios"] = om;
                    e["probability"] = emit_number(prefix_probability(inst.tree.slots[t], stg, p));
                    paths.push_back(e);
                }
        j["paths"] = paths;
    }
    return j;
}

json histogram_json(const DemandHistogram& h) {
    json j;
    j["schema_version"] = kSchemaVersion;
    json bins = json::array();
    long long total = 0;
    for (std::size_t i = 0; i < h.values.size(); ++i) {
        bins.push_back({{"dimension", h.values[i]}, {"count", h.counts[i]}, {"probability", emit_number(h.probabilities[i])}});
        total += h.counts[i];
    }
    j["total"] = total;
    j["bins"] = bins;
    return j;
}

void write_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InputError("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out)
            throw InputError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw InputError("cannot rename into '" + path + "': " + ec.message());
    }
}

} // namespace scos
