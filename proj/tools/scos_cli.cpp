// Command-line front end: plan, sweep, compare, size, ingest-demand.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scos/errors.hpp"
#include "scos/evaluator.hpp"
#include "scos/io.hpp"
#include "scos/planner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scos;

namespace {

enum Exit { ok = 0, internal = 1, input = 2, limited = 3 };

struct Common {
    std::string config;
    std::string out = ".";
    long long seed = -1;
    long long node_limit = -1;
};

void add_common(CLI::App* app, Common& c, bool need_config) {
    auto* opt = app->add_option("--config", c.config, "instance config (JSON)");
    if (need_config)
        opt->required();
    app->add_option("--out", c.out, "output directory");
    app->add_option("--seed", c.seed, "overrides the config seed")->check(CLI::NonNegativeNumber);
    app->add_option("--node-limit", c.node_limit, "branch-and-bound node limit")->check(CLI::PositiveNumber);
}

NetworkInstance load(const Common& c) {
    auto inst = load_instance(c.config);
    if (c.seed >= 0)
        inst.seed = static_cast<std::uint64_t>(c.seed);
    if (c.node_limit > 0)
        inst.solver.node_limit = c.node_limit;
    return inst;
}

std::string out_path(const Common& c, const std::string& name) {
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec)
        throw InputError("cannot create output directory '" + c.out + "': " + ec.message());
    return (fs::path(c.out) / name).string();
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> g;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos)
            continue;
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw InputError("grid value '" + item + "' is not a number");
        }
        if (item.find_first_not_of(" \t", pos) != std::string::npos)
            throw InputError("grid value '" + item + "' is not a number");
        g.push_back(v);
    }
    if (g.empty())
        throw InputError("grid is empty");
    return g;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", round_sig12(v));
    return buf;
}

int cmd_plan(const Common& c) {
    const auto inst = load(c);
    const auto p1 = solve_phase1(inst);
    bool limited_run = p1.status != SolveStatus::optimal;
    write_atomic(out_path(c, "phase1_plan.json"), phase1_plan_json(inst, p1).dump(2) + "\n");

    std::ostringstream sum;
    sum << "instance: " << inst.name << "\n";
    sum << "phase 1: " << to_string(p1.status) << ", expected cost " << fmt(p1.expected_cost) << "\n";
    for (std::size_t t = 0; t < p1.reserved_type.size(); ++t) {
        sum << "  slot " << t + 1 << " reserved types:";
        for (int id : p1.reserved_type[t])
            sum << " " << id;
        sum << "\n";
    }

    json cases = json::array();
    double p2_cost = 0;
    if (p1.reserved_type.empty()) {
        sum << "phase 2: skipped (phase 1 found no plan within the node limit)\n";
    } else {
        // one phase-2 solve per distinct type assignment of each slot
        for (int t = 0; t < num_slots(inst); ++t) {
            const auto w = weather_set(inst, t);
            std::vector<std::pair<std::vector<int>, std::vector<int>>> groups; // types -> weather ids
            std::vector<double> weight;
            for (std::size_t mu = 0; mu < w.size(); ++mu) {
                if (w[mu].p <= 0)
                    continue;
                const auto types = phase2_types_for_weather(inst, p1, t, static_cast<int>(mu));
                std::size_t g = 0;
                while (g < groups.size() && groups[g].first != types)
                    ++g;
                if (g == groups.size()) {
                    groups.push_back({types, {}});
                    weight.push_back(0);
                }
                groups[g].second.push_back(static_cast<int>(mu) + 1);
                weight[g] += w[mu].p;
            }
            const auto sub = slot_instance(inst, t);
            for (std::size_t g = 0; g < groups.size(); ++g) {
                const auto plan = solve_phase2(sub, TypeAssignment{groups[g].first}, Formulation::sip);
                limited_run = limited_run || !plan.optimal();
                json e;
                e["slot"] = t + 1;
                e["weather_scenarios"] = groups[g].second;
                e["probability"] = emit_number(weight[g]);
                e["plan"] = phase2_plan_json(sub, plan);
                cases.push_back(e);
                p2_cost += weight[g] * plan.expected_cost;
                sum << "phase 2 slot " << t + 1 << " weather {";
                for (std::size_t i = 0; i < groups[g].second.size(); ++i)
                    sum << (i ? "," : "") << groups[g].second[i];
                sum << "}: " << to_string(plan.status);
                if (plan.decisions.empty()) {
                    sum << ", no feasible plan found\n";
                    continue;
                }
                sum << ", expected cost " << fmt(plan.expected_cost) << ", stage costs";
                for (double s : plan.stage_costs)
                    sum << " " << fmt(s);
                sum << "\n";
            }
        }
    }
    json p2;
    p2["schema_version"] = kSchemaVersion;
    p2["expected_cost"] = emit_number(p2_cost);
    p2["optimal"] = !limited_run;
    p2["cases"] = cases;
    write_atomic(out_path(c, "phase2_plan.json"), p2.dump(2) + "\n");
    if (std::isfinite(p2_cost))
        sum << "total expected cost: " << fmt(p1.expected_cost + p2_cost) << "\n";
    if (limited_run)
        sum << "WARNING: node limit reached, plans are not proven optimal\n";
    write_atomic(out_path(c, "summary.txt"), sum.str());
    std::cout << sum.str();
    return limited_run ? limited : ok;
}

int cmd_sweep(const Common& c, const std::string& param, const std::string& grid) {
    const auto& names = sweep_parameters();
    if (std::find(names.begin(), names.end(), param) == names.end())
        throw InputError("unknown sweep parameter '" + param + "'");
    const auto inst = load(c);
    const auto r = sweep(inst, param, parse_grid(grid));
    const auto csv = sweep_csv(r);
    write_atomic(out_path(c, "sweep_" + param + ".csv"), csv);
    std::cout << csv;
    for (const auto& p : r.points)
        if (p.status == "node_limit")
            return limited;
    return ok;
}

int cmd_compare(const Common& c, int n_seeds, const std::string& prices) {
    const auto inst = load(c);
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < n_seeds; ++i)
        seeds.push_back(inst.seed + static_cast<std::uint64_t>(i));
    const auto grid = prices.empty() ? std::vector<double>{inst.costs.service} : parse_grid(prices);
    const auto csv = compare_csv(compare_sweep(inst, grid, seeds));
    write_atomic(out_path(c, "compare.csv"), csv);
    std::cout << csv;
    return ok;
}

int cmd_size(const Common& c, int phase, std::vector<long long> dims) {
    json j;
    j["schema_version"] = kSchemaVersion;
    if (!c.config.empty()) {
        const auto inst = load(c);
        const auto p1 = build_phase1(inst);
        const auto p2 = build_phase2_sip(inst, default_phase2_types(inst));
        const long long t = num_slots(inst), y = static_cast<long long>(inst.stations.size());
        const long long x = static_cast<long long>(inst.uav_types.size());
        const long long mu = static_cast<long long>(weather_set(inst, 0).size());
        const long long f = static_cast<long long>(inst.base_stations.size());
        const auto& sl = inst.tree.slots[0];
        std::vector<long long> om;
        for (const auto& s : sl.shortfall)
            om.push_back(static_cast<long long>(s.size()));
        const auto f1 = model_size_phase1(t, y, x, mu);
        const auto f2 = model_size_phase2(t, f, y, static_cast<long long>(sl.demand.size()), om);
        const auto f2x = model_size_phase2_extensive(t, f, y, static_cast<long long>(sl.demand.size()), om);
        j["phase1"] = {{"formula", {f1.variables, f1.constraints}},
                       {"built", {p1.model.num_variables(), p1.model.num_constraints() + p1.model.num_binaries()}}};
        j["phase2"] = {{"formula", {f2.variables, f2.constraints}},
                       {"extensive_formula", {f2x.variables, f2x.constraints}},
                       {"built", {p2.model.num_variables(), p2.model.num_constraints() + p2.model.num_binaries()}}};
    } else if (phase == 1) {
        if (dims.size() != 4)
            throw InputError("size --phase 1 needs --dims t,y,x,mu");
        const auto s = model_size_phase1(dims[0], dims[1], dims[2], dims[3]);
        j["phase1"] = {{"variables", s.variables}, {"constraints", s.constraints}};
        std::cout << "variables " << s.variables << "\nconstraints " << s.constraints << "\n";
    } else if (phase == 2) {
        if (dims.size() < 4)
            throw InputError("size --phase 2 needs --dims t,f,y,lambda[,omega3,...]");
        const std::vector<long long> om(dims.begin() + 4, dims.end());
        const auto s = model_size_phase2(dims[0], dims[1], dims[2], dims[3], om);
        const auto x = model_size_phase2_extensive(dims[0], dims[1], dims[2], dims[3], om);
        j["phase2"] = {{"variables", s.variables}, {"constraints", s.constraints},
                       {"extensive_variables", x.variables}, {"extensive_constraints", x.constraints}};
        std::cout << "variables " << s.variables << "\nconstraints " << s.constraints << "\n";
        std::cout << "built model: variables " << x.variables << ", constraints " << x.constraints << "\n";
    } else {
        throw InputError("size needs --config or --phase 1|2 with --dims");
    }
    if (!c.config.empty())
        std::cout << j.dump(2) << "\n";
    write_atomic(out_path(c, "size.json"), j.dump(2) + "\n");
    return ok;
}

int cmd_ingest(const Common& c, const std::string& csv) {
    std::ifstream in(csv, std::ios::binary);
    if (!in)
        throw InputError("cannot open demand CSV '" + csv + "'");
    const auto h = demand_hist_from_csv(read_dim_csv(in));
    const auto j = histogram_json(h);
    write_atomic(out_path(c, "demand_histogram.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return ok;
}

void error_record(const char* kind, const std::string& msg) {
    json e{{"error", kind}, {"message", msg}};
    std::cerr << e.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scos: stochastic coded offloading planner"};
    app.require_subcommand(1);

    Common plan_c, sweep_c, cmp_c, size_c, ing_c;
    auto* plan = app.add_subcommand("plan", "phase 1 then phase 2, writes plan JSON and summary");
    add_common(plan, plan_c, true);

    auto* sw = app.add_subcommand("sweep", "re-solve over a parameter grid, writes sweep_<param>.csv");
    add_common(sw, sweep_c, true);
    std::string param, grid;
    sw->add_option("--param", param, "parameter name")->required();
    sw->add_option("--grid", grid, "comma-separated, strictly increasing values")->required();

    auto* cmp = app.add_subcommand("compare", "SIP vs EVF vs random, writes compare.csv");
    add_common(cmp, cmp_c, true);
    int n_seeds = 30;
    std::string prices;
    cmp->add_option("--seeds", n_seeds, "random plans averaged per point")->check(CLI::PositiveNumber);
    cmp->add_option("--prices", prices, "comma-separated offload prices (per-copy service fee)");

    auto* sz = app.add_subcommand("size", "model dimensions from the sizing formulas");
    add_common(sz, size_c, false);
    int phase = 0;
    std::vector<long long> dims;
    sz->add_option("--phase", phase, "1 or 2");
    sz->add_option("--dims", dims, "phase 1: t,y,x,mu; phase 2: t,f,y,lambda,omega3,...")->delimiter(',');

    auto* ing = app.add_subcommand("ingest-demand", "demand histogram from a rows,cols CSV");
    add_common(ing, ing_c, false);
    std::string csv;
    ing->add_option("--csv", csv, "demand CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : input;
    }

    try {
        if (*plan)
            return cmd_plan(plan_c);
        if (*sw)
            return cmd_sweep(sweep_c, param, grid);
        if (*cmp)
            return cmd_compare(cmp_c, n_seeds, prices);
        if (*sz)
            return cmd_size(size_c, phase, dims);
        if (*ing)
            return cmd_ingest(ing_c, csv);
    } catch (const InputError& e) {
        error_record("input", e.what());
        return input;
    } catch (const InternalError& e) {
        error_record("internal", e.what());
        return internal;
    } catch (const std::exception& e) {
        error_record("internal", e.what());
        return internal;
    }
    return internal;
}
