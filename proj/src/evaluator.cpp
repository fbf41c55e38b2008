#include "scos/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "scos/errors.hpp"
#include "scos/rng.hpp"

namespace scos {

namespace {

void require_shape(const NetworkInstance& inst, const Phase2Plan& plan) {
    const auto bad = [](const std::string& what) { throw InputError("plan/instance shape mismatch: " + what); };
    if (plan.formulation == "dip")
        bad("deterministic plans carry no scenario-path decisions");
    if (plan.z != inst.tree.z)
        bad("stage count");
    if (plan.decisions.size() != inst.tree.slots.size() || plan.subscriptions.size() != inst.tree.slots.size() ||
        plan.types.size() != inst.tree.slots.size())
        bad("time slots");
    const std::size_t ny = inst.stations.size();
    const std::size_t nf = inst.base_stations.size();
    for (std::size_t t = 0; t < inst.tree.slots.size(); ++t) {
        if (plan.subscriptions[t].size() != nf)
            bad("base stations");
        if (plan.types[t].size() != ny)
            bad("stations");
        if (plan.decisions[t].size() != static_cast<std::size_t>(plan.z - 1))
            bad("stages");
        for (int j = 2; j <= plan.z; ++j) {
            const auto& st = plan.decisions[t][j - 2];
            if (st.size() != static_cast<std::size_t>(prefix_count(inst.tree.slots[t], j)))
                bad("scenario paths at stage " + std::to_string(j));
            for (const auto& row : st) {
                if (row.size() != ny)
                    bad("stations");
                for (const auto& d : row)
                    if (d.offload.size() != nf || d.threshold.size() != nf)
                        bad("base stations");
            }
        }
    }
}

// Undiscounted cost of one prefix's decisions (station sum) at stage j.
double prefix_cost(const NetworkInstance& inst, const Phase2Plan& plan, std::size_t t, int j, long long p,
                   std::vector<std::vector<StationCosts>>& cache_by_lambda) {
    const auto& sl = inst.tree.slots[t];
    const int lam = decode_prefix(sl, j, p)[0];
    auto& costs = cache_by_lambda[static_cast<std::size_t>(lam)];
    const std::size_t ny = inst.stations.size();
    if (costs.empty())
        for (std::size_t y = 0; y < ny; ++y)
            costs.push_back(station_costs(inst, y, inst.uav_types.at(plan.types[t][y]), sl.demand[lam].d[y]));
    const bool gate2 = inst.phase2.gate_stage2_threshold;
    double c = 0;
    for (std::size_t y = 0; y < ny; ++y) {
        const auto& d = plan.decisions[t][j - 2][p][y];
        const auto& sc = costs[y];
        c += static_cast<double>(d.local) * sc.local;
        for (std::size_t f = 0; f < d.offload.size(); ++f) {
            c += static_cast<double>(d.offload[f]) * sc.offload[f];
            c += (j == 2 && !gate2 ? 1.0 : static_cast<double>(d.threshold[f])) * sc.threshold;
        }
        if (j == 2)
            c += sc.decode;
        if (j == plan.z && j >= 3)
            c += path_flag(sl, j, p, static_cast<int>(y)) * inst.costs.terminal_penalty;
    }
    return c;
}

double subscription_cost(const NetworkInstance& inst, const Phase2Plan& plan) {
    double c = 0;
    for (const auto& row : plan.subscriptions)
        for (int s : row)
            c += s * inst.costs.subscription;
    return c;
}

std::vector<double> dip_stage_costs(const NetworkInstance& inst, const Phase2Plan& plan) {
    std::vector<double> out(2, 0.0);
    out[0] = subscription_cost(inst, plan);
    for (std::size_t t = 0; t < plan.decisions.size(); ++t)
        for (std::size_t y = 0; y < inst.stations.size(); ++y) {
            const auto& d = plan.decisions[t].at(0).at(0).at(y);
            const auto sc = station_costs(inst, y, inst.uav_types.at(plan.types.at(t).at(y)), plan.dip_demand.at(t).at(y));
            out[1] += static_cast<double>(d.local) * sc.local + sc.decode;
            for (std::size_t f = 0; f < d.offload.size(); ++f)
                out[1] += static_cast<double>(d.offload[f]) * sc.offload[f] + d.threshold[f] * sc.threshold;
        }
    return out;
}

} // namespace

std::vector<double> exact_stage_costs(const NetworkInstance& inst, const Phase2Plan& plan) {
    if (plan.formulation == "dip")
        return dip_stage_costs(inst, plan);
    require_shape(inst, plan);
    std::vector<double> out(static_cast<std::size_t>(plan.z), 0.0);
    out[0] = subscription_cost(inst, plan);
    for (std::size_t t = 0; t < inst.tree.slots.size(); ++t) {
        const auto& sl = inst.tree.slots[t];
        std::vector<std::vector<StationCosts>> cache(sl.demand.size());
        for (int j = 2; j <= plan.z; ++j)
            for (long long p = 0; p < prefix_count(sl, j); ++p)
                out[j - 1] += prefix_probability(sl, j, p) * prefix_cost(inst, plan, t, j, p, cache);
    }
    return out;
}

double exact_expected_cost(const NetworkInstance& inst, const Phase2Plan& plan) {
    const auto s = exact_stage_costs(inst, plan);
    return std::accumulate(s.begin(), s.end(), 0.0);
}

EvaluationReport evaluate_plan(const Phase2Plan& plan, const NetworkInstance& inst, long long n_samples,
                               std::uint64_t seed) {
    require_shape(inst, plan);
    if (n_samples < 1)
        throw InputError("evaluate_plan needs at least one sample");
    Rng rng(seed);
    EvaluationReport rep;
    rep.seed = seed;
    rep.n_samples = n_samples;
    rep.stage_costs.assign(static_cast<std::size_t>(plan.z), 0.0);
    const double stage1 = subscription_cost(inst, plan);

    std::vector<std::vector<std::vector<StationCosts>>> cache;
    std::vector<std::vector<double>> demand_p;
    std::vector<std::vector<std::vector<double>>> short_p;
    for (const auto& sl : inst.tree.slots) {
        cache.emplace_back(sl.demand.size());
        std::vector<double> dp;
        for (const auto& d : sl.demand)
            dp.push_back(d.p);
        demand_p.push_back(dp);
        std::vector<std::vector<double>> sp;
        for (const auto& stage : sl.shortfall) {
            std::vector<double> v;
            for (const auto& s : stage)
                v.push_back(s.p);
            sp.push_back(v);
        }
        short_p.push_back(sp);
    }

    double mean = 0, m2 = 0;
    std::vector<double> stage(static_cast<std::size_t>(plan.z));
    for (long long n = 1; n <= n_samples; ++n) {
        std::fill(stage.begin(), stage.end(), 0.0);
        stage[0] = stage1;
        for (std::size_t t = 0; t < inst.tree.slots.size(); ++t) {
            long long p = static_cast<long long>(rng.pick(demand_p[t]));
            stage[1] += prefix_cost(inst, plan, t, 2, p, cache[t]);
            for (int j = 3; j <= plan.z; ++j) {
                const auto& pr = short_p[t][j - 3];
                p = p * static_cast<long long>(pr.size()) + static_cast<long long>(rng.pick(pr));
                stage[j - 1] += prefix_cost(inst, plan, t, j, p, cache[t]);
            }
        }
        double total = 0;
        for (std::size_t j = 0; j < stage.size(); ++j) {
            total += stage[j];
            rep.stage_costs[j] += (stage[j] - rep.stage_costs[j]) / static_cast<double>(n);
        }
        const double delta = total - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (total - mean);
    }
    rep.mean_cost = mean;
    rep.std_error = n_samples > 1 ? std::sqrt(m2 / static_cast<double>(n_samples - 1) / static_cast<double>(n_samples)) : 0.0;
    return rep;
}

// ---------------------------------------------------------------- sweeps

namespace {

bool is_param(const std::string& p) {
    const auto& all = sweep_parameters();
    return std::find(all.begin(), all.end(), p) != all.end();
}

bool is_phase1_param(const std::string& p) { return p == "penalty_C_p" || p == "weather_prob"; }

long long as_count(double v, const std::string& what) {
    if (v != std::floor(v) || v < 1 || v > 1e9)
        throw InputError(what + " must be a positive integer (got " + std::to_string(v) + ")");
    return static_cast<long long>(v);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", round_sig12(v));
    return buf;
}

void set_weather_prob(NetworkInstance& inst, double v) {
    if (!(v >= 0 && v <= 1))
        throw InputError("weather_prob must lie in [0,1]");
    for (std::size_t t = 0; t < inst.tree.slots.size(); ++t) {
        auto w = weather_set(inst, static_cast<int>(t));
        double strong = 0;
        int calm = -1;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const bool any = std::any_of(w[i].g.begin(), w[i].g.end(), [](int g) { return g != 0; });
            if (any)
                strong += w[i].p;
            else if (calm < 0)
                calm = static_cast<int>(i);
        }
        if (strong <= 0) {
            // no strong-wind scenario to scale: use strong wind at every station
            WeatherScenario s;
            s.g.assign(inst.stations.size(), 1);
            s.p = 0;
            w.push_back(s);
        }
        if (calm < 0) {
            WeatherScenario c;
            c.g.assign(inst.stations.size(), 0);
            w.insert(w.begin(), c);
            calm = 0;
        }
        std::vector<WeatherScenario> out;
        const bool equal_split = strong <= 0;
        std::size_t n_strong = 0;
        for (const auto& s : w)
            n_strong += std::any_of(s.g.begin(), s.g.end(), [](int g) { return g != 0; });
        for (std::size_t i = 0; i < w.size(); ++i) {
            auto s = w[i];
            const bool any = std::any_of(s.g.begin(), s.g.end(), [](int g) { return g != 0; });
            if (!any) {
                if (static_cast<int>(i) != calm)
                    continue; // extra calm scenarios merge into the first one
                s.p = 1.0 - v;
            } else {
                s.p = equal_split ? v / static_cast<double>(n_strong) : s.p / strong * v;
            }
            out.push_back(s);
        }
        inst.tree.slots[t].weather = out;
    }
}

void set_shortfall_prob(NetworkInstance& inst, double v) {
    if (!(v >= 0 && v <= 1))
        throw InputError("shortfall_prob must lie in [0,1]");
    if (inst.tree.z < 3)
        throw InputError("shortfall_prob needs at least one shortfall stage (z >= 3)");
    for (auto& sl : inst.tree.slots)
        for (std::size_t j = 0; j < sl.shortfall.size(); ++j) {
            auto& stage = sl.shortfall[j];
            int best = -1;
            long long best_sum = 0;
            for (std::size_t i = 0; i < stage.size(); ++i) {
                long long s = 0;
                for (long long a : stage[i].a)
                    s += a;
                if (s > best_sum) {
                    best_sum = s;
                    best = static_cast<int>(i);
                }
            }
            if (best < 0)
                throw InputError("shortfall_prob: stage " + std::to_string(j + 3) + " has no shortfall scenario");
            ShortfallScenario hit = stage[best];
            ShortfallScenario none;
            none.f.assign(hit.f.size(), 0);
            none.a.assign(hit.a.size(), 0);
            hit.p = v;
            none.p = 1.0 - v;
            stage.clear();
            if (hit.p > 0)
                stage.push_back(hit);
            if (none.p > 0)
                stage.push_back(none);
        }
    inst.tree.masked_propagation = true;
}

void set_z(NetworkInstance& inst, long long z) {
    if (z < 2)
        throw InputError("z must be >= 2");
    for (auto& sl : inst.tree.slots) {
        if (static_cast<long long>(sl.shortfall.size()) > z - 2)
            sl.shortfall.resize(static_cast<std::size_t>(z - 2));
        if (static_cast<long long>(sl.shortfall.size()) < z - 2) {
            if (sl.shortfall.empty())
                throw InputError("cannot extend z: the tree has no shortfall stage to repeat");
            const auto last = sl.shortfall.back();
            while (static_cast<long long>(sl.shortfall.size()) < z - 2)
                sl.shortfall.push_back(last);
        }
    }
    inst.tree.z = static_cast<int>(z);
}

std::string phase2_summary(const NetworkInstance& inst, const Phase2Plan& plan) {
    std::ostringstream os;
    for (std::size_t t = 0; t < plan.subscriptions.size(); ++t) {
        if (plan.subscriptions.size() > 1)
            os << "slot" << t + 1 << ":";
        os << "sub=";
        for (std::size_t f = 0; f < plan.subscriptions[t].size(); ++f)
            os << (f ? "/" : "") << plan.subscriptions[t][f];
        const auto& sl = inst.tree.slots[t];
        for (std::size_t p = 0; p < plan.decisions[t][0].size(); ++p) {
            long long loc = 0, off = 0;
            for (const auto& d : plan.decisions[t][0][p]) {
                loc += d.local;
                for (long long o : d.offload)
                    off += o;
            }
            os << " d" << sl.demand[p].d[0] << ":L" << loc << "/O" << off;
        }
        long long later = 0;
        for (std::size_t j = 1; j < plan.decisions[t].size(); ++j)
            for (const auto& row : plan.decisions[t][j])
                for (const auto& d : row) {
                    later += d.local;
                    for (long long o : d.offload)
                        later += o;
                }
        os << " recovery_copies=" << later;
        if (t + 1 < plan.subscriptions.size())
            os << " ";
    }
    return os.str();
}

std::string phase1_summary(const Phase1Plan& plan) {
    std::ostringstream os;
    for (std::size_t t = 0; t < plan.reserved_type.size(); ++t) {
        if (t)
            os << " ";
        os << "types=";
        for (std::size_t y = 0; y < plan.reserved_type[t].size(); ++y)
            os << (y ? "/" : "") << plan.reserved_type[t][y];
    }
    return os.str();
}

// Phase-2 expected cost with types taken from a phase-1 plan, weighted over
// weather scenarios; identical type assignments are solved once.
struct WeatherGroup {
    int slot = 0;
    std::vector<int> types;
    double weight = 0;
};

std::vector<WeatherGroup> weather_groups(const NetworkInstance& inst, const Phase1Plan& p1) {
    std::vector<WeatherGroup> out;
    for (int t = 0; t < num_slots(inst); ++t) {
        const auto w = weather_set(inst, t);
        for (std::size_t mu = 0; mu < w.size(); ++mu) {
            if (w[mu].p <= 0)
                continue;
            const auto types = phase2_types_for_weather(inst, p1, t, static_cast<int>(mu));
            auto it = std::find_if(out.begin(), out.end(),
                                   [&](const WeatherGroup& g) { return g.slot == t && g.types == types; });
            if (it == out.end())
                out.push_back({t, types, w[mu].p});
            else
                it->weight += w[mu].p;
        }
    }
    return out;
}

} // namespace

NetworkInstance apply_sweep_value(const NetworkInstance& base, const std::string& parameter, double value) {
    if (!is_param(parameter))
        throw InputError("unknown sweep parameter '" + parameter + "'");
    if (!std::isfinite(value))
        throw InputError("sweep values must be finite");
    NetworkInstance inst = base;
    if (parameter == "penalty_C_p") {
        if (value < 0)
            throw InputError("penalty_C_p must be >= 0");
        inst.costs.crash_penalty = value;
    } else if (parameter == "weather_prob") {
        set_weather_prob(inst, value);
    } else if (parameter == "z") {
        set_z(inst, as_count(value, "z"));
    } else if (parameter == "hover_multiplier") {
        if (value < 0)
            throw InputError("hover_multiplier must be >= 0");
        inst.phase2.hover_multiplier = value;
    } else if (parameter == "shortfall_prob") {
        set_shortfall_prob(inst, value);
    } else if (parameter == "split_s") {
        const long long s = as_count(value, "split_s");
        if (inst.split.m % s != 0)
            throw InputError("split_s=" + std::to_string(s) + " does not divide m=" + std::to_string(inst.split.m));
        inst.split = make_split(s, inst.split.m / s);
    } else if (parameter == "uav_type") {
        const long long id = as_count(value, "uav_type");
        type_index(inst, static_cast<int>(id));
        inst.phase2_types.assign(inst.stations.size(), static_cast<int>(id));
    } else if (parameter == "offload_price") {
        if (value < 0)
            throw InputError("offload_price must be >= 0");
        inst.costs.service = value;
    }
    validate_instance(inst);
    return inst;
}

SweepResult sweep(const NetworkInstance& inst, const std::string& parameter, const std::vector<double>& grid) {
    if (!is_param(parameter))
        throw InputError("unknown sweep parameter '" + parameter + "'");
    if (grid.empty())
        throw InputError("sweep grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw InputError("sweep grid must be strictly increasing");
    SweepResult r;
    r.parameter = parameter;
    r.grid = grid;
    for (double v : grid) {
        SweepPoint pt;
        pt.value = v;
        NetworkInstance mod;
        try {
            mod = apply_sweep_value(inst, parameter, v);
        } catch (const InputError& e) {
            // only the divisor rule of split_s skips a point; other bad values are errors
            if (parameter != "split_s" || std::string(e.what()).find("does not divide") == std::string::npos)
                throw;
            pt.status = "skipped";
            pt.summary = e.what();
            r.points.push_back(pt);
            continue;
        }
        if (is_phase1_param(parameter)) {
            const auto p1 = solve_phase1(mod);
            pt.status = to_string(p1.status);
            pt.objective = p1.expected_cost;
            pt.stage_costs = {p1.reservation_cost, p1.expected_recourse_cost};
            pt.summary = phase1_summary(p1);
        } else if (parameter == "uav_type") {
            // whole network forced onto one type: reservation, crash recourse, computation
            const int x = static_cast<int>(type_index(mod, static_cast<int>(v)));
            const int big = static_cast<int>(mod.uav_types.size()) - 1;
            double p1 = 0, p2 = 0;
            std::vector<double> stages;
            bool all_optimal = true;
            for (int t = 0; t < num_slots(mod); ++t) {
                const auto w = weather_set(mod, t);
                const double recourse = on_demand_cost(mod.uav_types.back(), mod.uav_types, mod.costs) +
                                        mod.costs.crash_penalty;
                p1 += reservation_cost(mod.uav_types[x], mod.costs) * static_cast<double>(mod.stations.size());
                const auto sub = slot_instance(mod, t);
                for (const auto& ws : w) {
                    if (ws.p <= 0)
                        continue;
                    std::vector<int> types;
                    for (std::size_t y = 0; y < mod.stations.size(); ++y) {
                        const bool crash = ws.g[y] && x != big;
                        types.push_back(crash ? big : x);
                        if (crash)
                            p1 += ws.p * recourse;
                    }
                    const auto plan = solve_phase2(sub, TypeAssignment{types}, Formulation::sip);
                    all_optimal = all_optimal && plan.optimal();
                    p2 += ws.p * plan.expected_cost;
                    if (stages.size() < plan.stage_costs.size())
                        stages.resize(plan.stage_costs.size(), 0.0);
                    for (std::size_t j = 0; j < plan.stage_costs.size(); ++j)
                        stages[j] += ws.p * plan.stage_costs[j];
                }
            }
            pt.status = all_optimal ? "optimal" : "node_limit";
            pt.objective = p1 + p2;
            pt.stage_costs = stages;
            pt.summary = "type=" + std::to_string(static_cast<long long>(v)) + " allocation_cost=" + num(p1);
        } else {
            const auto plan = solve_phase2(mod, Formulation::sip);
            pt.status = to_string(plan.status);
            pt.objective = plan.expected_cost;
            pt.stage_costs = plan.stage_costs;
            pt.summary = plan.decisions.empty() ? "no incumbent" : phase2_summary(mod, plan);
        }
        r.points.push_back(pt);
    }
    return r;
}

std::string sweep_csv(const SweepResult& r) {
    std::size_t ns = 0;
    for (const auto& p : r.points)
        ns = std::max(ns, p.stage_costs.size());
    const bool phase1 = is_phase1_param(r.parameter);
    std::ostringstream os;
    os << "parameter,value,status,objective";
    for (std::size_t j = 0; j < ns; ++j) {
        if (phase1)
            os << (j == 0 ? ",reservation_cost" : ",expected_recourse_cost");
        else
            os << ",stage" << j + 1 << "_cost";
    }
    os << ",summary\n";
    for (const auto& p : r.points) {
        os << r.parameter << "," << num(p.value) << "," << p.status << ",";
        if (p.status != "skipped")
            os << num(p.objective);
        for (std::size_t j = 0; j < ns; ++j) {
            os << ",";
            if (j < p.stage_costs.size())
                os << num(p.stage_costs[j]);
        }
        std::string s = p.summary;
        std::replace(s.begin(), s.end(), ',', ';');
        std::replace(s.begin(), s.end(), '\n', ' ');
        os << "," << s << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------- compare

CompareRow compare(const NetworkInstance& inst, const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty())
        throw InputError("compare needs at least one random seed");
    CompareRow row;
    row.offload_price = inst.costs.service;
    const auto p1 = solve_phase1(inst);
    if (p1.status != SolveStatus::optimal)
        throw InputError("compare: phase 1 hit the node limit");
    row.phase1_cost = p1.expected_cost;
    std::vector<double> per_seed(seeds.size(), 0.0);
    for (const auto& g : weather_groups(inst, p1)) {
        const auto sub = slot_instance(inst, g.slot);
        const TypeAssignment types{g.types};
        const auto sip = solve_phase2(sub, types, Formulation::sip);
        if (!sip.optimal())
            throw InputError("compare: the SIP hit the node limit");
        row.sip_cost += g.weight * sip.expected_cost;
        row.sip_exact += g.weight * exact_expected_cost(sub, sip);
        row.evf_cost += g.weight * evf_plan(sub, types).expected_cost;
        for (std::size_t i = 0; i < seeds.size(); ++i)
            per_seed[i] += g.weight * random_plan(sub, types, seeds[i]).expected_cost;
    }
    const double n = static_cast<double>(seeds.size());
    row.random_cost = std::accumulate(per_seed.begin(), per_seed.end(), 0.0) / n;
    if (seeds.size() > 1) {
        double ss = 0;
        for (double c : per_seed)
            ss += (c - row.random_cost) * (c - row.random_cost);
        row.random_std_error = std::sqrt(ss / (n - 1) / n);
    }
    return row;
}

std::vector<CompareRow> compare_sweep(const NetworkInstance& inst, const std::vector<double>& prices,
                                      const std::vector<std::uint64_t>& seeds) {
    if (prices.empty())
        throw InputError("offload price grid is empty");
    for (std::size_t i = 1; i < prices.size(); ++i)
        if (!(prices[i] > prices[i - 1]))
            throw InputError("offload price grid must be strictly increasing");
    std::vector<CompareRow> out;
    for (double p : prices)
        out.push_back(compare(apply_sweep_value(inst, "offload_price", p), seeds));
    return out;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream os;
    os << "offload_price,phase1_cost,sip_cost,evf_cost,random_cost,random_std_error,sip_exact\n";
    for (const auto& r : rows)
        os << num(r.offload_price) << "," << num(r.phase1_cost) << "," << num(r.sip_cost) << "," << num(r.evf_cost)
           << "," << num(r.random_cost) << "," << num(r.random_std_error) << "," << num(r.sip_exact) << "\n";
    return os.str();
}

} // namespace scos
