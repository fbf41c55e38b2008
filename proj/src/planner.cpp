#include "scos/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "scos/errors.hpp"
#include "scos/evaluator.hpp"
#include "scos/rng.hpp"

namespace scos {

namespace {

std::string idx(const char* key, long long v) { return std::string("[") + key + "=" + std::to_string(v) + "]"; }

long long round_count(double v) { return static_cast<long long>(std::llround(v)); }

} // namespace

// ---------------------------------------------------------------- phase 1

Phase1Model build_phase1(const NetworkInstance& inst) {
    validate_instance(inst);
    Phase1Model out{IPModel("phase1"), {}};
    auto& m = out.model;
    const int nt = num_slots(inst);
    const int ny = static_cast<int>(inst.stations.size());
    const int nx = static_cast<int>(inst.uav_types.size());
    const auto& big = largest_type(inst);
    const double recourse_cost = on_demand_cost(big, inst.uav_types, inst.costs) + inst.costs.crash_penalty;
    const bool multi = nt > 1;

    out.layout.reserve.assign(nt, std::vector<std::vector<int>>(ny, std::vector<int>(nx, -1)));
    out.layout.recourse.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const std::string st = multi ? idx("slot", t + 1) : "";
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x)
                out.layout.reserve[t][y][x] =
                    m.add_variable("T" + st + idx("station", y + 1) + idx("type", inst.uav_types[x].id),
                                   VarKind::binary, 0, 1, reservation_cost(inst.uav_types[x], inst.costs));
        const auto weather = weather_set(inst, t);
        out.layout.recourse[t].assign(weather.size(), std::vector<int>(ny, -1));
        for (std::size_t mu = 0; mu < weather.size(); ++mu)
            for (int y = 0; y < ny; ++y)
                out.layout.recourse[t][mu][y] = m.add_variable(
                    "T_X" + st + idx("station", y + 1) + idx("weather", static_cast<long long>(mu) + 1),
                    VarKind::binary, 0, 1, weather[mu].p * recourse_cost);
        for (int y = 0; y < ny; ++y) {
            std::vector<Term> terms;
            for (int x = 0; x < nx; ++x)
                terms.emplace_back(out.layout.reserve[t][y][x], 1.0);
            m.add_constraint(terms, Sense::eq, 1.0, "reserve_one" + st + idx("station", y + 1));
        }
        // recourse X flies exactly when a reserved non-largest UAV crashes
        for (std::size_t mu = 0; mu < weather.size(); ++mu)
            for (int y = 0; y < ny; ++y) {
                std::vector<Term> terms{{out.layout.recourse[t][mu][y], 1.0}};
                for (int x = 0; x + 1 < nx; ++x)
                    terms.emplace_back(out.layout.reserve[t][y][x], -static_cast<double>(weather[mu].g[y]));
                m.add_constraint(terms, Sense::eq, 0.0,
                                 "crash_recourse" + st + idx("station", y + 1) +
                                     idx("weather", static_cast<long long>(mu) + 1));
            }
    }
    return out;
}

Phase1Plan solve_phase1(const NetworkInstance& inst) {
    const auto built = build_phase1(inst);
    const Solution sol = solve_exact(built.model, inst.solver);
    if (sol.status == SolveStatus::infeasible || sol.status == SolveStatus::unbounded)
        throw InternalError(std::string("phase-1 model is ") + to_string(sol.status));
    Phase1Plan plan;
    plan.status = sol.status;
    plan.nodes = sol.nodes_explored;
    if (!sol.has_incumbent())
        return plan;
    const auto& L = built.layout;
    const auto& obj = built.model.objective();
    for (std::size_t t = 0; t < L.reserve.size(); ++t) {
        std::vector<int> row;
        for (std::size_t y = 0; y < L.reserve[t].size(); ++y) {
            int chosen = -1;
            for (std::size_t x = 0; x < L.reserve[t][y].size(); ++x) {
                const int v = L.reserve[t][y][x];
                if (round_count(sol.x[v]) == 1) {
                    chosen = inst.uav_types[x].id;
                    plan.reservation_cost += obj[v];
                }
            }
            row.push_back(chosen);
        }
        plan.reserved_type.push_back(row);
        std::vector<std::vector<int>> rec;
        for (const auto& w : L.recourse[t]) {
            std::vector<int> r;
            for (int v : w) {
                r.push_back(static_cast<int>(round_count(sol.x[v])));
                plan.expected_recourse_cost += obj[v] * static_cast<double>(r.back());
            }
            rec.push_back(r);
        }
        plan.recourse.push_back(rec);
    }
    plan.expected_cost = sol.objective;
    if (std::abs(plan.reservation_cost + plan.expected_recourse_cost - sol.objective) > 1e-6)
        throw InternalError("phase-1 cost breakdown does not match the objective");
    return plan;
}

std::vector<int> phase2_types_for_weather(const NetworkInstance& inst, const Phase1Plan& plan, int slot,
                                          int weather) {
    const auto w = weather_set(inst, slot);
    const int big = static_cast<int>(inst.uav_types.size()) - 1;
    std::vector<int> out;
    for (std::size_t y = 0; y < inst.stations.size(); ++y) {
        const int r = static_cast<int>(type_index(inst, plan.reserved_type.at(slot).at(y)));
        out.push_back(w.at(weather).g[y] && r != big ? big : r);
    }
    return out;
}

// ---------------------------------------------------------------- phase 2 costs

StationCosts station_costs(const NetworkInstance& inst, std::size_t station, const UavType& uav, long long n) {
    StationCosts c;
    const auto pos = uav_position(inst, station, uav);
    c.local = local_copy_cost(uav, inst.env, n, inst.split, inst.costs);
    for (const auto& bs : inst.base_stations) {
        const double r = link_rate(uav, inst.env, pos, bs_position(bs));
        c.offload.push_back(offload_copy_cost_at_rate(uav, inst.env, n, inst.split, r, r, inst.costs));
    }
    c.threshold = hover_threshold_cost(uav, inst.env, n, inst.split, inst.costs) * inst.phase2.hover_multiplier;
    c.decode = decode_cost(uav, inst.env, n, inst.split, inst.costs);
    return c;
}

namespace {

class CostTable {
public:
    CostTable(const NetworkInstance& inst, const TypeAssignment& types) : inst_(inst), types_(types) {}

    const StationCosts& get(int slot, int station, long long n) {
        const int type = types_.at(slot).at(station);
        const auto key = std::make_tuple(station, type, n);
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(key, station_costs(inst_, station, inst_.uav_types.at(type), n)).first;
        return it->second;
    }

private:
    const NetworkInstance& inst_;
    const TypeAssignment& types_;
    std::map<std::tuple<int, int, long long>, StationCosts> cache_;
};

void check_types(const NetworkInstance& inst, const TypeAssignment& types) {
    if (types.size() != inst.tree.slots.size())
        throw InputError("type assignment must cover every time slot");
    for (const auto& row : types) {
        if (row.size() != inst.stations.size())
            throw InputError("type assignment must cover every station");
        for (int t : row)
            if (t < 0 || t >= static_cast<int>(inst.uav_types.size()))
                throw InputError("type assignment refers to an unknown UAV type");
    }
}

long long max_magnitude(const SlotScenarios& slot) {
    long long a = 0;
    for (const auto& stage : slot.shortfall)
        for (const auto& s : stage)
            for (long long v : s.a)
                a = std::max(a, v);
    return a;
}

long long max_magnitude(const ScenarioTree& tree) {
    long long a = 0;
    for (const auto& s : tree.slots)
        a = std::max(a, max_magnitude(s));
    return a;
}

// ancestor prefix id at stage `at` of prefix `id` at stage `stage`
long long ancestor(const SlotScenarios& slot, int stage, long long id, int at) {
    for (int j = stage; j > at; --j)
        id /= static_cast<long long>(slot.shortfall[j - 3].size());
    return id;
}

std::string scen_name(int stage, long long id) { return idx("stage", stage) + "%" + idx("scenario", id + 1); }

} // namespace

double big_m(const NetworkInstance& inst) {
    long long q = 0;
    for (const auto& bs : inst.base_stations)
        q += bs.servers;
    return static_cast<double>(q + inst.split.k + max_magnitude(inst.tree));
}

// ---------------------------------------------------------------- DIP

Phase2Model build_phase2_dip(const NetworkInstance& inst, const TypeAssignment& types,
                             const std::vector<std::vector<long long>>& demand,
                             const std::vector<std::vector<double>>& shortfall) {
    validate_instance(inst);
    check_types(inst, types);
    const int nt = num_slots(inst);
    const int ny = static_cast<int>(inst.stations.size());
    const int nf = static_cast<int>(inst.base_stations.size());
    if (demand.size() != static_cast<std::size_t>(nt) || shortfall.size() != static_cast<std::size_t>(nt))
        throw InputError("DIP demand and shortfall must cover every time slot");
    for (int t = 0; t < nt; ++t) {
        if (demand[t].size() != static_cast<std::size_t>(ny) || shortfall[t].size() != static_cast<std::size_t>(ny))
            throw InputError("DIP demand and shortfall must list one value per station");
        for (int y = 0; y < ny; ++y) {
            if (demand[t][y] <= 0)
                throw InputError("DIP demand must be a positive integer dimension");
            if (!(shortfall[t][y] >= 0))
                throw InputError("DIP shortfall must be non-negative");
        }
    }
    const double sigma = big_m(inst);
    const double k = static_cast<double>(inst.split.k);
    const bool multi = nt > 1;
    CostTable table(inst, types);

    Phase2Model out{IPModel("phase2_dip"), {}};
    auto& m = out.model;
    auto& L = out.layout;
    L.z = 2;
    L.stage_constant.assign(2, 0.0);
    auto addv = [&](const std::string& name, VarKind kind, double lo, double hi, double obj, int stage) {
        const int v = m.add_variable(name, kind, lo, hi, obj);
        L.var_stage.push_back(stage);
        return v;
    };
    L.subscribe.resize(nt);
    L.ids.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const std::string st = multi ? idx("slot", t + 1) : "";
        for (int f = 0; f < nf; ++f) {
            L.subscribe[t].push_back(
                addv("M_S" + st + idx("bs", f + 1), VarKind::binary, 0, 1, inst.costs.subscription, 1));
            m.set_priority(L.subscribe[t].back(), 3);
        }
        L.ids[t].assign(1, std::vector<std::vector<Phase2Ids>>(1, std::vector<Phase2Ids>(ny)));
        auto& ids = L.ids[t][0][0];
        const double lmax =
            inst.phase2.force_no_local ? 0.0 : k + std::ceil(shortfall[t].empty() ? 0.0 : *std::max_element(shortfall[t].begin(), shortfall[t].end()));
        for (int y = 0; y < ny; ++y) {
            const auto& c = table.get(t, y, demand[t][y]);
            const std::string sy = st + idx("station", y + 1);
            ids[y].local = addv("M_L" + sy, VarKind::integer, 0, lmax, c.local, 2);
            for (int f = 0; f < nf; ++f) {
                const auto& bs = inst.base_stations[f];
                ids[y].offload.push_back(addv("M_O" + sy + idx("bs", f + 1), VarKind::integer, 0,
                                              static_cast<double>(bs.servers), c.offload[f], 2));
                ids[y].threshold.push_back(
                    addv("M_TH" + sy + idx("bs", f + 1), VarKind::binary, 0, 1, c.threshold, 2));
                m.set_priority(ids[y].threshold.back(), 1);
            }
            L.stage_constant[1] += c.decode;
        }
        for (int f = 0; f < nf; ++f) {
            std::vector<Term> terms;
            for (int y = 0; y < ny; ++y)
                terms.emplace_back(ids[y].offload[f], 1.0);
            auto link = terms;
            link.emplace_back(L.subscribe[t][f], -sigma);
            m.add_constraint(link, Sense::le, 0.0, "subscribe" + st + idx("bs", f + 1));
            m.add_constraint(terms, Sense::le, static_cast<double>(inst.base_stations[f].servers),
                             "capacity" + st + idx("bs", f + 1));
        }
        for (int y = 0; y < ny; ++y) {
            const std::string sy = st + idx("station", y + 1);
            for (int f = 0; f < nf; ++f)
                m.add_constraint({{ids[y].offload[f], 1.0}, {ids[y].threshold[f], -sigma}}, Sense::le, 0.0,
                                 "threshold_link" + sy + idx("bs", f + 1));
            std::vector<Term> all{{ids[y].local, 1.0}};
            std::vector<Term> off;
            for (int f = 0; f < nf; ++f) {
                all.emplace_back(ids[y].offload[f], 1.0);
                off.emplace_back(ids[y].offload[f], 1.0);
            }
            // offloads cover whatever the local copies leave of the shortfall
            auto cover = off;
            cover.emplace_back(ids[y].local, 1.0);
            m.add_constraint(cover, Sense::ge, shortfall[t][y], "shortfall_cover" + sy);
            m.add_constraint(all, Sense::ge, k + shortfall[t][y], "recovery" + sy);
        }
    }
    m.set_objective_constant(L.stage_constant[0] + L.stage_constant[1]);
    return out;
}

// ---------------------------------------------------------------- SIP

Phase2Model build_phase2_sip(const NetworkInstance& inst, const TypeAssignment& types) {
    validate_instance(inst);
    check_types(inst, types);
    const int nt = num_slots(inst);
    const int ny = static_cast<int>(inst.stations.size());
    const int nf = static_cast<int>(inst.base_stations.size());
    const int z = inst.tree.z;
    const double sigma = big_m(inst);
    const double k = static_cast<double>(inst.split.k);
    const bool gate2 = inst.phase2.gate_stage2_threshold;
    const bool multi = nt > 1;
    CostTable table(inst, types);

    Phase2Model out{IPModel("phase2_sip"), {}};
    auto& m = out.model;
    auto& L = out.layout;
    L.z = z;
    L.stage_constant.assign(static_cast<std::size_t>(z), 0.0);
    auto addv = [&](const std::string& name, VarKind kind, double lo, double hi, double obj, int stage) {
        const int v = m.add_variable(name, kind, lo, hi, obj);
        L.var_stage.push_back(stage);
        return v;
    };
    L.subscribe.resize(nt);
    L.ids.resize(nt);

    for (int t = 0; t < nt; ++t) {
        const auto& sl = inst.tree.slots[t];
        const std::string st = multi ? idx("slot", t + 1) : "";
        // no scenario ever needs more than k plus every loss on its path, so a
        // larger copy count is dominated; capping it tightens the relaxation
        const double need = k + static_cast<double>((z - 2) * max_magnitude(sl));
        const double lmax = inst.phase2.force_no_local ? 0.0 : need;
        for (int f = 0; f < nf; ++f) {
            L.subscribe[t].push_back(
                addv("M_S" + st + idx("bs", f + 1), VarKind::binary, 0, 1, inst.costs.subscription, 1));
            m.set_priority(L.subscribe[t].back(), 3);
        }

        auto& ids = L.ids[t];
        ids.resize(static_cast<std::size_t>(z - 1));
        for (int j = 2; j <= z; ++j) {
            const long long np = prefix_count(sl, j);
            ids[j - 2].assign(static_cast<std::size_t>(np), std::vector<Phase2Ids>(ny));
            for (long long p = 0; p < np; ++p) {
                const double prob = prefix_probability(sl, j, p);
                const int lam = decode_prefix(sl, j, p)[0];
                const std::string sp = st + scen_name(j, p);
                for (int y = 0; y < ny; ++y) {
                    const auto& c = table.get(t, y, sl.demand[lam].d[y]);
                    auto& v = ids[j - 2][p][y];
                    auto nm = [&](const char* base, int f) {
                        std::string s = base + sp;
                        const std::string tail = idx("station", y + 1) + (f >= 0 ? idx("bs", f + 1) : "");
                        s.replace(s.find('%'), 1, tail);
                        return s;
                    };
                    v.local = addv(nm("M_L", -1), VarKind::integer, 0, lmax, prob * c.local, j);
                    for (int f = 0; f < nf; ++f) {
                        v.offload.push_back(addv(nm("M_O", f), VarKind::integer, 0,
                                                 std::min(need, static_cast<double>(inst.base_stations[f].servers)),
                                                 prob * c.offload[f], j));
                        const double th = (j == 2 && !gate2) ? 0.0 : prob * c.threshold;
                        v.threshold.push_back(addv(nm("M_TH", f), VarKind::binary, 0, 1, th, j));
                        m.set_priority(v.threshold.back(), 1);
                    }
                    if (j >= 3) {
                        v.exposed = addv(nm("E", -1), VarKind::binary, 0, 1, 0.0, j);
                        m.set_priority(v.exposed, 2);
                    }
                    if (j == 2) {
                        L.stage_constant[1] += prob * c.decode;
                        if (!gate2)
                            L.stage_constant[1] += prob * c.threshold * nf;
                    }
                }
                if (j == z && z >= 3)
                    for (int y = 0; y < ny; ++y)
                        L.stage_constant[z - 1] += prob * path_flag(sl, j, p, y) * inst.costs.terminal_penalty;
            }
        }

        // rows
        for (int j = 2; j <= z; ++j) {
            const long long np = prefix_count(sl, j);
            for (long long p = 0; p < np; ++p) {
                const std::string sp = st + idx("stage", j) + idx("scenario", p + 1);
                for (int f = 0; f < nf; ++f) {
                    std::vector<Term> terms;
                    for (int y = 0; y < ny; ++y)
                        terms.emplace_back(ids[j - 2][p][y].offload[f], 1.0);
                    auto link = terms;
                    link.emplace_back(L.subscribe[t][f], -sigma);
                    m.add_constraint(link, Sense::le, 0.0, "subscribe" + sp + idx("bs", f + 1));
                    m.add_constraint(terms, Sense::le, static_cast<double>(inst.base_stations[f].servers),
                                     "capacity" + sp + idx("bs", f + 1));
                }
                for (int y = 0; y < ny; ++y)
                    for (int f = 0; f < nf; ++f) {
                        const auto& v = ids[j - 2][p][y];
                        m.add_constraint({{v.offload[f], 1.0}, {v.threshold[f], -sigma}}, Sense::le, 0.0,
                                         "threshold_link" + sp + idx("station", y + 1) + idx("bs", f + 1));
                    }
            }
        }
        for (long long p = 0; p < prefix_count(sl, 2); ++p)
            for (int y = 0; y < ny; ++y) {
                const auto& v = ids[0][p][y];
                std::vector<Term> terms{{v.local, 1.0}};
                for (int f = 0; f < nf; ++f)
                    terms.emplace_back(v.offload[f], 1.0);
                m.add_constraint(terms, Sense::ge, k,
                                 "copies" + st + idx("scenario", p + 1) + idx("station", y + 1));
            }
        for (int j = 3; j <= z; ++j) {
            const long long np = prefix_count(sl, j);
            for (long long p = 0; p < np; ++p) {
                const long long parent = ancestor(sl, j, p, j - 1);
                for (int y = 0; y < ny; ++y) {
                    const std::string sy = st + idx("stage", j) + idx("scenario", p + 1) + idx("station", y + 1);
                    const auto& v = ids[j - 2][p][y];
                    const auto& pv = ids[j - 3][parent][y];
                    for (int f = 0; f < nf; ++f)
                        m.add_constraint({{v.exposed, 1.0}, {pv.threshold[f], -1.0}}, Sense::ge, 0.0,
                                         "exposure" + sy + idx("bs", f + 1));
                    if (j >= 4)
                        m.add_constraint({{v.exposed, 1.0}, {pv.exposed, -1.0}}, Sense::ge, 0.0,
                                         "exposure_carry" + sy);

                    // losses come out of copies already offloaded
                    std::vector<Term> pool;
                    for (int i = 2; i < j; ++i) {
                        const auto& av = ids[i - 2][ancestor(sl, j, p, i)][y];
                        for (int f = 0; f < nf; ++f)
                            pool.emplace_back(av.offload[f], 1.0);
                    }
                    pool.emplace_back(v.exposed, -static_cast<double>(path_loss(sl, j, p, y)));
                    m.add_constraint(pool, Sense::ge, 0.0, "loss_pool" + sy);

                    std::vector<Term> rec;
                    const auto& v2 = ids[0][ancestor(sl, j, p, 2)][y];
                    rec.emplace_back(v2.local, 1.0);
                    for (int f = 0; f < nf; ++f)
                        rec.emplace_back(v2.offload[f], 1.0);
                    for (int i = 3; i <= j; ++i) {
                        const long long a = ancestor(sl, j, p, i);
                        const auto& av = ids[i - 2][a][y];
                        const double flag = path_flag(sl, i, a, y);
                        rec.emplace_back(av.local, flag);
                        for (int f = 0; f < nf; ++f)
                            rec.emplace_back(av.offload[f], flag);
                        rec.emplace_back(av.exposed, -static_cast<double>(path_loss(sl, i, a, y)));
                    }
                    m.add_constraint(rec, Sense::ge, k, "recovery" + sy);
                }
            }
        }
    }
    double c = 0;
    for (double v : L.stage_constant)
        c += v;
    m.set_objective_constant(c);
    return out;
}

// ---------------------------------------------------------------- decoding

Phase2Plan decode_phase2(const Phase2Model& built, const Solution& sol, const std::string& formulation) {
    Phase2Plan plan;
    plan.formulation = formulation;
    plan.status = sol.status;
    plan.nodes = sol.nodes_explored;
    plan.z = built.layout.z;
    if (!sol.has_incumbent()) {
        plan.expected_cost = kInf;
        return plan;
    }
    const auto& L = built.layout;
    const auto& x = sol.x;
    auto val = [&](int v) { return v < 0 ? 0LL : round_count(x[v]); };
    for (const auto& row : L.subscribe) {
        std::vector<int> s;
        for (int v : row)
            s.push_back(static_cast<int>(val(v)));
        plan.subscriptions.push_back(s);
    }
    plan.decisions.resize(L.ids.size());
    for (std::size_t t = 0; t < L.ids.size(); ++t) {
        plan.decisions[t].resize(L.ids[t].size());
        for (std::size_t j = 0; j < L.ids[t].size(); ++j) {
            plan.decisions[t][j].resize(L.ids[t][j].size());
            for (std::size_t p = 0; p < L.ids[t][j].size(); ++p)
                for (const auto& id : L.ids[t][j][p]) {
                    StageDecision d;
                    d.local = val(id.local);
                    for (int v : id.offload)
                        d.offload.push_back(val(v));
                    for (int v : id.threshold)
                        d.threshold.push_back(static_cast<int>(val(v)));
                    d.exposed = static_cast<int>(val(id.exposed));
                    plan.decisions[t][j][p].push_back(d);
                }
        }
    }
    plan.stage_costs = L.stage_constant;
    const auto& obj = built.model.objective();
    for (std::size_t v = 0; v < obj.size(); ++v)
        plan.stage_costs[L.var_stage[v] - 1] += obj[v] * x[v];
    double sum = 0;
    for (double c : plan.stage_costs)
        sum += c;
    if (std::abs(sum - sol.objective) > 1e-6 * std::max(1.0, std::abs(sol.objective)))
        throw InternalError("phase-2 stage breakdown does not add up to the objective");
    plan.expected_cost = sol.objective;
    return plan;
}

std::vector<double> plan_assignment(const Phase2Layout& layout, const Phase2Plan& plan, int num_vars) {
    std::vector<double> x(static_cast<std::size_t>(num_vars), 0.0);
    for (std::size_t t = 0; t < layout.subscribe.size(); ++t)
        for (std::size_t f = 0; f < layout.subscribe[t].size(); ++f)
            x[layout.subscribe[t][f]] = plan.subscriptions.at(t).at(f);
    for (std::size_t t = 0; t < layout.ids.size(); ++t)
        for (std::size_t j = 0; j < layout.ids[t].size(); ++j)
            for (std::size_t p = 0; p < layout.ids[t][j].size(); ++p)
                for (std::size_t y = 0; y < layout.ids[t][j][p].size(); ++y) {
                    const auto& id = layout.ids[t][j][p][y];
                    const auto& d = plan.decisions.at(t).at(j).at(p).at(y);
                    x[id.local] = static_cast<double>(d.local);
                    for (std::size_t f = 0; f < id.offload.size(); ++f) {
                        x[id.offload[f]] = static_cast<double>(d.offload.at(f));
                        x[id.threshold[f]] = d.threshold.at(f);
                    }
                    if (id.exposed >= 0)
                        x[id.exposed] = d.exposed;
                }
    return x;
}

// ---------------------------------------------------------------- solve entry points

std::vector<std::vector<long long>> mean_demand(const ScenarioTree& tree) {
    std::vector<std::vector<long long>> out;
    for (const auto& sl : tree.slots) {
        std::vector<long long> row;
        for (int y = 0; y < tree.num_stations; ++y) {
            double m = 0;
            for (const auto& d : sl.demand)
                m += d.p * static_cast<double>(d.d[y]);
            // nearest integer, ties up
            row.push_back(std::max(1LL, static_cast<long long>(std::floor(m + 0.5 + 1e-9))));
        }
        out.push_back(row);
    }
    return out;
}

std::vector<std::vector<double>> mean_shortfall(const ScenarioTree& tree) {
    std::vector<std::vector<double>> out;
    for (const auto& sl : tree.slots) {
        std::vector<double> row(static_cast<std::size_t>(tree.num_stations), 0.0);
        for (int j = 3; j <= tree.z; ++j)
            for (long long p = 0; p < prefix_count(sl, j); ++p) {
                const double prob = prefix_probability(sl, j, p);
                for (int y = 0; y < tree.num_stations; ++y)
                    row[y] += prob * static_cast<double>(path_loss(sl, j, p, y));
            }
        out.push_back(row);
    }
    return out;
}

namespace {

Solution solve_checked(const NetworkInstance& inst, const IPModel& model) {
    Solution sol = solve_exact(model, inst.solver);
    if (sol.status == SolveStatus::unbounded)
        throw InternalError(model.name() + " is unbounded");
    if (sol.status == SolveStatus::infeasible) {
        if (inst.phase2.force_no_local)
            throw InputError(model.name() + " is infeasible with local computing disabled (offload capacity too small)");
        throw InternalError(model.name() + " is infeasible");
    }
    if (sol.has_incumbent() && model.max_violation(sol.x) > 1e-6)
        throw InternalError(model.name() + ": solver returned an infeasible assignment");
    return sol;
}

} // namespace

Phase2Plan solve_phase2(const NetworkInstance& inst, const TypeAssignment& types, Formulation f) {
    Phase2Plan plan;
    if (f == Formulation::sip) {
        const auto built = build_phase2_sip(inst, types);
        plan = decode_phase2(built, solve_checked(inst, built.model), "sip");
    } else {
        const auto d = mean_demand(inst.tree);
        const auto s = mean_shortfall(inst.tree);
        const auto built = build_phase2_dip(inst, types, d, s);
        plan = decode_phase2(built, solve_checked(inst, built.model), "dip");
        plan.dip_demand = d;
        plan.dip_shortfall = s;
    }
    plan.types = types;
    return plan;
}

Phase2Plan solve_phase2(const NetworkInstance& inst, Formulation f) {
    return solve_phase2(inst, default_phase2_types(inst), f);
}

Phase2Plan evf_plan(const NetworkInstance& inst, const TypeAssignment& types) {
    const auto demand = mean_demand(inst.tree);
    const auto shortfall = mean_shortfall(inst.tree);
    const auto dip = build_phase2_dip(inst, types, demand, shortfall);
    const Solution ds = solve_checked(inst, dip.model);
    if (!ds.has_incumbent())
        throw InputError("EVF: the expected-value DIP hit the node limit without a solution");
    auto val = [&](int v) { return static_cast<double>(round_count(ds.x[v])); };

    auto build_fixed = [&](bool exact_split) {
        auto built = build_phase2_sip(inst, types);
        auto& m = built.model;
        const auto& L = built.layout;
        for (std::size_t t = 0; t < L.subscribe.size(); ++t) {
            for (std::size_t f = 0; f < L.subscribe[t].size(); ++f) {
                const double s = val(dip.layout.subscribe[t][f]);
                m.set_bounds(L.subscribe[t][f], s, s);
            }
            for (std::size_t p = 0; p < L.ids[t][0].size(); ++p)
                for (std::size_t y = 0; y < L.ids[t][0][p].size(); ++y) {
                    const auto& sv = L.ids[t][0][p][y];
                    const auto& dv = dip.layout.ids[t][0][0][y];
                    if (exact_split) {
                        m.set_bounds(sv.local, val(dv.local), val(dv.local));
                        for (std::size_t f = 0; f < sv.offload.size(); ++f)
                            m.set_bounds(sv.offload[f], val(dv.offload[f]), val(dv.offload[f]));
                    } else {
                        double total = val(dv.local);
                        std::vector<Term> terms{{sv.local, 1.0}};
                        for (std::size_t f = 0; f < sv.offload.size(); ++f) {
                            total += val(dv.offload[f]);
                            terms.emplace_back(sv.offload[f], 1.0);
                        }
                        m.set_bounds(sv.local, 0, std::max(m.variables()[sv.local].upper, total));
                        m.add_constraint(terms, Sense::eq, total,
                                         "evf_total[scenario=" + std::to_string(p + 1) + "][station=" +
                                             std::to_string(y + 1) + "]");
                    }
                }
        }
        return built;
    };

    auto built = build_fixed(true);
    Solution sol = solve_exact(built.model, inst.solver);
    std::string note = "frozen: subscriptions and stage-2 local/offload counts";
    if (sol.status == SolveStatus::infeasible) {
        built = build_fixed(false);
        sol = solve_exact(built.model, inst.solver);
        note = "frozen: subscriptions and stage-2 copy totals (exact split infeasible under the tree's losses)";
    }
    if (sol.status == SolveStatus::infeasible || sol.status == SolveStatus::unbounded)
        throw InternalError("EVF recourse model is " + std::string(to_string(sol.status)));
    auto plan = decode_phase2(built, sol, "evf");
    plan.types = types;
    plan.dip_demand = demand;
    plan.dip_shortfall = shortfall;
    plan.note = note;
    return plan;
}

// ---------------------------------------------------------------- random baseline

namespace {

constexpr int kMaxRejections = 10'000;

} // namespace

Phase2Plan random_plan(const NetworkInstance& inst, const TypeAssignment& types, std::uint64_t seed) {
    validate_instance(inst);
    check_types(inst, types);
    Rng rng(seed);
    const int ny = static_cast<int>(inst.stations.size());
    const int nf = static_cast<int>(inst.base_stations.size());
    const int z = inst.tree.z;
    const long long k = inst.split.k;

    Phase2Plan plan;
    plan.formulation = "random";
    plan.z = z;
    plan.types = types;
    plan.decisions.resize(inst.tree.slots.size());

    auto fail = [&](const std::string& where) {
        throw InputError("random plan: " + std::to_string(kMaxRejections) + " rejected draws at " + where +
                         " (instance too tight)");
    };

    for (std::size_t t = 0; t < inst.tree.slots.size(); ++t) {
        const auto& sl = inst.tree.slots[t];
        const long long amax = max_magnitude(sl);
        const long long lmax = inst.phase2.force_no_local ? 0 : k + (z - 2) * amax;
        std::vector<int> sub(static_cast<std::size_t>(nf));
        for (auto& s : sub)
            s = rng.bernoulli(0.5) ? 1 : 0;
        plan.subscriptions.push_back(sub);
        auto& dec = plan.decisions[t];
        dec.resize(static_cast<std::size_t>(z - 1));

        // pooled offloads and net returned copies per (prefix, station), carried down the tree
        std::vector<std::vector<long long>> pooled, net;
        for (int j = 2; j <= z; ++j) {
            const long long np = prefix_count(sl, j);
            dec[j - 2].assign(static_cast<std::size_t>(np), std::vector<StageDecision>(ny));
            std::vector<std::vector<long long>> npool(np, std::vector<long long>(ny)), nnet(np, std::vector<long long>(ny));
            for (long long p = 0; p < np; ++p) {
                const long long parent = j > 2 ? p / static_cast<long long>(sl.shortfall[j - 3].size()) : -1;
                std::vector<long long> room(static_cast<std::size_t>(nf));
                for (int f = 0; f < nf; ++f)
                    room[f] = sub[f] ? inst.base_stations[f].servers : 0;
                for (int y = 0; y < ny; ++y) {
                    StageDecision d;
                    d.offload.assign(nf, 0);
                    d.threshold.assign(nf, 0);
                    long long pool0 = 0, net0 = 0, loss = 0;
                    int flag = 1;
                    if (j > 2) {
                        const auto& pd = dec[j - 3][parent][y];
                        d.exposed = pd.exposed;
                        for (int th : pd.threshold)
                            d.exposed = std::max(d.exposed, th);
                        pool0 = pooled[parent][y];
                        net0 = net[parent][y];
                        flag = path_flag(sl, j, p, y);
                        loss = d.exposed ? path_loss(sl, j, p, y) : 0;
                    }
                    // worst loss over the children, which the pool must cover if we offload now
                    long long child_loss = 0;
                    if (j < z) {
                        const long long w = static_cast<long long>(sl.shortfall[j - 2].size());
                        for (long long c = p * w; c < (p + 1) * w; ++c)
                            child_loss = std::max(child_loss, path_loss(sl, j + 1, c, y));
                    }
                    const bool act = j == 2 || flag == 1;
                    int tries = 0;
                    for (;;) {
                        if (act) {
                            d.local = rng.range(0, lmax);
                            for (int f = 0; f < nf; ++f)
                                d.offload[f] = rng.range(0, std::min(room[f], std::max(lmax, k)));
                        }
                        long long off = 0;
                        for (long long o : d.offload)
                            off += o;
                        const long long have = j == 2 ? d.local + off : net0 + flag * (d.local + off) - loss;
                        bool ok = have >= k;
                        const bool exposes = off > 0 || d.exposed;
                        if (ok && exposes && j < z && pool0 + off < child_loss)
                            ok = false;
                        if (ok) {
                            for (int f = 0; f < nf; ++f) {
                                room[f] -= d.offload[f];
                                d.threshold[f] = d.offload[f] > 0 ? 1 : 0;
                            }
                            npool[p][y] = pool0 + off;
                            nnet[p][y] = have;
                            break;
                        }
                        if (!act || ++tries >= kMaxRejections)
                            fail("slot " + std::to_string(t + 1) + " stage " + std::to_string(j) + " scenario " +
                                 std::to_string(p + 1) + " station " + std::to_string(y + 1));
                    }
                    dec[j - 2][p][y] = d;
                }
            }
            pooled = std::move(npool);
            net = std::move(nnet);
        }
    }
    plan.stage_costs = exact_stage_costs(inst, plan);
    plan.expected_cost = 0;
    for (double c : plan.stage_costs)
        plan.expected_cost += c;
    return plan;
}

// ---------------------------------------------------------------- plan checks

std::vector<std::string> check_plan(const NetworkInstance& inst, const Phase2Plan& plan) {
    std::vector<std::string> out;
    if (plan.formulation == "dip" || plan.decisions.size() != inst.tree.slots.size() || plan.z != inst.tree.z) {
        out.push_back("plan does not match the scenario tree shape");
        return out;
    }
    const int ny = static_cast<int>(inst.stations.size());
    const int nf = static_cast<int>(inst.base_stations.size());
    const long long k = inst.split.k;
    for (std::size_t t = 0; t < inst.tree.slots.size(); ++t) {
        const auto& sl = inst.tree.slots[t];
        const auto& dec = plan.decisions[t];
        const std::string st = "slot " + std::to_string(t + 1);
        for (int j = 2; j <= plan.z; ++j) {
            const long long np = prefix_count(sl, j);
            if (dec.at(j - 2).size() != static_cast<std::size_t>(np)) {
                out.push_back(st + ": wrong number of prefixes at stage " + std::to_string(j));
                return out;
            }
            for (long long p = 0; p < np; ++p) {
                const std::string sp = st + " stage " + std::to_string(j) + " scenario " + std::to_string(p + 1);
                for (int f = 0; f < nf; ++f) {
                    long long used = 0;
                    for (int y = 0; y < ny; ++y)
                        used += dec[j - 2][p][y].offload.at(f);
                    if (used > inst.base_stations[f].servers)
                        out.push_back(sp + ": BS " + std::to_string(f + 1) + " over capacity");
                    if (used > 0 && !plan.subscriptions[t][f])
                        out.push_back(sp + ": offloads to unsubscribed BS " + std::to_string(f + 1));
                }
                for (int y = 0; y < ny; ++y) {
                    const auto& d = dec[j - 2][p][y];
                    const std::string sy = sp + " station " + std::to_string(y + 1);
                    if (d.local < 0)
                        out.push_back(sy + ": negative local count");
                    long long off = 0;
                    for (int f = 0; f < nf; ++f) {
                        off += d.offload[f];
                        if (d.offload[f] < 0)
                            out.push_back(sy + ": negative offload count");
                        if (d.offload[f] > 0 && !d.threshold[f])
                            out.push_back(sy + ": offload without threshold indicator");
                    }
                    if (j == 2 && d.local + off < k)
                        out.push_back(sy + ": fewer than k copies");
                    if (j < 3)
                        continue;
                    // walk the ancestors once, recomputing exposure, pool and net copies
                    long long pool = 0, net = 0;
                    int exposed = 0;
                    for (int i = 2; i <= j; ++i) {
                        const long long a = ancestor(sl, j, p, i);
                        const auto& ad = dec[i - 2][a][y];
                        long long aoff = 0;
                        for (long long o : ad.offload)
                            aoff += o;
                        if (i == 2) {
                            net = ad.local + aoff;
                        } else {
                            const long long loss = exposed ? path_loss(sl, i, a, y) : 0;
                            if (loss > pool)
                                out.push_back(sy + ": loss at stage " + std::to_string(i) + " exceeds offloaded copies");
                            net += path_flag(sl, i, a, y) * (ad.local + aoff) - loss;
                        }
                        pool += aoff;
                        for (int th : ad.threshold)
                            exposed = std::max(exposed, th);
                    }
                    if (net < k)
                        out.push_back(sy + ": returned copies below k");
                }
            }
        }
    }
    return out;
}

} // namespace scos
