#include "scos/milp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <map>
#include <set>

#include "lp_kernel.hpp"
#include "scos/errors.hpp"

namespace scos {

using detail::LpKernel;
using detail::NbState;
using detail::LpStatus;

// ---- model ----

int IPModel::add_variable(const std::string& name, VarKind kind, double lower, double upper,
                          double objective) {
    if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
        throw InternalError("variable name must be non-empty without whitespace: '" + name + "'");
    if (index_.count(name))
        throw InternalError("duplicate variable name " + name);
    if (std::isnan(lower) || std::isnan(upper) || lower > upper)
        throw InternalError("variable " + name + ": lower bound exceeds upper bound");
    if (kind == VarKind::binary) {
        if (lower < 0 || upper > 1)
            throw InternalError("binary variable " + name + " must have bounds within [0,1]");
    }
    VariableDef v;
    v.id = static_cast<int>(vars_.size());
    v.name = name;
    v.kind = kind;
    v.lower = lower;
    v.upper = upper;
    vars_.push_back(v);
    obj_.push_back(objective);
    index_.emplace(name, v.id);
    return v.id;
}

void IPModel::check_var(int v) const {
    if (v < 0 || v >= num_variables())
        throw InternalError("reference to undefined variable id " + std::to_string(v));
}

int IPModel::add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string name) {
    for (const auto& [v, a] : terms) {
        check_var(v);
        if (!std::isfinite(a))
            throw InternalError("non-finite coefficient in constraint " + name);
    }
    if (!std::isfinite(rhs))
        throw InternalError("non-finite rhs in constraint " + name);
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.first < b.first; });
    std::vector<Term> merged;
    for (const auto& t : terms) {
        if (!merged.empty() && merged.back().first == t.first)
            merged.back().second += t.second;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Term& t) { return t.second == 0.0; }),
                 merged.end());
    LinearConstraint c;
    c.terms = std::move(merged);
    c.sense = sense;
    c.rhs = rhs;
    c.name = name.empty() ? "c" + std::to_string(cons_.size()) : std::move(name);
    cons_.push_back(std::move(c));
    return num_constraints() - 1;
}

void IPModel::set_objective(int var, double coef) {
    check_var(var);
    obj_[var] = coef;
}

void IPModel::add_objective(int var, double coef) {
    check_var(var);
    obj_[var] += coef;
}

void IPModel::set_bounds(int var, double lower, double upper) {
    check_var(var);
    if (lower > upper)
        throw InternalError("set_bounds: lower exceeds upper for " + vars_[var].name);
    vars_[var].lower = lower;
    vars_[var].upper = upper;
}

void IPModel::set_priority(int var, int priority) {
    check_var(var);
    vars_[var].priority = priority;
}

int IPModel::find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

int IPModel::id(const std::string& name) const {
    int v = find(name);
    if (v < 0)
        throw InternalError("unknown variable " + name);
    return v;
}

int IPModel::num_binaries() const {
    return static_cast<int>(std::count_if(vars_.begin(), vars_.end(),
                                          [](const VariableDef& v) { return v.kind == VarKind::binary; }));
}

bool IPModel::all_integer() const {
    return std::all_of(vars_.begin(), vars_.end(),
                       [](const VariableDef& v) { return v.kind != VarKind::continuous; });
}

double IPModel::evaluate(const std::vector<double>& x) const {
    double z = obj_const_;
    for (int j = 0; j < num_variables(); ++j)
        z += obj_[j] * x[j];
    return z;
}

double IPModel::max_violation(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != num_variables())
        return kInf;
    double worst = 0;
    for (const auto& v : vars_) {
        const double xv = x[v.id];
        worst = std::max(worst, v.lower - xv);
        worst = std::max(worst, xv - v.upper);
        if (v.kind != VarKind::continuous)
            worst = std::max(worst, std::abs(xv - std::round(xv)));
    }
    for (const auto& c : cons_) {
        double act = 0;
        for (const auto& [j, a] : c.terms)
            act += a * x[j];
        if (c.sense != Sense::ge)
            worst = std::max(worst, act - c.rhs);
        if (c.sense != Sense::le)
            worst = std::max(worst, c.rhs - act);
    }
    return worst;
}

namespace {

void write_num(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    os << buf;
}

void write_terms(std::ostream& os, const std::vector<Term>& terms, const std::vector<VariableDef>& vars) {
    if (terms.empty()) {
        os << " 0";
        return;
    }
    for (const auto& [j, a] : terms) {
        os << (a < 0 ? " - " : " + ");
        write_num(os, std::abs(a));
        os << ' ' << vars[j].name;
    }
}

} // namespace

void IPModel::write_lp(std::ostream& os) const {
    os << "\\ model " << name_ << '\n';
    os << "\\ objective constant ";
    write_num(os, obj_const_);
    os << "\nMinimize\n obj:";
    std::vector<Term> ob;
    for (int j = 0; j < num_variables(); ++j)
        if (obj_[j] != 0.0)
            ob.emplace_back(j, obj_[j]);
    write_terms(os, ob, vars_);
    os << "\nSubject To\n";
    for (const auto& c : cons_) {
        os << ' ' << c.name << ':';
        write_terms(os, c.terms, vars_);
        os << (c.sense == Sense::le ? " <= " : c.sense == Sense::ge ? " >= " : " = ");
        write_num(os, c.rhs);
        os << '\n';
    }
    os << "Bounds\n";
    for (const auto& v : vars_) {
        os << ' ';
        if (std::isfinite(v.lower))
            write_num(os, v.lower);
        else
            os << "-inf";
        os << " <= " << v.name << " <= ";
        if (std::isfinite(v.upper))
            write_num(os, v.upper);
        else
            os << "+inf";
        os << '\n';
    }
    os << "Generals\n";
    for (const auto& v : vars_)
        if (v.kind == VarKind::integer)
            os << ' ' << v.name << '\n';
    os << "Binaries\n";
    for (const auto& v : vars_)
        if (v.kind == VarKind::binary)
            os << ' ' << v.name << '\n';
    os << "End\n";
}

const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::node_limit: return "node_limit";
    }
    return "?";
}

// ---- LP relaxation ----

Solution solve_lp_relaxation(const IPModel& model) {
    LpKernel lp(model);
    Solution s;
    s.nodes_explored = 1;
    switch (lp.solve_primal()) {
    case LpStatus::optimal:
        s.status = SolveStatus::optimal;
        s.x = lp.primal();
        s.objective = model.evaluate(s.x);
        s.bound = s.objective;
        break;
    case LpStatus::infeasible: s.status = SolveStatus::infeasible; break;
    case LpStatus::unbounded:
        s.status = SolveStatus::unbounded;
        s.objective = -kInf;
        break;
    case LpStatus::iteration_limit: throw InternalError("simplex iteration limit reached");
    }
    return s;
}

IPModel strengthen_coefficients(const IPModel& model) {
    IPModel out(model.name());
    for (const auto& v : model.variables()) {
        out.add_variable(v.name, v.kind, v.lower, v.upper, model.objective()[v.id]);
        out.set_priority(v.id, v.priority);
    }
    out.set_objective_constant(model.objective_constant());

    auto as_le = [](const LinearConstraint& c) {
        std::vector<Term> t = c.terms;
        if (c.sense == Sense::ge)
            for (auto& x : t)
                x.second = -x.second;
        return std::pair{t, c.sense == Sense::ge ? -c.rhs : c.rhs};
    };
    std::map<std::vector<Term>, double> caps;
    for (const auto& c : model.constraints()) {
        if (c.sense == Sense::eq)
            continue;
        auto [t, r] = as_le(c);
        auto [it, fresh] = caps.emplace(t, r);
        if (!fresh)
            it->second = std::min(it->second, r);
    }

    const auto& vars = model.variables();
    for (const auto& c : model.constraints()) {
        if (c.sense == Sense::eq) {
            out.add_constraint(c.terms, c.sense, c.rhs, c.name);
            continue;
        }
        auto [t, r] = as_le(c);
        int ind = -1;
        int binaries = 0;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (vars[t[i].first].kind == VarKind::binary) {
                ++binaries;
                if (t[i].second < 0)
                    ind = static_cast<int>(i);
            }
        if (binaries == 1 && ind >= 0) {
            std::vector<Term> rest = t;
            rest.erase(rest.begin() + ind);
            double maxact = 0;
            for (const auto& [j, a] : rest)
                maxact += a > 0 ? a * vars[j].upper : a * vars[j].lower;
            if (auto it = caps.find(rest); it != caps.end())
                maxact = std::min(maxact, it->second);
            if (std::isfinite(maxact)) {
                const double need = std::max(0.0, maxact - r);
                if (-t[ind].second > need + 1e-9)
                    t[ind].second = -need;
            }
        }
        if (c.sense == Sense::ge) {
            for (auto& x : t)
                x.second = -x.second;
            r = -r;
        }
        out.add_constraint(std::move(t), c.sense, r, c.name);
    }
    return out;
}


std::vector<LinearConstraint> implied_vub_rows(const IPModel& model) {
    const auto& vars = model.variables();
    const auto& cons = model.constraints();
    const std::size_t n = vars.size();
    // x <= U z (z binary) and z1 <= z2 (both binary), read off two-term rows
    std::vector<std::map<int, double>> vub(n);
    std::vector<std::vector<int>> up(n);
    for (const auto& c : cons) {
        if (c.terms.size() != 2 || c.rhs != 0.0 || c.sense == Sense::eq)
            continue;
        for (int k = 0; k < 2; ++k) {
            auto [x, ax] = c.terms[k];
            auto [z, az] = c.terms[1 - k];
            if (c.sense == Sense::ge) {
                ax = -ax;
                az = -az;
            }
            // ax * x + az * z <= 0
            if (vars[z].kind != VarKind::binary || ax <= 0 || az >= 0 || vars[x].lower != 0.0)
                continue;
            const double u = -az / ax;
            if (vars[x].kind == VarKind::binary) {
                if (u == 1.0)
                    up[x].push_back(z);
            } else {
                auto [it, fresh] = vub[x].emplace(z, u);
                if (!fresh)
                    it->second = std::min(it->second, u);
            }
        }
    }
    // close each bound over the binary implications
    for (std::size_t x = 0; x < n; ++x) {
        if (vub[x].empty())
            continue;
        std::vector<std::pair<int, double>> stack(vub[x].begin(), vub[x].end());
        while (!stack.empty()) {
            const auto [z, u] = stack.back();
            stack.pop_back();
            for (int w : up[z]) {
                auto [it, fresh] = vub[x].emplace(w, u);
                if (fresh || u < it->second) {
                    it->second = u;
                    stack.emplace_back(w, u);
                }
            }
        }
    }

    std::vector<LinearConstraint> out;
    for (const auto& c : cons) {
        if (c.sense == Sense::eq)
            continue;
        const double sign = c.sense == Sense::ge ? 1.0 : -1.0;
        // largest right-hand side the negative terms can push the row to
        double bmax = sign * c.rhs;
        bool ok = true;
        std::set<int> candidates;
        for (const auto& [j, a0] : c.terms) {
            const double a = sign * a0;
            if (a < 0) {
                bmax += -a * vars[j].upper;
                ok = ok && std::isfinite(vars[j].upper);
            } else {
                ok = ok && vars[j].lower >= 0;
                for (const auto& [z, u] : vub[j])
                    candidates.insert(z);
            }
        }
        if (!ok || bmax <= 0)
            continue;
        for (int z : candidates) {
            double cover = 0;
            for (const auto& [j, a0] : c.terms)
                if (const double a = sign * a0; a > 0)
                    if (auto it = vub[j].find(z); it != vub[j].end())
                        cover += a * it->second;
            if (cover <= bmax + 1e-9)
                continue;
            std::vector<Term> terms{{z, bmax}};
            for (const auto& [j, a0] : c.terms) {
                const double a = sign * a0;
                if (a > 0 && vub[j].count(z))
                    continue;
                terms.emplace_back(j, a);
            }
            // z may also sit in the row already
            std::sort(terms.begin(), terms.end());
            std::vector<Term> merged;
            for (const auto& [j, a] : terms) {
                if (!merged.empty() && merged.back().first == j)
                    merged.back().second += sign * a;
                else
                    merged.emplace_back(j, sign * a);
            }
            std::erase_if(merged, [](const Term& t) { return t.second == 0.0; });
            LinearConstraint row;
            row.terms = std::move(merged);
            row.sense = c.sense;
            row.rhs = c.rhs;
            row.name = c.name + "_vub";
            out.push_back(std::move(row));
        }
    }
    return out;
}

namespace {

bool is_integral(double v) { return std::abs(v - std::round(v)) < 1e-12; }

// Gomory mixed-integer cuts read off an optimal tableau. Each cut is returned
// in the original variables as a >= row; rows whose slack is provably integer
// get the stronger integer coefficients.
std::vector<LinearConstraint> gomory_cuts(const IPModel& model, const LpKernel& lp, int max_cuts) {
    const auto& vars = model.variables();
    const auto& cons = model.constraints();
    const int n = lp.num_struct(), m = lp.num_rows(), ncol = lp.num_cols();
    std::vector<char> int_slack(m, 1);
    for (int i = 0; i < m; ++i) {
        for (const auto& [j, a] : cons[i].terms)
            if (vars[j].kind == VarKind::continuous || !is_integral(a))
                int_slack[i] = 0;
        if (!is_integral(cons[i].rhs))
            int_slack[i] = 0;
    }
    auto integer_col = [&](int j) {
        if (j < n)
            return vars[j].kind != VarKind::continuous && is_integral(lp.lower(j)) && is_integral(lp.upper(j));
        return int_slack[j - n] != 0;
    };

    struct Candidate {
        double score;
        LinearConstraint cut;
    };
    std::vector<Candidate> found;
    std::vector<double> coef(n);
    for (int i = 0; i < m; ++i) {
        const int b = lp.basic(i);
        if (b >= n || vars[b].kind == VarKind::continuous)
            continue;
        const double xb = lp.value(b);
        const double f0 = xb - std::floor(xb);
        if (f0 < 0.01 || f0 > 0.99)
            continue;

        std::fill(coef.begin(), coef.end(), 0.0);
        double rhs = 1.0;
        bool ok = true;
        for (int j = 0; j < ncol && ok; ++j) {
            if (j == b || lp.state(j) == NbState::basic)
                continue;
            const double tij = lp.entry(i, j);
            if (std::abs(tij) < 1e-11 || lp.lower(j) == lp.upper(j))
                continue;
            if (lp.state(j) == NbState::free || std::abs(tij) > 1e6) {
                ok = false;
                break;
            }
            const bool at_upper = lp.state(j) == NbState::upper;
            const double a = at_upper ? -tij : tij;
            double pi;
            if (integer_col(j)) {
                const double fj = a - std::floor(a);
                pi = fj <= f0 ? fj / f0 : (1.0 - fj) / (1.0 - f0);
            } else {
                pi = a >= 0 ? a / f0 : -a / (1.0 - f0);
            }
            if (pi == 0.0)
                continue;
            // y = x - lo at lower, hi - x at upper
            const double g = at_upper ? -pi : pi;
            rhs += at_upper ? -pi * lp.upper(j) : pi * lp.lower(j);
            if (j < n) {
                coef[j] += g;
            } else {
                for (const auto& [k, ak] : cons[j - n].terms)
                    coef[k] += g * ak;
            }
        }
        if (!ok)
            continue;

        LinearConstraint cut;
        cut.sense = Sense::ge;
        double big = 0, small = kInf;
        for (int j = 0; j < n && ok; ++j) {
            const double c = coef[j];
            if (c == 0.0)
                continue;
            if (std::abs(c) < 1e-9) {
                // drop it, relaxing the row by its largest possible contribution
                const double worst = c > 0 ? c * vars[j].upper : c * vars[j].lower;
                if (!std::isfinite(worst))
                    ok = false;
                rhs -= worst;
                continue;
            }
            big = std::max(big, std::abs(c));
            small = std::min(small, std::abs(c));
            cut.terms.emplace_back(j, c);
        }
        if (!ok || cut.terms.empty() || big / small > 1e4)
            continue;
        // the tableau carries rounding error, so give the cut some slack in
        // proportion to the activity it can reach
        double reach = std::abs(rhs);
        for (const auto& [j, c] : cut.terms)
            reach += std::abs(c) * std::max(std::abs(vars[j].lower), std::abs(vars[j].upper));
        if (!std::isfinite(reach))
            continue;
        rhs -= 1e-6 * (1.0 + reach);
        double act = 0, norm = 0;
        for (const auto& [j, c] : cut.terms) {
            act += c * lp.value(j);
            norm += c * c;
        }
        const double viol = (rhs - act) / std::sqrt(norm);
        if (viol < 1e-4)
            continue;
        cut.rhs = rhs;
        found.push_back({viol, std::move(cut)});
    }
    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    std::vector<LinearConstraint> out;
    for (auto& c : found) {
        if (static_cast<int>(out.size()) >= max_cuts)
            break;
        out.push_back(std::move(c.cut));
    }
    return out;
}

} // namespace

// ---- branch and bound ----

namespace {

struct BoundChange {
    int var;
    double lo, hi;
};

struct Node {
    double bound;
    long long id;
    std::vector<BoundChange> changes;
    // branching that created this node, for pseudo-cost updates
    int var = -1;
    bool up = false;
    double frac = 0;
};

// Average objective gain per unit of rounding, per variable and direction.
class PseudoCosts {
public:
    explicit PseudoCosts(int n) : sum_(2 * n, 0.0), count_(2 * n, 0) {}
    void record(int var, bool up, double frac, double gain) {
        if (var < 0 || frac <= 0)
            return;
        const double g = std::max(0.0, gain) / frac;
        sum_[slot(var, up)] += g;
        ++count_[slot(var, up)];
        total_ += g;
        ++total_count_;
    }
    double get(int var, bool up) const {
        const auto i = slot(var, up);
        if (count_[i] > 0)
            return sum_[i] / count_[i];
        return total_count_ > 0 ? total_ / total_count_ : 1.0;
    }

private:
    static std::size_t slot(int var, bool up) { return 2 * static_cast<std::size_t>(var) + (up ? 1 : 0); }
    std::vector<double> sum_;
    std::vector<long long> count_;
    double total_ = 0;
    long long total_count_ = 0;
};

// Open nodes, reachable both by (bound, id) and by id. Until an incumbent
// exists the newest node is explored (depth first), then the best bound.
class OpenList {
public:
    bool empty() const { return by_id_.empty(); }
    void push(Node n) {
        by_bound_.emplace(n.bound, n.id);
        const long long id = n.id;
        by_id_.emplace(id, std::move(n));
    }
    Node pop(bool depth_first) {
        auto it = depth_first ? std::prev(by_id_.end()) : by_id_.find(by_bound_.begin()->second);
        Node n = std::move(it->second);
        by_bound_.erase({n.bound, n.id});
        by_id_.erase(it);
        return n;
    }
    double best_bound() const { return by_bound_.begin()->first; }

private:
    std::set<std::pair<double, long long>> by_bound_;
    std::map<long long, Node> by_id_;
};

class BranchAndBound {
public:
    BranchAndBound(const IPModel& model, const SolveOptions& opts)
        : model_(model), plain_(strengthen_coefficients(model)), strong_(plain_), opts_(opts),
          pc_(model.num_variables()) {}

    Solution run() {
        for (const auto& v : model_.variables())
            if (v.kind != VarKind::continuous && (!std::isfinite(v.lower) || !std::isfinite(v.upper)))
                throw InputError("solve_exact: integer variable " + v.name + " needs finite bounds");

        LpKernel root(strong_);
        const LpStatus st = root.solve_primal();
        nodes_ = 1;
        Solution out;
        if (st == LpStatus::iteration_limit)
            throw InternalError("simplex iteration limit at root");
        if (st == LpStatus::infeasible) {
            out.status = SolveStatus::infeasible;
            out.nodes_explored = nodes_;
            return out;
        }
        if (st == LpStatus::unbounded) {
            out.status = SolveStatus::unbounded;
            out.objective = -kInf;
            out.nodes_explored = nodes_;
            return out;
        }
        root_bound_ = root.objective() + model_.objective_constant();
        if (opts_.root_cuts) {
            separate_vub_rows(root);
            if (model_.all_integer())
                add_root_cuts(root);
        }
        const LpKernel root_opt = root;
        plunge(root, {});

        bool limited = false;
        while (!open_.empty()) {
            if (nodes_ >= opts_.node_limit) {
                limited = true;
                break;
            }
            Node n = open_.pop(best_x_.empty());
            if (pruned(n.bound))
                continue;
            LpKernel lp = root_opt;
            for (const auto& c : n.changes)
                lp.set_bounds(c.var, c.lo, c.hi);
            ++nodes_;
            if (resolve(lp, n.changes) != LpStatus::optimal)
                continue;
            pc_.record(n.var, n.up, n.frac, lp.objective() + model_.objective_constant() - n.bound);
            plunge(lp, std::move(n.changes));
        }
        if (hit_limit_)
            limited = true;

        out.nodes_explored = nodes_;
        // the limit may hit when nothing left open could beat the incumbent
        if (limited && !best_x_.empty() && (open_.empty() || pruned(open_.best_bound())))
            limited = false;
        if (limited) {
            out.status = SolveStatus::node_limit;
            double b = best_x_.empty() ? kInf : best_obj_;
            if (!open_.empty())
                b = std::min(b, open_.best_bound());
            out.bound = b;
        } else {
            out.status = best_x_.empty() ? SolveStatus::infeasible : SolveStatus::optimal;
            out.bound = best_obj_;
        }
        if (!best_x_.empty()) {
            out.x = best_x_;
            out.objective = best_obj_;
        }
        return out;
    }

private:
    // Adds the implied bound rows the root solution violates, until none are.
    // They go into plain_ as well: unlike Gomory cuts they are numerically tame.
    void separate_vub_rows(LpKernel& root) {
        auto pool = implied_vub_rows(plain_);
        std::vector<char> used(pool.size(), 0);
        for (int round = 0; round < 100; ++round) {
            IPModel trial = plain_;
            std::vector<LinearConstraint> batch;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (used[i])
                    continue;
                const auto& r = pool[i];
                double act = 0;
                for (const auto& [j, a] : r.terms)
                    act += a * root.value(j);
                const double viol = r.sense == Sense::ge ? r.rhs - act : act - r.rhs;
                if (viol <= 1e-6)
                    continue;
                used[i] = 1;
                trial.add_constraint(r.terms, r.sense, r.rhs, r.name);
                batch.push_back(r);
            }
            if (batch.empty())
                break;
            LpKernel lp = root;
            lp.add_rows(batch);
            if (lp.solve_dual() != LpStatus::optimal)
                break;
            plain_ = std::move(trial);
            root = std::move(lp);
            root_bound_ = root.objective() + model_.objective_constant();
        }
        strong_ = plain_;
    }

    // A few rounds of Gomory cuts while they still move the root bound.
    void add_root_cuts(LpKernel& root) {
        const int budget = std::max(10, model_.num_constraints() / 10);
        int added = 0;
        for (int round = 0; round < 20 && added < budget; ++round) {
            const auto cuts = gomory_cuts(strong_, root, std::min(50, budget - added));
            if (cuts.empty())
                break;
            IPModel trial = strong_;
            LpKernel lp = root;
            for (const auto& c : cuts)
                trial.add_constraint(c.terms, c.sense, c.rhs, "gmi" + std::to_string(added++));
            lp.add_rows(cuts);
            if (lp.solve_dual() != LpStatus::optimal)
                break; // numerical trouble: keep what we had
            const double before = root_bound_;
            strong_ = std::move(trial);
            root = std::move(lp);
            root_bound_ = root.objective() + model_.objective_constant();
            if (root_bound_ - before < 1e-6 * (1.0 + std::abs(before)))
                break;
        }
    }

    // Warm dual simplex; if it stalls, solve the node from scratch, first with
    // the cuts and then without them.
    LpStatus resolve(LpKernel& lp, const std::vector<BoundChange>& changes) {
        LpStatus s = lp.solve_dual();
        for (const IPModel* m : {&strong_, &plain_}) {
            if (s != LpStatus::iteration_limit)
                return s;
            LpKernel fresh(*m);
            for (const auto& c : changes)
                fresh.set_bounds(c.var, c.lo, c.hi);
            s = fresh.solve_primal();
            lp = std::move(fresh);
        }
        if (s == LpStatus::iteration_limit)
            throw InternalError("simplex iteration limit in branch and bound");
        return s;
    }

    bool pruned(double lp_bound) const {
        return !best_x_.empty() && lp_bound >= best_obj_ - opts_.abs_gap;
    }

    // Depth-first dive from a solved node; siblings go to the open list.
    void plunge(LpKernel& lp, std::vector<BoundChange> changes) {
        for (;;) {
            const double bound = lp.objective() + model_.objective_constant();
            if (pruned(bound))
                return;
            // highest priority class first, then the best pseudo-cost product
            int branch = -1;
            int best_prio = 0;
            double best_score = 0;
            for (const auto& v : model_.variables()) {
                if (v.kind == VarKind::continuous)
                    continue;
                const double xv = lp.value(v.id);
                const double f = xv - std::floor(xv);
                if (std::min(f, 1.0 - f) <= opts_.int_tol)
                    continue;
                const double score = std::max(1e-6, f * pc_.get(v.id, false)) *
                                     std::max(1e-6, (1.0 - f) * pc_.get(v.id, true));
                if (branch < 0 || v.priority > best_prio || (v.priority == best_prio && score > best_score)) {
                    best_prio = v.priority;
                    best_score = score;
                    branch = v.id;
                }
            }
            if (branch < 0) {
                consider_incumbent(lp);
                return;
            }
            const double xv = lp.value(branch);
            const double lo = lp.lower(branch), hi = lp.upper(branch);
            const double fl = std::floor(xv), ce = std::ceil(xv);
            const bool up_first = xv - fl >= 0.5;
            BoundChange down{branch, lo, fl};
            BoundChange up{branch, ce, hi};
            const double frac_down = xv - fl, frac_up = ce - xv;
            Node other;
            other.bound = bound;
            other.id = next_id_++;
            other.changes = changes;
            other.changes.push_back(up_first ? down : up);
            other.var = branch;
            other.up = !up_first;
            other.frac = up_first ? frac_down : frac_up;
            open_.push(std::move(other));

            const BoundChange& go = up_first ? up : down;
            changes.push_back(go);
            if (nodes_ >= opts_.node_limit) {
                Node self{bound, next_id_++, changes};
                open_.push(std::move(self));
                hit_limit_ = true;
                return;
            }
            lp.set_bounds(go.var, go.lo, go.hi);
            ++nodes_;
            if (resolve(lp, changes) != LpStatus::optimal)
                return;
            pc_.record(branch, up_first, up_first ? frac_up : frac_down,
                       lp.objective() + model_.objective_constant() - bound);
        }
    }

    void consider_incumbent(const LpKernel& lp) {
        std::vector<double> x = lp.primal();
        for (const auto& v : model_.variables())
            if (v.kind != VarKind::continuous)
                x[v.id] = std::round(x[v.id]);
        if (model_.max_violation(x) > opts_.feas_tol) {
            // rounding broke a row: fix the integers and re-solve for the rest
            IPModel fixed = model_;
            for (const auto& v : model_.variables())
                if (v.kind != VarKind::continuous)
                    fixed.set_bounds(v.id, x[v.id], x[v.id]);
            LpKernel k(fixed);
            if (k.solve_primal() != LpStatus::optimal)
                return;
            x = k.primal();
            for (const auto& v : model_.variables())
                if (v.kind != VarKind::continuous)
                    x[v.id] = std::round(x[v.id]);
            if (model_.max_violation(x) > opts_.feas_tol)
                return;
        }
        const double z = model_.evaluate(x);
        if (best_x_.empty() || z < best_obj_ - 1e-12) {
            best_x_ = std::move(x);
            best_obj_ = z;
        }
    }

    const IPModel& model_;
    IPModel plain_;  // strengthened, no cuts
    IPModel strong_; // plain_ plus root cuts; relaxations run on this one
    SolveOptions opts_;
    PseudoCosts pc_;
    OpenList open_;
    std::vector<double> best_x_;
    double best_obj_ = kInf;
    double root_bound_ = -kInf;
    long long nodes_ = 0;
    long long next_id_ = 0;
    bool hit_limit_ = false;
};

} // namespace

Solution solve_exact(const IPModel& model, const SolveOptions& opts) {
    if (opts.node_limit < 1)
        throw InputError("node_limit must be >= 1");
    return BranchAndBound(model, opts).run();
}

// ---- enumeration oracle ----

Solution solve_enumerate(const IPModel& model, std::uint64_t cap) {
    const auto& vars = model.variables();
    const int n = model.num_variables();
    long double count = 1;
    for (const auto& v : vars) {
        if (v.kind == VarKind::continuous)
            throw InputError("solve_enumerate: continuous variable " + v.name);
        if (!std::isfinite(v.lower) || !std::isfinite(v.upper))
            throw InputError("solve_enumerate: unbounded variable " + v.name);
        const double lo = std::ceil(v.lower - 1e-9), hi = std::floor(v.upper + 1e-9);
        if (hi < lo) {
            Solution s;
            s.status = SolveStatus::infeasible;
            return s;
        }
        count *= static_cast<long double>(hi - lo + 1);
    }
    if (count > static_cast<long double>(cap))
        throw InputError("solve_enumerate: search space exceeds cap");

    const auto& cons = model.constraints();
    const int m = model.num_constraints();
    std::vector<std::vector<Term>> cols(n);
    for (int i = 0; i < m; ++i)
        for (const auto& [j, a] : cons[i].terms)
            cols[j].emplace_back(i, a);
    std::vector<double> lo(n), hi(n), x(n);
    for (int j = 0; j < n; ++j) {
        lo[j] = std::ceil(vars[j].lower - 1e-9);
        hi[j] = std::floor(vars[j].upper + 1e-9);
        x[j] = lo[j];
    }
    std::vector<double> act(m);
    auto recompute = [&] {
        for (int i = 0; i < m; ++i) {
            double s = 0;
            for (const auto& [j, a] : cons[i].terms)
                s += a * x[j];
            act[i] = s;
        }
    };
    auto row_ok = [&](int i) {
        const auto& c = cons[i];
        if (c.sense != Sense::ge && act[i] > c.rhs + 1e-6)
            return false;
        if (c.sense != Sense::le && act[i] < c.rhs - 1e-6)
            return false;
        return true;
    };
    recompute();

    Solution best;
    best.status = SolveStatus::infeasible;
    std::uint64_t visited = 0;
    for (;;) {
        ++visited;
        bool ok = true;
        for (int i = 0; i < m && ok; ++i)
            ok = row_ok(i);
        if (ok) {
            const double z = model.evaluate(x);
            if (best.x.empty() || z < best.objective - 1e-12) {
                if (model.max_violation(x) <= 1e-6) {
                    best.x = x;
                    best.objective = z;
                    best.status = SolveStatus::optimal;
                }
            }
        }
        // odometer, last variable fastest
        int j = n - 1;
        while (j >= 0 && x[j] >= hi[j])
            --j;
        if (j < 0)
            break;
        if (j == n - 1) {
            x[j] += 1;
            for (const auto& [i, a] : cols[j])
                act[i] += a;
        } else {
            x[j] += 1;
            for (int k = j + 1; k < n; ++k)
                x[k] = lo[k];
            recompute();
        }
    }
    best.nodes_explored = static_cast<long long>(visited);
    best.bound = best.objective;
    return best;
}

} // namespace scos
