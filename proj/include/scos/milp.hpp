#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace scos {

enum class VarKind { binary, integer, continuous };
enum class Sense { le, ge, eq };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct VariableDef {
    int id = 0;
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0;
    double upper = kInf;
    int priority = 0; // branching class, higher classes are branched first
};

using Term = std::pair<int, double>;

struct LinearConstraint {
    std::vector<Term> terms; // canonical: sorted by id, no duplicates, no zeros
    Sense sense = Sense::le;
    double rhs = 0;
    std::string name;
};

// Minimization model. Construction checks every reference, so a built model is
// always well formed.
class IPModel {
public:
    explicit IPModel(std::string name = "model") : name_(std::move(name)) {}

    int add_variable(const std::string& name, VarKind kind, double lower, double upper,
                     double objective = 0.0);
    int add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string name = {});

    void set_objective(int var, double coef);
    void add_objective(int var, double coef);
    void set_objective_constant(double c) { obj_const_ = c; }
    void add_objective_constant(double c) { obj_const_ += c; }
    void set_bounds(int var, double lower, double upper);
    void set_priority(int var, int priority);

    // -1 when absent
    int find(const std::string& name) const;
    // throws InternalError when absent
    int id(const std::string& name) const;

    const std::string& name() const { return name_; }
    const std::vector<VariableDef>& variables() const { return vars_; }
    const std::vector<LinearConstraint>& constraints() const { return cons_; }
    const std::vector<double>& objective() const { return obj_; }
    double objective_constant() const { return obj_const_; }
    int num_variables() const { return static_cast<int>(vars_.size()); }
    int num_constraints() const { return static_cast<int>(cons_.size()); }
    int num_binaries() const;
    bool all_integer() const;

    double evaluate(const std::vector<double>& x) const;
    // Largest violation over rows, bounds and integrality.
    double max_violation(const std::vector<double>& x) const;

    void write_lp(std::ostream& os) const;

private:
    void check_var(int v) const;

    std::string name_;
    std::vector<VariableDef> vars_;
    std::vector<LinearConstraint> cons_;
    std::vector<double> obj_;
    double obj_const_ = 0;
    std::map<std::string, int> index_;
};

enum class SolveStatus { optimal, infeasible, unbounded, node_limit };

const char* to_string(SolveStatus s);

struct Solution {
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> x;
    double objective = kInf;
    double bound = -kInf; // best proven lower bound
    long long nodes_explored = 0;
    bool has_incumbent() const { return !x.empty(); }
};

struct SolveOptions {
    long long node_limit = 2'000'000;
    double abs_gap = 1e-9;
    double feas_tol = 1e-6;
    double int_tol = 1e-6;
    // implied bound rows and Gomory cuts at the root
    bool root_cuts = true;
};

Solution solve_lp_relaxation(const IPModel& model);
// Same integer feasible set, tighter relaxation: a binary indicator's
// coefficient in a <= row shrinks to the largest activity the rest of the row
// can reach (from bounds, or from a parallel row over the same terms).
IPModel strengthen_coefficients(const IPModel& model);
// Rows with every nonnegative variable, where some x carries x <= U z (z binary)
// from a two-term row: a*x only ever needs to cover the largest right-hand
// side B the row can face, so a*x may be replaced by min(B, a*U)*z. These rows
// are valid for every integer solution and are added to the relaxation.
std::vector<LinearConstraint> implied_vub_rows(const IPModel& model);
Solution solve_exact(const IPModel& model, const SolveOptions& opts = {});
// Exhaustive scan; ties keep the lexicographically smallest assignment.
Solution solve_enumerate(const IPModel& model, std::uint64_t cap = 1'000'000);

} // namespace scos
