#pragma once

// Dense bounded-variable simplex on the tableau B^-1 [A | -I].
// Rows are written as a_i x - s_i = 0 with the row sense moved into the bounds
// of the slack s_i, so the slack basis is always a valid starting point.

#include <cstdint>
#include <vector>

#include "scos/milp.hpp"

namespace scos::detail {

enum class NbState : std::uint8_t { basic, lower, upper, free };
enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

class LpKernel {
public:
    explicit LpKernel(const IPModel& model);

    // Phase 1 (sum of infeasibilities) then phase 2 from the current basis.
    LpStatus solve_primal();
    // Reoptimize after bound changes; needs a dual feasible basis, otherwise it
    // falls back to the primal method.
    LpStatus solve_dual();

    void set_bounds(int j, double lo, double hi);
    // Appends rows with basic slacks; the basis stays dual feasible, so
    // solve_dual() picks up from here.
    void add_rows(const std::vector<LinearConstraint>& rows);
    double lower(int j) const { return lo_[j]; }
    double upper(int j) const { return hi_[j]; }

    int num_struct() const { return n_; }
    int num_rows() const { return m_; }
    // Tableau access for cut generation. Column n + i is the slack of row i.
    int num_cols() const { return ncol_; }
    int basic(int i) const { return basis_[i]; }
    NbState state(int j) const { return state_[j]; }
    double entry(int i, int j) const { return t(i, j); }
    // structural values only
    std::vector<double> primal() const;
    double value(int j) const { return x_[j]; }
    double objective() const;
    long long iterations() const { return iters_; }

private:
    double& t(int i, int j) { return tab_[static_cast<std::size_t>(i) * ncol_ + j]; }
    double t(int i, int j) const { return tab_[static_cast<std::size_t>(i) * ncol_ + j]; }

    void pivot(int r, int q);
    void recompute_basics();
    void recompute_duals();
    bool dual_feasible() const;
    bool movable(int j) const { return state_[j] != NbState::basic && lo_[j] < hi_[j]; }
    double infeasibility(int b) const;

    int m_ = 0, n_ = 0, ncol_ = 0;
    std::vector<double> tab_;
    std::vector<int> basis_;
    std::vector<NbState> state_;
    std::vector<double> lo_, hi_, c_, x_, d_;
    std::vector<int> nz_; // scratch for pivot row sparsity
    long long iters_ = 0;
};

} // namespace scos::detail
