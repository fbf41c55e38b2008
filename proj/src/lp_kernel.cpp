#include "lp_kernel.hpp"

#include <algorithm>
#include <cmath>

namespace scos::detail {

namespace {

constexpr double kPivTol = 1e-9;
// a basic value counts as infeasible only beyond kFeasTol; the Harris pass
// relaxes bounds by the much smaller kHarrisTol, so its drift never sends
// phase 2 back into phase 1
constexpr double kFeasTol = 1e-7;
constexpr double kHarrisTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kDrop = 1e-13;
constexpr int kDegenerateSwitch = 50;

} // namespace

LpKernel::LpKernel(const IPModel& model) {
    n_ = model.num_variables();
    m_ = model.num_constraints();
    ncol_ = n_ + m_;
    tab_.assign(static_cast<std::size_t>(m_) * ncol_, 0.0);
    basis_.resize(m_);
    state_.assign(ncol_, NbState::lower);
    lo_.resize(ncol_);
    hi_.resize(ncol_);
    c_.assign(ncol_, 0.0);
    x_.assign(ncol_, 0.0);
    d_.assign(ncol_, 0.0);

    const auto& vars = model.variables();
    for (int j = 0; j < n_; ++j) {
        lo_[j] = vars[j].lower;
        hi_[j] = vars[j].upper;
        c_[j] = model.objective()[j];
        if (std::isfinite(lo_[j])) {
            state_[j] = NbState::lower;
            x_[j] = lo_[j];
        } else if (std::isfinite(hi_[j])) {
            state_[j] = NbState::upper;
            x_[j] = hi_[j];
        } else {
            state_[j] = NbState::free;
            x_[j] = 0;
        }
    }
    const auto& cons = model.constraints();
    for (int i = 0; i < m_; ++i) {
        const int s = n_ + i;
        for (const auto& [j, a] : cons[i].terms)
            t(i, j) = -a;
        t(i, s) = 1.0;
        basis_[i] = s;
        state_[s] = NbState::basic;
        switch (cons[i].sense) {
        case Sense::le: lo_[s] = -kInf; hi_[s] = cons[i].rhs; break;
        case Sense::ge: lo_[s] = cons[i].rhs; hi_[s] = kInf; break;
        case Sense::eq: lo_[s] = hi_[s] = cons[i].rhs; break;
        }
    }
    recompute_basics();
    recompute_duals();
}

std::vector<double> LpKernel::primal() const {
    return std::vector<double>(x_.begin(), x_.begin() + n_);
}

double LpKernel::objective() const {
    double z = 0;
    for (int j = 0; j < n_; ++j)
        z += c_[j] * x_[j];
    return z;
}

void LpKernel::set_bounds(int j, double lo, double hi) {
    lo_[j] = lo;
    hi_[j] = hi;
    if (state_[j] == NbState::basic)
        return;
    if (state_[j] == NbState::upper && std::isfinite(hi)) {
        x_[j] = hi;
    } else if (std::isfinite(lo)) {
        state_[j] = NbState::lower;
        x_[j] = lo;
    } else if (std::isfinite(hi)) {
        state_[j] = NbState::upper;
        x_[j] = hi;
    } else {
        state_[j] = NbState::free;
        x_[j] = 0;
    }
}

void LpKernel::add_rows(const std::vector<LinearConstraint>& rows) {
    if (rows.empty())
        return;
    const int extra = static_cast<int>(rows.size());
    const int old_cols = ncol_;
    const int old_rows = m_;
    ncol_ += extra;
    m_ += extra;
    std::vector<double> tab(static_cast<std::size_t>(m_) * ncol_, 0.0);
    for (int i = 0; i < old_rows; ++i)
        std::copy_n(&tab_[static_cast<std::size_t>(i) * old_cols], old_cols, &tab[static_cast<std::size_t>(i) * ncol_]);
    tab_ = std::move(tab);
    for (int k = 0; k < extra; ++k) {
        const int r = old_rows + k;
        const int s = old_cols + k;
        double* pr = &tab_[static_cast<std::size_t>(r) * ncol_];
        for (const auto& [j, a] : rows[k].terms)
            pr[j] -= a;
        pr[s] = 1.0;
        // eliminate the basic columns so the row is in terms of nonbasics
        for (int i = 0; i < old_rows; ++i) {
            const double f = pr[basis_[i]];
            if (f == 0.0)
                continue;
            const double* pi = &tab_[static_cast<std::size_t>(i) * ncol_];
            for (int j = 0; j < old_cols; ++j)
                if (pi[j] != 0.0) {
                    const double v = pr[j] - f * pi[j];
                    pr[j] = std::abs(v) < kDrop ? 0.0 : v;
                }
            pr[basis_[i]] = 0.0;
        }
        basis_.push_back(s);
        state_.push_back(NbState::basic);
        c_.push_back(0.0);
        d_.push_back(0.0);
        x_.push_back(0.0);
        switch (rows[k].sense) {
        case Sense::le: lo_.push_back(-kInf); hi_.push_back(rows[k].rhs); break;
        case Sense::ge: lo_.push_back(rows[k].rhs); hi_.push_back(kInf); break;
        case Sense::eq: lo_.push_back(rows[k].rhs); hi_.push_back(rows[k].rhs); break;
        }
    }
    recompute_basics();
}

void LpKernel::recompute_basics() {
    for (int i = 0; i < m_; ++i) {
        const double* row = &tab_[static_cast<std::size_t>(i) * ncol_];
        double v = 0;
        for (int j = 0; j < ncol_; ++j)
            if (state_[j] != NbState::basic && row[j] != 0.0)
                v -= row[j] * x_[j];
        x_[basis_[i]] = v;
    }
}

void LpKernel::recompute_duals() {
    d_ = c_;
    for (int i = 0; i < m_; ++i) {
        const double cb = c_[basis_[i]];
        if (cb == 0.0)
            continue;
        const double* row = &tab_[static_cast<std::size_t>(i) * ncol_];
        for (int j = 0; j < ncol_; ++j)
            if (row[j] != 0.0)
                d_[j] -= cb * row[j];
    }
    for (int i = 0; i < m_; ++i)
        d_[basis_[i]] = 0.0;
}

bool LpKernel::dual_feasible() const {
    for (int j = 0; j < ncol_; ++j) {
        if (!movable(j))
            continue;
        switch (state_[j]) {
        case NbState::lower: if (d_[j] < -kDualTol) return false; break;
        case NbState::upper: if (d_[j] > kDualTol) return false; break;
        case NbState::free: if (std::abs(d_[j]) > kDualTol) return false; break;
        default: break;
        }
    }
    return true;
}

double LpKernel::infeasibility(int b) const {
    if (x_[b] < lo_[b] - kFeasTol)
        return lo_[b] - x_[b];
    if (x_[b] > hi_[b] + kFeasTol)
        return x_[b] - hi_[b];
    return 0.0;
}

void LpKernel::pivot(int r, int q) {
    double* pr = &tab_[static_cast<std::size_t>(r) * ncol_];
    const double inv = 1.0 / pr[q];
    nz_.clear();
    for (int j = 0; j < ncol_; ++j) {
        if (pr[j] == 0.0)
            continue;
        pr[j] *= inv;
        if (std::abs(pr[j]) < kDrop)
            pr[j] = 0.0;
        else
            nz_.push_back(j);
    }
    pr[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
        if (i == r)
            continue;
        double* pi = &tab_[static_cast<std::size_t>(i) * ncol_];
        const double f = pi[q];
        if (f == 0.0)
            continue;
        for (int j : nz_) {
            double v = pi[j] - f * pr[j];
            pi[j] = std::abs(v) < kDrop ? 0.0 : v;
        }
        pi[q] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
        for (int j : nz_)
            d_[j] -= f * pr[j];
        d_[q] = 0.0;
    }
    ++iters_;
}

LpStatus LpKernel::solve_primal() {
    recompute_basics();
    recompute_duals();
    const long long limit = 50LL * (m_ + ncol_) + 10000;
    std::vector<double> w(ncol_);
    struct Candidate {
        int row;
        double lim, alpha;
        bool to_lower;
    };
    std::vector<Candidate> cand;
    const int stall_limit = 2 * (m_ + ncol_) + 1000;
    std::vector<double> cb(m_);
    int degenerate = 0;
    bool bland = false;
    bool was_phase1 = true;

    for (long long it = 0; it < limit; ++it) {
        bool phase1 = false;
        for (int i = 0; i < m_; ++i) {
            const int b = basis_[i];
            if (x_[b] < lo_[b] - kFeasTol) {
                cb[i] = -1.0;
                phase1 = true;
            } else if (x_[b] > hi_[b] + kFeasTol) {
                cb[i] = 1.0;
                phase1 = true;
            } else {
                cb[i] = 0.0;
            }
        }
        if (was_phase1 && !phase1)
            recompute_duals();
        was_phase1 = phase1;

        const double* cost = d_.data();
        if (phase1) {
            std::fill(w.begin(), w.end(), 0.0);
            for (int i = 0; i < m_; ++i) {
                if (cb[i] == 0.0)
                    continue;
                const double* row = &tab_[static_cast<std::size_t>(i) * ncol_];
                for (int j = 0; j < ncol_; ++j)
                    if (row[j] != 0.0)
                        w[j] -= cb[i] * row[j];
            }
            cost = w.data();
        }

        // pricing
        int q = -1;
        double best = 0;
        for (int j = 0; j < ncol_; ++j) {
            if (!movable(j))
                continue;
            const double dj = cost[j];
            bool ok = false;
            switch (state_[j]) {
            case NbState::lower: ok = dj < -kDualTol; break;
            case NbState::upper: ok = dj > kDualTol; break;
            case NbState::free: ok = std::abs(dj) > kDualTol; break;
            default: break;
            }
            if (!ok)
                continue;
            if (bland) {
                q = j;
                break;
            }
            if (std::abs(dj) > best) {
                best = std::abs(dj);
                q = j;
            }
        }
        if (q < 0)
            return phase1 ? LpStatus::infeasible : LpStatus::optimal;

        const double dir = cost[q] < 0 ? 1.0 : -1.0;
        const double flip = (std::isfinite(lo_[q]) && std::isfinite(hi_[q])) ? hi_[q] - lo_[q] : kInf;
        // Harris: first the largest step that keeps every basic within tolerance,
        // then the biggest pivot among rows blocking before it
        cand.clear();
        double relaxed = kInf;
        for (int i = 0; i < m_; ++i) {
            const double a = t(i, q);
            if (std::abs(a) < kPivTol)
                continue;
            const int b = basis_[i];
            const double rate = -dir * a; // d x_b / d theta
            double lim = kInf;
            bool to_lower = false;
            if (rate < 0) {
                if (x_[b] > hi_[b] + kFeasTol) {
                    lim = (x_[b] - hi_[b]) / -rate;
                    to_lower = false;
                } else if (std::isfinite(lo_[b]) && x_[b] >= lo_[b] - kFeasTol) {
                    lim = (x_[b] - lo_[b]) / -rate;
                    to_lower = true;
                }
            } else {
                if (x_[b] < lo_[b] - kFeasTol) {
                    lim = (lo_[b] - x_[b]) / rate;
                    to_lower = true;
                } else if (std::isfinite(hi_[b]) && x_[b] <= hi_[b] + kFeasTol) {
                    lim = (hi_[b] - x_[b]) / rate;
                    to_lower = false;
                }
            }
            if (!std::isfinite(lim))
                continue;
            lim = std::max(lim, 0.0);
            cand.push_back({i, lim, a, to_lower});
            relaxed = std::min(relaxed, lim + kHarrisTol / std::abs(rate));
        }
        int r = -1;
        double theta = flip;
        double r_alpha = 0;
        bool r_to_lower = false;
        if (!cand.empty() && !(flip <= relaxed)) {
            double tight = kInf;
            for (const auto& c : cand)
                tight = std::min(tight, c.lim);
            for (const auto& c : cand) {
                bool take;
                if (bland)
                    take = c.lim <= tight + 1e-12 && (r < 0 || basis_[c.row] < basis_[r]);
                else
                    take = c.lim <= relaxed && (r < 0 || std::abs(c.alpha) > std::abs(r_alpha));
                if (take) {
                    r = c.row;
                    theta = c.lim;
                    r_alpha = c.alpha;
                    r_to_lower = c.to_lower;
                }
            }
        }
        if (!std::isfinite(theta))
            return LpStatus::unbounded;

        if (theta < 1e-12) {
            if (++degenerate > kDegenerateSwitch)
                bland = true;
            // a long degenerate run even under Bland's rule means the tableau
            // has lost accuracy; let the caller restart from scratch
            if (degenerate > stall_limit)
                return LpStatus::iteration_limit;
        } else {
            degenerate = 0;
            bland = false;
        }

        // move
        const double step = dir * theta;
        if (step != 0.0) {
            x_[q] += step;
            for (int i = 0; i < m_; ++i) {
                const double a = t(i, q);
                if (a != 0.0)
                    x_[basis_[i]] -= a * step;
            }
        }
        if (r < 0) {
            // bound flip of the entering variable
            if (dir > 0) {
                state_[q] = NbState::upper;
                x_[q] = hi_[q];
            } else {
                state_[q] = NbState::lower;
                x_[q] = lo_[q];
            }
            continue;
        }
        const int leave = basis_[r];
        if (r_to_lower) {
            state_[leave] = NbState::lower;
            x_[leave] = lo_[leave];
        } else {
            state_[leave] = NbState::upper;
            x_[leave] = hi_[leave];
        }
        pivot(r, q);
        basis_[r] = q;
        state_[q] = NbState::basic;
    }
    return LpStatus::iteration_limit;
}

LpStatus LpKernel::solve_dual() {
    recompute_basics();
    if (!dual_feasible()) {
        recompute_duals();
        if (!dual_feasible())
            return solve_primal();
    }
    const long long limit = 20LL * (m_ + ncol_) + 5000;
    const int stall_limit = 2 * (m_ + ncol_) + 1000;
    int degenerate = 0;
    bool bland = false;
    for (long long it = 0; it < limit; ++it) {
        // largest infeasibility, or the lowest basic index once stalling
        int r = -1;
        double worst = 0;
        for (int i = 0; i < m_; ++i) {
            const double inf = infeasibility(basis_[i]);
            if (inf <= 0)
                continue;
            if (bland ? (r < 0 || basis_[i] < basis_[r]) : inf > worst) {
                worst = inf;
                r = i;
            }
        }
        if (r < 0)
            return solve_primal(); // normally zero iterations; mops up drift

        const int b = basis_[r];
        const bool below = x_[b] < lo_[b];
        const double target = below ? lo_[b] : hi_[b];
        // Harris ratio test on the dual side, same idea as in the primal
        auto eligible = [&](int j, double a) {
            switch (state_[j]) {
            case NbState::lower: return below ? a < 0 : a > 0;
            case NbState::upper: return below ? a > 0 : a < 0;
            case NbState::free: return true;
            default: return false;
            }
        };
        double relaxed = kInf, best_ratio = kInf;
        for (int j = 0; j < ncol_; ++j) {
            if (!movable(j))
                continue;
            const double a = t(r, j);
            if (std::abs(a) < kPivTol || !eligible(j, a))
                continue;
            best_ratio = std::min(best_ratio, std::abs(d_[j]) / std::abs(a));
            relaxed = std::min(relaxed, (std::abs(d_[j]) + kDualTol) / std::abs(a));
        }
        int q = -1;
        double best_alpha = 0;
        for (int j = 0; j < ncol_ && std::isfinite(relaxed); ++j) {
            if (!movable(j))
                continue;
            const double a = t(r, j);
            if (std::abs(a) < kPivTol || !eligible(j, a))
                continue;
            const double ratio = std::abs(d_[j]) / std::abs(a);
            if (bland) {
                if (ratio <= best_ratio + 1e-12) {
                    q = j;
                    break;
                }
            } else if (ratio <= relaxed && std::abs(a) > std::abs(best_alpha)) {
                q = j;
                best_alpha = a;
            }
        }
        if (q < 0)
            return LpStatus::infeasible;
        if (best_ratio < 1e-12) {
            if (++degenerate > kDegenerateSwitch)
                bland = true;
            if (degenerate > stall_limit)
                return LpStatus::iteration_limit;
        } else {
            degenerate = 0;
        }

        const double a = t(r, q);
        const double dx = (x_[b] - target) / a;
        x_[q] += dx;
        for (int i = 0; i < m_; ++i) {
            const double ai = t(i, q);
            if (ai != 0.0)
                x_[basis_[i]] -= ai * dx;
        }
        x_[b] = target;
        state_[b] = below ? NbState::lower : NbState::upper;
        pivot(r, q);
        basis_[r] = q;
        state_[q] = NbState::basic;
    }
    // stalled; the primal method has the anti-cycling rule
    return solve_primal();
}

} // namespace scos::detail
