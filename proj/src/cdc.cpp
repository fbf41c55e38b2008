#include "scos/cdc.hpp"

#include <cmath>
#include <string>

#include "scos/errors.hpp"

namespace scos {

long long recovery_threshold(long long s, long long t) {
    if (s < 1 || t < 1)
        throw InputError("recovery_threshold: s and t must be >= 1 (got s=" + std::to_string(s) +
                         ", t=" + std::to_string(t) + ")");
    return t * t * (2 * s - 1);
}

CodeSplit make_split(long long s, long long t) {
    CodeSplit c;
    c.s = s;
    c.t = t;
    c.k = recovery_threshold(s, t);
    c.m = s * t;
    return c;
}

void validate_split(const CodeSplit& split) {
    if (split.m < 1 || split.s < 1 || split.t < 1 || split.k < 1)
        throw InputError("code split: all of m, s, t, k must be >= 1");
    if (split.s * split.t != split.m)
        throw InputError("code split: s*t must equal m");
    if (split.k != recovery_threshold(split.s, split.t))
        throw InputError("code split: k must equal t^2 (2s-1)");
}

CodeSplit optimal_split(long long m, SplitObjective objective) {
    if (m < 1)
        throw InputError("optimal_split: m must be >= 1");
    CodeSplit best;
    bool have = false;
    // t ascending, so strict comparison keeps the smallest t on ties
    for (long long t = 1; t <= m; ++t) {
        if (m % t != 0)
            continue;
        CodeSplit c = make_split(m / t, t);
        bool better = !have || (objective == SplitObjective::max_k ? c.k > best.k : c.k < best.k);
        if (better) {
            best = c;
            have = true;
        }
    }
    return best;
}

SymbolCounts symbol_counts(long long n, const CodeSplit& split, long long n_local,
                           long long n_offload) {
    if (n < 1)
        throw InputError("symbol_counts: N must be >= 1");
    if (n_local < 0 || n_offload < 0)
        throw InputError("symbol_counts: copy counts must be non-negative");
    validate_split(split);
    const double N = static_cast<double>(n);
    const double N2 = N * N;
    const double k = static_cast<double>(split.k);
    const double lg = std::log2(k);
    SymbolCounts c;
    c.d_enc = N2 * static_cast<double>(n_local + n_offload);
    c.d_dec = N2 * k * lg * lg;
    c.d_comm_to = N2 / static_cast<double>(split.m);
    c.d_cmp = N2 * N / static_cast<double>(split.m * split.t);
    c.d_comm_fr = N2 / static_cast<double>(split.t * split.t);
    return c;
}

void require_square(long long rows, long long cols) {
    if (rows != cols)
        throw InputError("non-square matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " (only square inputs are modeled)");
}

} // namespace scos
