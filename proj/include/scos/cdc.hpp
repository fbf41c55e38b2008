#pragma once

// PolyDot slicing arithmetic: copies, recovery threshold and symbol counts.

namespace scos {

struct CodeSplit {
    long long m = 1; // copies are m-th fractions of A and B
    long long s = 1; // horizontal slices
    long long t = 1; // vertical slices
    long long k = 1; // recovery threshold t^2 (2s - 1)
};

enum class SplitObjective { max_k, min_k };

long long recovery_threshold(long long s, long long t);

// Validated split with m = s t and k derived.
CodeSplit make_split(long long s, long long t);

// Checks the CodeSplit invariants, throws InputError otherwise.
void validate_split(const CodeSplit& split);

// Scans every divisor pair s t = m. Ties go to the smaller t.
CodeSplit optimal_split(long long m, SplitObjective objective);

struct SymbolCounts {
    double d_enc = 0;
    double d_dec = 0;
    double d_comm_to = 0;
    double d_cmp = 0;
    double d_comm_fr = 0;
};

SymbolCounts symbol_counts(long long n, const CodeSplit& split, long long n_local,
                           long long n_offload);

// Only square inputs are modeled.
void require_square(long long rows, long long cols);

} // namespace scos
