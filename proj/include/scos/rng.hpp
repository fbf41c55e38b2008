#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace scos {

// 64-bit Mersenne Twister (its output stream is fixed by the C++ standard)
// with our own mapping to integers and reals, so draws match on every platform.
// See docs/rng.md.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform on [0, n), n > 0, by rejection of the biased tail
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold)
                return x % n;
        }
    }

    // uniform on [lo, hi]
    long long range(long long lo, long long hi) {
        if (hi <= lo)
            return lo;
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // index drawn with the given probabilities (inverse CDF)
    std::size_t pick(const std::vector<double>& probs) {
        const double u = uniform01();
        double acc = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc)
                return i;
        }
        // rounding slack: last index with positive probability
        for (std::size_t i = probs.size(); i-- > 0;)
            if (probs[i] > 0)
                return i;
        return 0;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace scos
