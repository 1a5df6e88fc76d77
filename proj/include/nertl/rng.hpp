#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "nertl/error.hpp"

namespace nertl {

// Deterministic, platform-independent random stream (xoshiro256** seeded
// via splitmix64). The same seed and call sequence yields the same values
// everywhere; std distributions are avoided on purpose because their output
// is implementation-defined.
//
// Not shareable across threads: fork() a child stream per consumer. A fork
// is derived from the parent's original seed plus the label, so it does not
// depend on how many values the parent has already drawn.
class SeededRng {
public:
    explicit SeededRng(uint64_t seed);

    uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double uniform();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Uniform integer in [0, n). Rejection sampling, bias-free.
    std::size_t uniform_index(std::size_t n);

    bool bernoulli(double p);

    SeededRng fork(std::string_view label) const;

    uint64_t seed() const { return seed_; }

    // Seeded Fisher-Yates. std::shuffle is implementation-defined, this is not.
    template <class T>
    void shuffle(std::vector<T>& xs) {
        for (std::size_t i = xs.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(xs[i - 1], xs[j]);
        }
    }

private:
    uint64_t seed_;
    uint64_t state_[4];
};

// FNV-1a over a byte string; used for fork labels and checkpoint checksums.
uint64_t fnv1a64(std::string_view bytes);

}  // namespace nertl
