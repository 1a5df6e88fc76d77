#pragma once

#include <vector>

#include "nertl/math.hpp"

namespace nertl {

// Bigram label transition scores on a (K+2)x(K+2) grid. The two extra
// indices are the virtual START and STOP labels; scoring never reads
// entries into START or out of STOP.
struct TransitionTable {
    Mat scores;

    static TransitionTable make(std::size_t num_labels);

    std::size_t num_labels() const { return scores.rows - 2; }
    std::size_t start_index() const { return num_labels(); }
    std::size_t stop_index() const { return num_labels() + 1; }

    template <class F>
    void for_each(F&& f) {
        f("transitions", scores);
    }
    template <class F>
    void for_each(F&& f) const {
        f("transitions", scores);
    }

    bool operator==(const TransitionTable&) const = default;
};

// Per-token label scores, sequence_length x K.
using EmissionLattice = Mat;

// T[START][y1] + Σ e[t][yt] + Σ T[yt][yt+1] + T[yL][STOP].
double path_score(const EmissionLattice& emissions, const TransitionTable& trans,
                  std::span<const int> labels);

// log Σ over all K^L paths of exp(path_score), by the forward algorithm.
double log_partition(const EmissionLattice& emissions, const TransitionTable& trans);

struct CrfGrads {
    Mat d_emissions;    // L x K
    Mat d_transitions;  // (K+2) x (K+2)
};

// Negative conditional log-likelihood of the gold path and its exact
// gradients via forward-backward (marginal expectations minus indicators).
double nll_and_gradients(const EmissionLattice& emissions, const TransitionTable& trans,
                         std::span<const int> gold, CrfGrads& grads);

struct ViterbiResult {
    std::vector<int> labels;
    double score = 0.0;
};

// Exact argmax decoding; ties broken toward the lower label index.
ViterbiResult viterbi_decode(const EmissionLattice& emissions, const TransitionTable& trans);

}  // namespace nertl
