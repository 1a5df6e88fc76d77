#include "nertl/crf.hpp"

namespace nertl {

namespace {

void check_lattice(const EmissionLattice& emissions, const TransitionTable& trans) {
    require(emissions.rows > 0, "crf: empty emission lattice");
    require(emissions.cols == trans.num_labels(), "crf: lattice width != transition label count");
}

// alpha[t][k] = log sum of exp(score) over all prefixes ending in label k at t.
Mat forward_scores(const EmissionLattice& e, const TransitionTable& trans) {
    const std::size_t len = e.rows, k_labels = e.cols;
    const std::size_t start = trans.start_index();
    Mat alpha(len, k_labels);
    for (std::size_t k = 0; k < k_labels; ++k) alpha(0, k) = trans.scores(start, k) + e(0, k);
    Vec acc(k_labels);
    for (std::size_t t = 1; t < len; ++t) {
        for (std::size_t k = 0; k < k_labels; ++k) {
            for (std::size_t j = 0; j < k_labels; ++j)
                acc[j] = alpha(t - 1, j) + trans.scores(j, k);
            alpha(t, k) = e(t, k) + log_sum_exp(acc.data());
        }
    }
    return alpha;
}

// beta[t][k] = log sum over all suffixes given label k at t (including the
// STOP transition, excluding e[t][k] itself).
Mat backward_scores(const EmissionLattice& e, const TransitionTable& trans) {
    const std::size_t len = e.rows, k_labels = e.cols;
    const std::size_t stop = trans.stop_index();
    Mat beta(len, k_labels);
    for (std::size_t k = 0; k < k_labels; ++k) beta(len - 1, k) = trans.scores(k, stop);
    Vec acc(k_labels);
    for (std::size_t t = len - 1; t-- > 0;) {
        for (std::size_t j = 0; j < k_labels; ++j) {
            for (std::size_t k = 0; k < k_labels; ++k)
                acc[k] = trans.scores(j, k) + e(t + 1, k) + beta(t + 1, k);
            beta(t, j) = log_sum_exp(acc.data());
        }
    }
    return beta;
}

}  // namespace

TransitionTable TransitionTable::make(std::size_t num_labels) {
    TransitionTable t;
    t.scores = Mat(num_labels + 2, num_labels + 2);
    return t;
}

double path_score(const EmissionLattice& emissions, const TransitionTable& trans,
                  std::span<const int> labels) {
    check_lattice(emissions, trans);
    require(labels.size() == emissions.rows, "path_score: label sequence length mismatch");
    const std::size_t k_labels = emissions.cols;
    for (int y : labels)
        require(y >= 0 && static_cast<std::size_t>(y) < k_labels, "path_score: label out of range");

    double score = trans.scores(trans.start_index(), static_cast<std::size_t>(labels[0]));
    for (std::size_t t = 0; t < labels.size(); ++t) {
        score += emissions(t, static_cast<std::size_t>(labels[t]));
        if (t + 1 < labels.size())
            score += trans.scores(static_cast<std::size_t>(labels[t]),
                                  static_cast<std::size_t>(labels[t + 1]));
    }
    score += trans.scores(static_cast<std::size_t>(labels.back()), trans.stop_index());
    return score;
}

double log_partition(const EmissionLattice& emissions, const TransitionTable& trans) {
    check_lattice(emissions, trans);
    const std::size_t len = emissions.rows, k_labels = emissions.cols;
    const Mat alpha = forward_scores(emissions, trans);
    Vec terminal(k_labels);
    for (std::size_t k = 0; k < k_labels; ++k)
        terminal[k] = alpha(len - 1, k) + trans.scores(k, trans.stop_index());
    return log_sum_exp(terminal.data());
}

double nll_and_gradients(const EmissionLattice& emissions, const TransitionTable& trans,
                         std::span<const int> gold, CrfGrads& grads) {
    check_lattice(emissions, trans);
    const std::size_t len = emissions.rows, k_labels = emissions.cols;
    const std::size_t start = trans.start_index(), stop = trans.stop_index();

    const double gold_score = path_score(emissions, trans, gold);
    const Mat alpha = forward_scores(emissions, trans);
    const Mat beta = backward_scores(emissions, trans);

    Vec terminal(k_labels);
    for (std::size_t k = 0; k < k_labels; ++k)
        terminal[k] = alpha(len - 1, k) + trans.scores(k, stop);
    const double log_z = log_sum_exp(terminal.data());

    grads.d_emissions = Mat(len, k_labels);
    grads.d_transitions = Mat(k_labels + 2, k_labels + 2);

    // d logZ / d e[t][k] = P(y_t = k); the gold path contributes -1 at its labels.
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t k = 0; k < k_labels; ++k)
            grads.d_emissions(t, k) = std::exp(alpha(t, k) + beta(t, k) - log_z);
        grads.d_emissions(t, static_cast<std::size_t>(gold[t])) -= 1.0;
    }

    // Start / interior / stop transition marginals, minus gold indicators.
    for (std::size_t k = 0; k < k_labels; ++k) {
        grads.d_transitions(start, k) =
            std::exp(trans.scores(start, k) + emissions(0, k) + beta(0, k) - log_z);
        grads.d_transitions(k, stop) = std::exp(alpha(len - 1, k) + trans.scores(k, stop) - log_z);
    }
    for (std::size_t t = 0; t + 1 < len; ++t) {
        for (std::size_t a = 0; a < k_labels; ++a) {
            for (std::size_t b = 0; b < k_labels; ++b) {
                grads.d_transitions(a, b) += std::exp(alpha(t, a) + trans.scores(a, b) +
                                                      emissions(t + 1, b) + beta(t + 1, b) - log_z);
            }
        }
    }
    grads.d_transitions(start, static_cast<std::size_t>(gold[0])) -= 1.0;
    for (std::size_t t = 0; t + 1 < len; ++t)
        grads.d_transitions(static_cast<std::size_t>(gold[t]),
                            static_cast<std::size_t>(gold[t + 1])) -= 1.0;
    grads.d_transitions(static_cast<std::size_t>(gold[len - 1]), stop) -= 1.0;

    return log_z - gold_score;
}

ViterbiResult viterbi_decode(const EmissionLattice& emissions, const TransitionTable& trans) {
    check_lattice(emissions, trans);
    const std::size_t len = emissions.rows, k_labels = emissions.cols;
    const std::size_t start = trans.start_index(), stop = trans.stop_index();

    Mat best(len, k_labels);
    std::vector<std::vector<int>> back(len, std::vector<int>(k_labels, 0));

    for (std::size_t k = 0; k < k_labels; ++k) best(0, k) = trans.scores(start, k) + emissions(0, k);

    for (std::size_t t = 1; t < len; ++t) {
        for (std::size_t k = 0; k < k_labels; ++k) {
            double best_score = best(t - 1, 0) + trans.scores(0, k);
            int best_prev = 0;
            for (std::size_t j = 1; j < k_labels; ++j) {
                const double s = best(t - 1, j) + trans.scores(j, k);
                if (s > best_score) {  // strict: ties keep the lower index
                    best_score = s;
                    best_prev = static_cast<int>(j);
                }
            }
            best(t, k) = best_score + emissions(t, k);
            back[t][k] = best_prev;
        }
    }

    double best_final = best(len - 1, 0) + trans.scores(0, stop);
    int last = 0;
    for (std::size_t k = 1; k < k_labels; ++k) {
        const double s = best(len - 1, k) + trans.scores(k, stop);
        if (s > best_final) {
            best_final = s;
            last = static_cast<int>(k);
        }
    }

    ViterbiResult result;
    result.score = best_final;
    result.labels.assign(len, 0);
    result.labels[len - 1] = last;
    for (std::size_t t = len - 1; t > 0; --t)
        result.labels[t - 1] = back[t][static_cast<std::size_t>(result.labels[t])];
    return result;
}

}  // namespace nertl
