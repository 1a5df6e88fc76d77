#pragma once

#include <string>
#include <vector>

#include "nertl/math.hpp"

namespace nertl {

// Lookup table mapping ids to embedding rows. Row 0 is reserved for PAD,
// row 1 for UNK; the vocabulary modules guarantee ids respect that layout.
struct EmbeddingTable {
    std::string name;
    Mat table;  // vocab_size x dim

    std::size_t vocab_size() const { return table.rows; }
    std::size_t dim() const { return table.cols; }

    void init(SeededRng& rng);

    template <class F>
    void for_each(F&& f) {
        f("table", table);
    }
    template <class F>
    void for_each(F&& f) const {
        f("table", table);
    }

    bool operator==(const EmbeddingTable&) const = default;
};

std::vector<Vec> embedding_forward(const EmbeddingTable& emb, std::span<const int> ids);

// Adds each upstream gradient to the looked-up row; rows not in `ids` are
// untouched.
void embedding_backward(std::span<const int> ids, const std::vector<Vec>& upstream,
                        Mat& grad_table);

// One LSTM direction: per gate, input weights W (hidden x in_dim), recurrent
// weights U (hidden x hidden) and bias b (hidden).
struct LstmParams {
    Mat w_input, w_forget, w_output, w_cand;
    Mat u_input, u_forget, u_output, u_cand;
    Vec b_input, b_forget, b_output, b_cand;

    static LstmParams make(std::size_t in_dim, std::size_t hidden);

    std::size_t hidden() const { return b_input.size(); }
    std::size_t in_dim() const { return w_input.cols; }

    // uniform(-sqrt(3/fan_in)) weights, zero biases, forget bias +1.
    void init(SeededRng& rng);

    template <class F>
    void for_each(F&& f) {
        f("w_input", w_input);
        f("w_forget", w_forget);
        f("w_output", w_output);
        f("w_cand", w_cand);
        f("u_input", u_input);
        f("u_forget", u_forget);
        f("u_output", u_output);
        f("u_cand", u_cand);
        f("b_input", b_input);
        f("b_forget", b_forget);
        f("b_output", b_output);
        f("b_cand", b_cand);
    }
    template <class F>
    void for_each(F&& f) const {
        f("w_input", w_input);
        f("w_forget", w_forget);
        f("w_output", w_output);
        f("w_cand", w_cand);
        f("u_input", u_input);
        f("u_forget", u_forget);
        f("u_output", u_output);
        f("u_cand", u_cand);
        f("b_input", b_input);
        f("b_forget", b_forget);
        f("b_output", b_output);
        f("b_cand", b_cand);
    }

    bool operator==(const LstmParams&) const = default;
};

// Everything the backward pass needs from one cell step. h and c double as
// the step's outputs.
struct LstmStepCache {
    Vec x, h_prev, c_prev;
    Vec gate_input, gate_forget, gate_output, gate_cand;  // post-activation
    Vec c, tanh_c, h;
};

// i = σ(W_i x + U_i h_prev + b_i), f, o likewise, g = tanh(...),
// c = f⊙c_prev + i⊙g, h = o⊙tanh(c).
LstmStepCache lstm_step(const LstmParams& p, const Vec& x, const Vec& h_prev, const Vec& c_prev);

struct LstmStepGrads {
    Vec dx, dh_prev, dc_prev;
};

// Accumulates parameter gradients into `grads` (same shapes as p).
LstmStepGrads lstm_step_backward(const LstmParams& p, const LstmStepCache& step, const Vec& dh,
                                 const Vec& dc_next, LstmParams& grads);

struct LstmSequenceCache {
    std::vector<LstmStepCache> steps;
};

// Runs the cell left to right from zero initial states; returns h per step.
std::vector<Vec> lstm_sequence(const LstmParams& p, const std::vector<Vec>& xs,
                               LstmSequenceCache& cache);

// dh_per_step[t] is the upstream gradient on h(t); an empty Vec means no
// upstream gradient at that step. Returns dxs.
std::vector<Vec> lstm_sequence_backward(const LstmParams& p, const LstmSequenceCache& cache,
                                        const std::vector<Vec>& dh_per_step, LstmParams& grads);

enum class BiLstmMode { all_states, final_concat };

struct BiLstmCache {
    LstmSequenceCache fwd, bwd;
    BiLstmMode mode = BiLstmMode::all_states;
    std::size_t len = 0;
};

// Independent parameters per direction, zero initial states. all_states
// yields [h_fwd(t); h_bwd(t)] per position; final_concat yields the single
// vector [h_fwd(T); h_bwd(1)].
std::vector<Vec> bilstm_sequence(const LstmParams& fwd, const LstmParams& bwd,
                                 const std::vector<Vec>& xs, BiLstmMode mode, BiLstmCache& cache);

// dout matches the forward output arity (one Vec for final_concat).
// Returns dxs.
std::vector<Vec> bilstm_sequence_backward(const LstmParams& fwd, const LstmParams& bwd,
                                          const BiLstmCache& cache, const std::vector<Vec>& dout,
                                          LstmParams& grad_fwd, LstmParams& grad_bwd);

// Label-scoring projection.
struct DenseParams {
    Mat w;  // num_labels x in_dim
    Vec b;  // num_labels

    static DenseParams make(std::size_t in_dim, std::size_t num_labels);
    void init(SeededRng& rng);

    template <class F>
    void for_each(F&& f) {
        f("w", w);
        f("b", b);
    }
    template <class F>
    void for_each(F&& f) const {
        f("w", w);
        f("b", b);
    }

    bool operator==(const DenseParams&) const = default;
};

Vec dense_forward(const DenseParams& p, const Vec& h);

// Accumulates dW, db into grads; returns dh.
Vec dense_backward(const DenseParams& p, const Vec& h, const Vec& dscores, DenseParams& grads);

}  // namespace nertl
