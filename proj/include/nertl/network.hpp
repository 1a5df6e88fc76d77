#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nertl/crf.hpp"
#include "nertl/data.hpp"
#include "nertl/eval.hpp"
#include "nertl/layers.hpp"

namespace nertl {

// The six parameter groups in model order; this order defines "bottommost
// layer up to the topmost layer" for transfer prefixes.
enum class LayerId : int {
    token_emb = 1,
    char_emb = 2,
    char_lstm = 3,
    token_lstm = 4,
    dense = 5,
    seq_opt = 6,
};

constexpr int kNumLayers = 6;

const char* layer_name(LayerId id);

struct Hyperparameters {
    std::size_t token_emb_dim = 100;
    std::size_t char_emb_dim = 25;
    std::size_t char_lstm_hidden = 25;   // per direction
    std::size_t token_lstm_hidden = 100;  // per direction
    double learning_rate = 0.005;
    double dropout_rate = 0.5;
    double grad_clip_norm = 5.0;
    int max_epochs = 100;
    int patience = 10;
    uint64_t seed = 1;
    bool bidirectional = true;
    int min_token_freq = 1;

    std::size_t directions() const { return bidirectional ? 2 : 1; }
    std::size_t char_summary_dim() const { return directions() * char_lstm_hidden; }
    std::size_t token_lstm_in_dim() const { return token_emb_dim + char_summary_dim(); }
    std::size_t dense_in_dim() const { return directions() * token_lstm_hidden; }

    void validate() const;

    bool operator==(const Hyperparameters&) const = default;
};

// The six named parameter groups. Gradients reuse this struct (shapes are
// identical), and so do best-epoch snapshots and checkpoints.
struct ModelParams {
    EmbeddingTable token_emb;
    EmbeddingTable char_emb;
    LstmParams char_lstm_fwd, char_lstm_bwd;
    LstmParams token_lstm_fwd, token_lstm_bwd;
    DenseParams dense;
    TransitionTable transitions;

    static ModelParams make(const Hyperparameters& hp, std::size_t num_tokens,
                            std::size_t num_chars, std::size_t num_labels);

    // Visits every tensor in canonical order as f(layer, name, Mat&|Vec&).
    template <class F>
    void for_each(F&& f) {
        token_emb.for_each([&](const char* n, auto& t) { f(LayerId::token_emb, n, t); });
        char_emb.for_each([&](const char* n, auto& t) { f(LayerId::char_emb, n, t); });
        char_lstm_fwd.for_each([&](const char* n, auto& t) { f(LayerId::char_lstm, n, t); });
        char_lstm_bwd.for_each([&](const char* n, auto& t) { f(LayerId::char_lstm, n, t); });
        token_lstm_fwd.for_each([&](const char* n, auto& t) { f(LayerId::token_lstm, n, t); });
        token_lstm_bwd.for_each([&](const char* n, auto& t) { f(LayerId::token_lstm, n, t); });
        dense.for_each([&](const char* n, auto& t) { f(LayerId::dense, n, t); });
        transitions.for_each([&](const char* n, auto& t) { f(LayerId::seq_opt, n, t); });
    }
    template <class F>
    void for_each(F&& f) const {
        token_emb.for_each([&](const char* n, const auto& t) { f(LayerId::token_emb, n, t); });
        char_emb.for_each([&](const char* n, const auto& t) { f(LayerId::char_emb, n, t); });
        char_lstm_fwd.for_each([&](const char* n, const auto& t) { f(LayerId::char_lstm, n, t); });
        char_lstm_bwd.for_each([&](const char* n, const auto& t) { f(LayerId::char_lstm, n, t); });
        token_lstm_fwd.for_each([&](const char* n, const auto& t) { f(LayerId::token_lstm, n, t); });
        token_lstm_bwd.for_each([&](const char* n, const auto& t) { f(LayerId::token_lstm, n, t); });
        dense.for_each([&](const char* n, const auto& t) { f(LayerId::dense, n, t); });
        transitions.for_each([&](const char* n, const auto& t) { f(LayerId::seq_opt, n, t); });
    }

    // Flat views over every tensor's storage, canonical order.
    std::vector<std::span<double>> flat_views();

    bool operator==(const ModelParams&) const = default;
};

using ModelGrads = ModelParams;

struct NerModel {
    Vocabulary vocab;
    Hyperparameters hp;
    ModelParams params;

    // Fresh model with seeded initialization (draws from rng in canonical
    // parameter order).
    static NerModel init(Vocabulary vocab, const Hyperparameters& hp, SeededRng& rng);

    std::size_t num_labels() const { return vocab.num_labels(); }
    void check_consistent() const;
};

enum class RunMode { train, infer };

// Everything backprop needs from one sentence's forward pass.
struct ForwardCache {
    EncodedSentence input;
    std::vector<BiLstmCache> char_caches;       // one per token
    std::vector<LstmSequenceCache> char_caches_uni;
    std::vector<Vec> char_summaries;
    std::vector<Vec> concat_inputs;   // after dropout; inputs to the token LSTM
    std::vector<Vec> dropout_masks;   // scale factors actually applied (empty if no dropout)
    BiLstmCache token_cache;
    LstmSequenceCache token_cache_uni;
    std::vector<Vec> token_states;    // token LSTM outputs per position
    EmissionLattice lattice;
};

// Token path: char embeddings -> char LSTM summary, concatenated with the
// token embedding; inverted dropout on the concatenation in train mode;
// token LSTM over the sentence; dense scores per position.
EmissionLattice network_forward(const NerModel& model, const EncodedSentence& sentence,
                                RunMode mode, SeededRng& rng, ForwardCache* cache = nullptr);

// CRF negative log-likelihood plus gradients for all six groups.
double loss_and_grads(const NerModel& model, const EncodedSentence& sentence,
                      std::span<const int> gold, SeededRng& rng, ModelGrads& grads);

// Clips the joint gradient norm to hp.grad_clip_norm, then SGD update.
// Returns the clip factor applied.
double sgd_step(NerModel& model, ModelGrads& grads, double learning_rate);

std::vector<int> predict(const NerModel& model, const EncodedSentence& sentence);

// Decodes a raw sentence end to end (infer-mode encoding, Viterbi).
std::vector<std::string> predict_labels(const NerModel& model, const Sentence& sentence);

LabelSeqs predict_corpus(const NerModel& model, const Corpus& corpus);

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double dev_f1 = 0.0;
};

struct TrainingReport {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    double best_dev_f1 = 0.0;
    std::string stop_reason;  // "patience" or "max_epochs"

    std::string to_text() const;
};

// Dev-set metric used for early stopping; defaults to entity F1.
using DevMetric = std::function<double(const NerModel&, const Corpus&)>;

// One SGD step per sentence, seeded shuffling per epoch, early stopping
// with hp.patience, best-epoch parameters restored on return.
TrainingReport fit(NerModel& model, const Corpus& train, const Corpus& dev, SeededRng& rng,
                   const DevMetric& dev_metric = {});

}  // namespace nertl
