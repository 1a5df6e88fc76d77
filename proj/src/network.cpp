#include "nertl/network.hpp"

#include <algorithm>
#include <sstream>

namespace nertl {

const char* layer_name(LayerId id) {
    switch (id) {
        case LayerId::token_emb: return "token_emb";
        case LayerId::char_emb: return "char_emb";
        case LayerId::char_lstm: return "char_lstm";
        case LayerId::token_lstm: return "token_lstm";
        case LayerId::dense: return "dense";
        case LayerId::seq_opt: return "seq_opt";
    }
    return "?";
}

void Hyperparameters::validate() const {
    require(token_emb_dim > 0 && char_emb_dim > 0 && char_lstm_hidden > 0 && token_lstm_hidden > 0,
            "hyperparameters: dimensions must be positive");
    require(learning_rate >= 0.0, "hyperparameters: learning_rate must be nonnegative");
    require(dropout_rate >= 0.0 && dropout_rate < 1.0, "hyperparameters: dropout_rate outside [0,1)");
    require(grad_clip_norm > 0.0, "hyperparameters: grad_clip_norm must be positive");
    require(max_epochs >= 1, "hyperparameters: max_epochs must be >= 1");
    require(patience >= 1, "hyperparameters: patience must be >= 1");
    require(min_token_freq >= 1, "hyperparameters: min_token_freq must be >= 1");
}

ModelParams ModelParams::make(const Hyperparameters& hp, std::size_t num_tokens,
                              std::size_t num_chars, std::size_t num_labels) {
    ModelParams p;
    p.token_emb.name = "token";
    p.token_emb.table = Mat(num_tokens, hp.token_emb_dim);
    p.char_emb.name = "char";
    p.char_emb.table = Mat(num_chars, hp.char_emb_dim);
    p.char_lstm_fwd = LstmParams::make(hp.char_emb_dim, hp.char_lstm_hidden);
    p.char_lstm_bwd = LstmParams::make(hp.char_emb_dim, hp.char_lstm_hidden);
    p.token_lstm_fwd = LstmParams::make(hp.token_lstm_in_dim(), hp.token_lstm_hidden);
    p.token_lstm_bwd = LstmParams::make(hp.token_lstm_in_dim(), hp.token_lstm_hidden);
    p.dense = DenseParams::make(hp.dense_in_dim(), num_labels);
    p.transitions = TransitionTable::make(num_labels);
    return p;
}

std::vector<std::span<double>> ModelParams::flat_views() {
    std::vector<std::span<double>> views;
    for_each([&](LayerId, const char*, auto& tensor) { views.push_back(tensor.data()); });
    return views;
}

NerModel NerModel::init(Vocabulary vocab, const Hyperparameters& hp, SeededRng& rng) {
    hp.validate();
    NerModel m;
    m.vocab = std::move(vocab);
    m.hp = hp;
    m.params =
        ModelParams::make(hp, m.vocab.num_tokens(), m.vocab.num_chars(), m.vocab.num_labels());
    m.params.token_emb.init(rng);
    m.params.char_emb.init(rng);
    m.params.char_lstm_fwd.init(rng);
    m.params.char_lstm_bwd.init(rng);
    m.params.token_lstm_fwd.init(rng);
    m.params.token_lstm_bwd.init(rng);
    m.params.dense.init(rng);
    // transitions stay zero: uniform prior over label bigrams
    m.check_consistent();
    return m;
}

void NerModel::check_consistent() const {
    require(params.token_emb.vocab_size() == vocab.num_tokens(), "model: token table size mismatch");
    require(params.char_emb.vocab_size() == vocab.num_chars(), "model: char table size mismatch");
    require(params.dense.w.cols == hp.dense_in_dim(), "model: dense input dim mismatch");
    require(params.dense.w.rows == vocab.num_labels(), "model: dense label count mismatch");
    require(params.transitions.num_labels() == vocab.num_labels(),
            "model: transition label count mismatch");
    require(params.token_lstm_fwd.in_dim() == hp.token_lstm_in_dim(),
            "model: token LSTM input dim mismatch");
}

namespace {

// Character path for one token: embeddings then the char LSTM summary.
Vec char_summary_for_token(const NerModel& model, const std::vector<int>& char_ids,
                           BiLstmCache* bi_cache, LstmSequenceCache* uni_cache) {
    require(!char_ids.empty(), "network_forward: token with zero characters");
    const std::vector<Vec> embs = embedding_forward(model.params.char_emb, char_ids);
    if (model.hp.bidirectional) {
        BiLstmCache local;
        BiLstmCache& cache = bi_cache ? *bi_cache : local;
        return bilstm_sequence(model.params.char_lstm_fwd, model.params.char_lstm_bwd, embs,
                               BiLstmMode::final_concat, cache)[0];
    }
    LstmSequenceCache local;
    LstmSequenceCache& cache = uni_cache ? *uni_cache : local;
    return lstm_sequence(model.params.char_lstm_fwd, embs, cache).back();
}

}  // namespace

EmissionLattice network_forward(const NerModel& model, const EncodedSentence& sentence,
                                RunMode mode, SeededRng& rng, ForwardCache* cache) {
    const std::size_t len = sentence.token_ids.size();
    require(len > 0, "network_forward: empty sentence");
    require(sentence.char_ids.size() == len, "network_forward: char id rows mismatch");

    if (cache) {
        *cache = ForwardCache{};
        cache->input = sentence;
        cache->char_caches.resize(len);
        cache->char_caches_uni.resize(len);
    }

    const std::vector<Vec> token_embs = embedding_forward(model.params.token_emb, sentence.token_ids);

    std::vector<Vec> concat(len);
    const double drop = model.hp.dropout_rate;
    const bool apply_dropout = mode == RunMode::train && drop > 0.0;
    for (std::size_t t = 0; t < len; ++t) {
        Vec summary = char_summary_for_token(model, sentence.char_ids[t],
                                             cache ? &cache->char_caches[t] : nullptr,
                                             cache ? &cache->char_caches_uni[t] : nullptr);
        if (cache) cache->char_summaries.push_back(summary);

        Vec v(token_embs[t].size() + summary.size());
        for (std::size_t k = 0; k < token_embs[t].size(); ++k) v[k] = token_embs[t][k];
        for (std::size_t k = 0; k < summary.size(); ++k) v[token_embs[t].size() + k] = summary[k];

        if (apply_dropout) {
            // Inverted dropout: kept units scaled by 1/(1-p), inference
            // needs no rescaling.
            Vec mask(v.size());
            const double scale = 1.0 / (1.0 - drop);
            for (std::size_t k = 0; k < v.size(); ++k) {
                mask[k] = rng.bernoulli(drop) ? 0.0 : scale;
                v[k] *= mask[k];
            }
            if (cache) cache->dropout_masks.push_back(std::move(mask));
        }
        concat[t] = std::move(v);
    }

    std::vector<Vec> states;
    if (model.hp.bidirectional) {
        BiLstmCache local;
        BiLstmCache& tc = cache ? cache->token_cache : local;
        states = bilstm_sequence(model.params.token_lstm_fwd, model.params.token_lstm_bwd, concat,
                                 BiLstmMode::all_states, tc);
    } else {
        LstmSequenceCache local;
        LstmSequenceCache& tc = cache ? cache->token_cache_uni : local;
        states = lstm_sequence(model.params.token_lstm_fwd, concat, tc);
    }

    EmissionLattice lattice(len, model.num_labels());
    for (std::size_t t = 0; t < len; ++t) {
        const Vec scores = dense_forward(model.params.dense, states[t]);
        std::copy(scores.a.begin(), scores.a.end(), lattice.row(t).begin());
    }

    if (cache) {
        cache->concat_inputs = std::move(concat);
        cache->token_states = std::move(states);
        cache->lattice = lattice;
    }
    return lattice;
}

double loss_and_grads(const NerModel& model, const EncodedSentence& sentence,
                      std::span<const int> gold, SeededRng& rng, ModelGrads& grads) {
    require(gold.size() == sentence.token_ids.size(), "loss_and_grads: gold length mismatch");

    grads = ModelParams::make(model.hp, model.vocab.num_tokens(), model.vocab.num_chars(),
                              model.vocab.num_labels());

    ForwardCache cache;
    network_forward(model, sentence, RunMode::train, rng, &cache);

    CrfGrads crf_grads;
    const double loss = nll_and_gradients(cache.lattice, model.params.transitions, gold, crf_grads);
    grads.transitions.scores = std::move(crf_grads.d_transitions);

    const std::size_t len = sentence.token_ids.size();

    // Dense layer, per position.
    std::vector<Vec> dstates(len);
    for (std::size_t t = 0; t < len; ++t) {
        Vec demissions(model.num_labels());
        const auto row = crf_grads.d_emissions.row(t);
        std::copy(row.begin(), row.end(), demissions.a.begin());
        dstates[t] = dense_backward(model.params.dense, cache.token_states[t], demissions,
                                    grads.dense);
    }

    // Token LSTM back to the concatenated inputs.
    std::vector<Vec> dconcat;
    if (model.hp.bidirectional) {
        dconcat = bilstm_sequence_backward(model.params.token_lstm_fwd, model.params.token_lstm_bwd,
                                           cache.token_cache, dstates, grads.token_lstm_fwd,
                                           grads.token_lstm_bwd);
    } else {
        dconcat = lstm_sequence_backward(model.params.token_lstm_fwd, cache.token_cache_uni,
                                         dstates, grads.token_lstm_fwd);
    }

    // Dropout mask, then split into the token-embedding and char-summary parts.
    const std::size_t emb_dim = model.hp.token_emb_dim;
    std::vector<Vec> d_token_rows(len);
    for (std::size_t t = 0; t < len; ++t) {
        if (!cache.dropout_masks.empty()) {
            for (std::size_t k = 0; k < dconcat[t].size(); ++k)
                dconcat[t][k] *= cache.dropout_masks[t][k];
        }
        Vec d_emb(emb_dim);
        for (std::size_t k = 0; k < emb_dim; ++k) d_emb[k] = dconcat[t][k];
        d_token_rows[t] = std::move(d_emb);

        Vec d_summary(dconcat[t].size() - emb_dim);
        for (std::size_t k = 0; k < d_summary.size(); ++k) d_summary[k] = dconcat[t][emb_dim + k];

        std::vector<Vec> d_char_embs;
        if (model.hp.bidirectional) {
            std::vector<Vec> dout{std::move(d_summary)};
            d_char_embs = bilstm_sequence_backward(model.params.char_lstm_fwd,
                                                   model.params.char_lstm_bwd, cache.char_caches[t],
                                                   dout, grads.char_lstm_fwd, grads.char_lstm_bwd);
        } else {
            const std::size_t n_chars = cache.char_caches_uni[t].steps.size();
            std::vector<Vec> dh(n_chars);
            dh[n_chars - 1] = std::move(d_summary);
            d_char_embs = lstm_sequence_backward(model.params.char_lstm_fwd,
                                                 cache.char_caches_uni[t], dh, grads.char_lstm_fwd);
        }
        embedding_backward(sentence.char_ids[t], d_char_embs, grads.char_emb.table);
    }
    embedding_backward(sentence.token_ids, d_token_rows, grads.token_emb.table);

    return loss;
}

double sgd_step(NerModel& model, ModelGrads& grads, double learning_rate) {
    const double factor = clip_global_norm(grads.flat_views(), model.hp.grad_clip_norm);
    auto param_views = model.params.flat_views();
    auto grad_views = grads.flat_views();
    require(param_views.size() == grad_views.size(), "sgd_step: tensor count mismatch");
    for (std::size_t i = 0; i < param_views.size(); ++i) {
        require(param_views[i].size() == grad_views[i].size(), "sgd_step: tensor shape mismatch");
        add_scaled(param_views[i], grad_views[i], -learning_rate);
    }
    return factor;
}

std::vector<int> predict(const NerModel& model, const EncodedSentence& sentence) {
    SeededRng unused(0);  // infer mode draws nothing
    const EmissionLattice lattice = network_forward(model, sentence, RunMode::infer, unused);
    return viterbi_decode(lattice, model.params.transitions).labels;
}

std::vector<std::string> predict_labels(const NerModel& model, const Sentence& sentence) {
    SeededRng unused(0);
    const EncodedSentence enc = encode_sentence(model.vocab, sentence, EncodeMode::infer, unused);
    const std::vector<int> ids = predict(model, enc);
    std::vector<std::string> labels;
    labels.reserve(ids.size());
    for (int id : ids) labels.push_back(model.vocab.label_by_id[static_cast<std::size_t>(id)]);
    return labels;
}

LabelSeqs predict_corpus(const NerModel& model, const Corpus& corpus) {
    LabelSeqs out;
    for (const auto& doc : corpus.documents)
        for (const auto& sentence : doc.sentences) out.push_back(predict_labels(model, sentence));
    return out;
}

std::string TrainingReport::to_text() const {
    std::ostringstream out;
    char buf[128];
    for (const auto& e : epochs) {
        std::snprintf(buf, sizeof(buf), "epoch %d: train_loss = %.6f, dev_f1 = %.6f\n", e.epoch,
                      e.train_loss, e.dev_f1);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "best_epoch = %d\nbest_dev_f1 = %.6f\nstop_reason = %s\n",
                  best_epoch, best_dev_f1, stop_reason.c_str());
    out << buf;
    return out.str();
}

TrainingReport fit(NerModel& model, const Corpus& train, const Corpus& dev, SeededRng& rng,
                   const DevMetric& dev_metric) {
    require(!train.documents.empty() && train.num_sentences() > 0, "fit: empty train set");
    require(!dev.documents.empty() && dev.num_sentences() > 0, "fit: empty dev set");
    model.hp.validate();

    DevMetric metric = dev_metric;
    if (!metric) {
        metric = [](const NerModel& m, const Corpus& d) {
            return entity_prf(corpus_labels(d), predict_corpus(m, d)).f1;
        };
    }

    std::vector<const Sentence*> sentences;
    for (const auto& doc : train.documents)
        for (const auto& s : doc.sentences) sentences.push_back(&s);

    TrainingReport report;
    ModelParams best_params = model.params;
    double best_f1 = -1.0;
    int best_epoch = 0;

    ModelGrads grads;
    for (int epoch = 1; epoch <= model.hp.max_epochs; ++epoch) {
        std::vector<std::size_t> order(sentences.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        SeededRng shuffle_rng = rng.fork("shuffle/epoch=" + std::to_string(epoch));
        shuffle_rng.shuffle(order);

        double total_loss = 0.0;
        for (std::size_t idx : order) {
            const std::string tag = "epoch=" + std::to_string(epoch) + "/sent=" + std::to_string(idx);
            SeededRng enc_rng = rng.fork("encode/" + tag);
            const EncodedSentence enc =
                encode_sentence(model.vocab, *sentences[idx], EncodeMode::train, enc_rng);
            SeededRng drop_rng = rng.fork("dropout/" + tag);
            total_loss += loss_and_grads(model, enc, enc.label_ids, drop_rng, grads);
            sgd_step(model, grads, model.hp.learning_rate);
        }

        const double dev_f1 = metric(model, dev);
        report.epochs.push_back(
            {epoch, total_loss / static_cast<double>(sentences.size()), dev_f1});

        if (dev_f1 > best_f1) {  // strict: F1 ties keep the earlier epoch
            best_f1 = dev_f1;
            best_epoch = epoch;
            best_params = model.params;
        }
        if (epoch - best_epoch >= model.hp.patience) {
            report.stop_reason = "patience";
            break;
        }
    }
    if (report.stop_reason.empty()) report.stop_reason = "max_epochs";

    model.params = std::move(best_params);
    report.best_epoch = best_epoch;
    report.best_dev_f1 = best_f1;
    return report;
}

}  // namespace nertl
