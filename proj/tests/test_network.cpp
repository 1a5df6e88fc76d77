#include <doctest.h>

#include "gradcheck.hpp"
#include "nertl/network.hpp"

using namespace nertl;

TEST_SUITE_BEGIN("network");

namespace {

Corpus toy_corpus() {
    return parse_column_text(
        "ona B-NAME\nvisited O\nmercy B-HOSP\nward I-HOSP\n\n"
        "rex B-NAME\ncalled O\nona B-NAME\n\n"
        "visited O\nward O\n\n"
        "rex B-NAME\nvisited O\nmercy B-HOSP\n\n");
}

Hyperparameters small_hp(bool bidirectional = true) {
    Hyperparameters hp;
    hp.token_emb_dim = 2;
    hp.char_emb_dim = 2;
    hp.char_lstm_hidden = 2;
    hp.token_lstm_hidden = 2;
    hp.dropout_rate = 0.0;
    hp.learning_rate = 0.1;
    hp.max_epochs = 3;
    hp.patience = 2;
    hp.bidirectional = bidirectional;
    return hp;
}

NerModel small_random_model(uint64_t seed, bool bidirectional = true) {
    SeededRng rng(seed);
    SeededRng init_rng = rng.fork("init");
    return NerModel::init(build_vocabulary(toy_corpus(), 1), small_hp(bidirectional), init_rng);
}

EncodedSentence encode_infer(const NerModel& m, const Sentence& s) {
    SeededRng rng(0);
    return encode_sentence(m.vocab, s, EncodeMode::infer, rng);
}

double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("zero network yields a zero lattice") {
    NerModel m = small_random_model(1);
    m.params = ModelParams::make(m.hp, m.vocab.num_tokens(), m.vocab.num_chars(),
                                 m.vocab.num_labels());
    SeededRng rng(0);
    const Sentence s{{"ona", ""}, {"visited", ""}};
    const EmissionLattice lattice =
        network_forward(m, encode_infer(m, s), RunMode::infer, rng);
    for (double x : lattice.a) CHECK(x == 0.0);
}

TEST_CASE("with dropout disabled, train and infer lattices coincide") {
    NerModel m = small_random_model(2);
    const Sentence s{{"rex", ""}, {"called", ""}, {"ona", ""}};
    const EncodedSentence enc = encode_infer(m, s);
    SeededRng r1(7), r2(7);
    const EmissionLattice train_lat = network_forward(m, enc, RunMode::train, r1);
    const EmissionLattice infer_lat = network_forward(m, enc, RunMode::infer, r2);
    CHECK(train_lat == infer_lat);
}

TEST_CASE("empty sentence is a contract violation") {
    NerModel m = small_random_model(3);
    SeededRng rng(0);
    EncodedSentence empty;
    CHECK_THROWS_AS(network_forward(m, empty, RunMode::infer, rng), ContractError);
}

TEST_CASE("one-token lattice matches a scalar composition oracle") {
    // All dims 1; every weight hand-set. The oracle below recomputes the
    // whole stack with plain scalar formulas.
    const Corpus c = parse_column_text("ab B-X\ncd O\n\n");
    Hyperparameters hp;
    hp.token_emb_dim = 1;
    hp.char_emb_dim = 1;
    hp.char_lstm_hidden = 1;
    hp.token_lstm_hidden = 1;
    hp.dropout_rate = 0.0;
    SeededRng rng(4);
    SeededRng init_rng = rng.fork("init");
    NerModel m = NerModel::init(build_vocabulary(c, 1), hp, init_rng);

    // Hand weights. Char LSTM scalars: w,u,b per gate (input,forget,output,cand).
    const double cf[12] = {0.3, -0.1, 0.05, 0.2, 0.1, -0.2, -0.3, 0.2, 0.1, 0.4, -0.4, 0.15};
    const double cb[12] = {-0.2, 0.3, 0.1, 0.1, -0.1, 0.25, 0.2, -0.15, -0.05, -0.3, 0.1, 0.2};
    auto set_lstm_scalar = [](LstmParams& p, const double* v) {
        p.w_input(0, 0) = v[0];  p.u_input(0, 0) = v[1];  p.b_input[0] = v[2];
        p.w_forget(0, 0) = v[3]; p.u_forget(0, 0) = v[4]; p.b_forget[0] = v[5];
        p.w_output(0, 0) = v[6]; p.u_output(0, 0) = v[7]; p.b_output[0] = v[8];
        p.w_cand(0, 0) = v[9];   p.u_cand(0, 0) = v[10];  p.b_cand[0] = v[11];
    };
    set_lstm_scalar(m.params.char_lstm_fwd, cf);
    set_lstm_scalar(m.params.char_lstm_bwd, cb);

    const double te_ab = 0.7;
    m.params.token_emb.table(static_cast<std::size_t>(m.vocab.token_id("ab")), 0) = te_ab;
    const double ce_a = 0.5, ce_b = -0.6;
    const int id_a = m.vocab.char_id(static_cast<uint32_t>('a'));
    const int id_b = m.vocab.char_id(static_cast<uint32_t>('b'));
    m.params.char_emb.table(static_cast<std::size_t>(id_a), 0) = ce_a;
    m.params.char_emb.table(static_cast<std::size_t>(id_b), 0) = ce_b;

    // Token LSTM: input dim 3 (token emb + 2-dim char summary).
    const double tf_w[4][3] = {{0.2, -0.1, 0.3}, {0.1, 0.2, -0.2}, {-0.3, 0.1, 0.1}, {0.25, -0.2, 0.15}};
    const double tf_u[4] = {0.1, -0.15, 0.2, 0.05};
    const double tf_b[4] = {0.02, 0.9, -0.1, 0.04};
    const double tb_w[4][3] = {{-0.2, 0.15, 0.1}, {0.2, -0.1, 0.05}, {0.1, 0.1, -0.2}, {-0.15, 0.2, 0.1}};
    const double tb_u[4] = {-0.1, 0.1, 0.15, -0.05};
    const double tb_b[4] = {0.05, 1.1, 0.02, -0.03};
    auto set_token_lstm = [](LstmParams& p, const double w[4][3], const double* u, const double* b) {
        Mat* ws[4] = {&p.w_input, &p.w_forget, &p.w_output, &p.w_cand};
        Mat* us[4] = {&p.u_input, &p.u_forget, &p.u_output, &p.u_cand};
        Vec* bs[4] = {&p.b_input, &p.b_forget, &p.b_output, &p.b_cand};
        for (int g = 0; g < 4; ++g) {
            for (int j = 0; j < 3; ++j) (*ws[g])(0, static_cast<std::size_t>(j)) = w[g][j];
            (*us[g])(0, 0) = u[g];
            (*bs[g])[0] = b[g];
        }
    };
    set_token_lstm(m.params.token_lstm_fwd, tf_w, tf_u, tf_b);
    set_token_lstm(m.params.token_lstm_bwd, tb_w, tb_u, tb_b);

    const double dw[2][2] = {{0.6, -0.4}, {-0.5, 0.8}};
    const double db[2] = {0.1, -0.2};
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t j = 0; j < 2; ++j) m.params.dense.w(k, j) = dw[k][j];
        m.params.dense.b[k] = db[k];
    }

    SeededRng fw_rng(0);
    const Sentence s{{"ab", ""}};
    const EmissionLattice lattice = network_forward(m, encode_infer(m, s), RunMode::infer, fw_rng);

    // ---- scalar oracle ----
    auto step = [&](const double* v, double x, double h, double c) {
        const double i = sigm(v[0] * x + v[1] * h + v[2]);
        const double f = sigm(v[3] * x + v[4] * h + v[5]);
        const double o = sigm(v[6] * x + v[7] * h + v[8]);
        const double g = std::tanh(v[9] * x + v[10] * h + v[11]);
        const double c_new = f * c + i * g;
        return std::pair{o * std::tanh(c_new), c_new};
    };
    auto [hf1, cf1] = step(cf, ce_a, 0.0, 0.0);
    auto [hf2, cf2] = step(cf, ce_b, hf1, cf1);
    auto [hb1, cb1] = step(cb, ce_b, 0.0, 0.0);
    auto [hb2, cb2] = step(cb, ce_a, hb1, cb1);
    (void)cf2; (void)cb2;
    const double x0 = te_ab, x1 = hf2, x2 = hb2;

    auto token_step = [&](const double w[4][3], const double* u, const double* b) {
        const double i = sigm(w[0][0] * x0 + w[0][1] * x1 + w[0][2] * x2 + u[0] * 0.0 + b[0]);
        const double o = sigm(w[2][0] * x0 + w[2][1] * x1 + w[2][2] * x2 + u[2] * 0.0 + b[2]);
        const double g = std::tanh(w[3][0] * x0 + w[3][1] * x1 + w[3][2] * x2 + u[3] * 0.0 + b[3]);
        const double c_new = i * g;  // c_prev = 0
        return o * std::tanh(c_new);
    };
    const double hf = token_step(tf_w, tf_u, tf_b);
    const double hb = token_step(tb_w, tb_u, tb_b);

    REQUIRE(lattice.rows == 1);
    REQUIRE(lattice.cols == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        const double expect = dw[k][0] * hf + dw[k][1] * hb + db[k];
        CHECK(lattice(0, k) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("gold-saturated dense bias drives the loss to zero") {
    NerModel m = small_random_model(5);
    m.params = ModelParams::make(m.hp, m.vocab.num_tokens(), m.vocab.num_chars(),
                                 m.vocab.num_labels());
    const int gold_label = 1;
    for (std::size_t k = 0; k < m.num_labels(); ++k)
        m.params.dense.b[k] = k == static_cast<std::size_t>(gold_label) ? 50.0 : -50.0;

    const Sentence s{{"ona", ""}, {"rex", ""}, {"ward", ""}};
    const EncodedSentence enc = encode_infer(m, s);
    const std::vector<int> gold(3, gold_label);
    SeededRng rng(0);
    ModelGrads grads;
    CHECK(loss_and_grads(m, enc, gold, rng, grads) < 1e-6);
    CHECK(predict(m, enc) == gold);
}

TEST_CASE("end-to-end gradients match finite differences for all six groups") {
    for (const bool bidirectional : {true, false}) {
        CAPTURE(bidirectional);
        SeededRng trial_rng(61);
        for (int trial = 0; trial < 4; ++trial) {
            NerModel m = small_random_model(100 + static_cast<uint64_t>(trial),
                                            bidirectional);
            const Sentence s{{"ona", ""}, {"visited", ""}, {"mercy", ""}};  // 3 tokens, K=3
            const EncodedSentence enc = encode_infer(m, s);
            std::vector<int> gold;
            for (int t = 0; t < 3; ++t)
                gold.push_back(static_cast<int>(trial_rng.uniform_index(m.num_labels())));

            SeededRng rng(0);
            ModelGrads grads;
            loss_and_grads(m, enc, gold, rng, grads);

            auto loss_fn = [&]() {
                SeededRng r(0);
                ModelGrads scratch;
                return loss_and_grads(m, enc, gold, r, scratch);
            };

            std::vector<std::span<double>> pviews = m.params.flat_views();
            std::vector<std::span<double>> gviews = grads.flat_views();
            for (std::size_t i = 0; i < pviews.size(); ++i) {
                const double err = max_fd_error(pviews[i], gviews[i], loss_fn);
                CAPTURE(i);
                CHECK(err < 1e-4);
            }
        }
    }
}

TEST_CASE("dropped coordinates receive exactly zero gradient") {
    NerModel m = small_random_model(6);
    m.hp.dropout_rate = 0.5;
    const Sentence s{{"ona", ""}};
    const EncodedSentence enc = encode_infer(m, s);
    const std::vector<int> gold{0};

    // Pick the first seed whose mask keeps some token-embedding coords and
    // drops others, so both branches below are exercised.
    uint64_t seed = 0;
    ForwardCache cache;
    for (seed = 0; seed < 64; ++seed) {
        SeededRng probe = SeededRng(seed).fork("drop");
        network_forward(m, enc, RunMode::train, probe, &cache);
        bool any_zero = false, any_kept = false;
        for (std::size_t k = 0; k < m.hp.token_emb_dim; ++k) {
            if (cache.dropout_masks[0][k] == 0.0) any_zero = true;
            else any_kept = true;
        }
        if (any_zero && any_kept) break;
    }
    REQUIRE(seed < 64);

    SeededRng drop_rng = SeededRng(seed).fork("drop");
    ModelGrads grads;
    loss_and_grads(m, enc, gold, drop_rng, grads);

    // Replay the same stream to recover the mask that was applied.
    SeededRng replay = SeededRng(seed).fork("drop");
    network_forward(m, enc, RunMode::train, replay, &cache);
    REQUIRE(cache.dropout_masks.size() == 1);

    const int row = enc.token_ids[0];
    bool saw_dropped = false, saw_kept = false;
    for (std::size_t k = 0; k < m.hp.token_emb_dim; ++k) {
        if (cache.dropout_masks[0][k] == 0.0) {
            CHECK(grads.token_emb.table(static_cast<std::size_t>(row), k) == 0.0);
            saw_dropped = true;
        } else {
            saw_kept = true;
        }
    }
    // With 2 coords at rate 0.5 this seed exercises both branches.
    CHECK(saw_dropped);
    CHECK(saw_kept);
}

TEST_CASE("sgd_step basics") {
    NerModel m = small_random_model(7);
    const ModelParams before = m.params;
    ModelGrads zero = ModelParams::make(m.hp, m.vocab.num_tokens(), m.vocab.num_chars(),
                                        m.vocab.num_labels());
    sgd_step(m, zero, 0.1);
    CHECK(m.params == before);

    // Scalar update without clipping.
    m.params.dense.w(0, 0) = 1.0;
    ModelGrads g = zero;
    g.dense.w(0, 0) = 2.0;
    m.hp.grad_clip_norm = 100.0;
    sgd_step(m, g, 0.1);
    CHECK(m.params.dense.w(0, 0) == doctest::Approx(0.8).epsilon(1e-15));

    // Joint norm 10 against clip 5 halves the update.
    NerModel m2 = small_random_model(8);
    m2.params = ModelParams::make(m2.hp, m2.vocab.num_tokens(), m2.vocab.num_chars(),
                                  m2.vocab.num_labels());
    ModelGrads g2 = m2.params;
    g2.dense.w(0, 0) = 6.0;
    g2.transitions.scores(0, 0) = 8.0;
    m2.hp.grad_clip_norm = 5.0;
    const double factor = sgd_step(m2, g2, 1.0);
    CHECK(factor == doctest::Approx(0.5));
    CHECK(m2.params.dense.w(0, 0) == doctest::Approx(-3.0));
    CHECK(m2.params.transitions.scores(0, 0) == doctest::Approx(-4.0));
}

TEST_CASE("descent sanity: a small step does not increase the loss") {
    SeededRng seeds(62);
    int failures = 0;
    for (int trial = 0; trial < 50; ++trial) {
        NerModel m = small_random_model(200 + static_cast<uint64_t>(trial));
        m.hp.learning_rate = 1e-3;
        const Sentence s{{"rex", ""}, {"visited", ""}, {"ward", ""}};
        const EncodedSentence enc = encode_infer(m, s);
        std::vector<int> gold;
        for (int t = 0; t < 3; ++t)
            gold.push_back(static_cast<int>(seeds.uniform_index(m.num_labels())));

        SeededRng r(0);
        ModelGrads grads;
        const double before = loss_and_grads(m, enc, gold, r, grads);
        sgd_step(m, grads, m.hp.learning_rate);
        SeededRng r2(0);
        ModelGrads scratch;
        const double after = loss_and_grads(m, enc, gold, r2, scratch);
        if (after > before) ++failures;
    }
    CHECK(failures <= 2);
}

TEST_CASE("predict agrees with exhaustive search over the infer lattice") {
    for (int trial = 0; trial < 10; ++trial) {
        NerModel m = small_random_model(300 + static_cast<uint64_t>(trial));
        const Sentence s{{"ona", ""}, {"ward", ""}, {"rex", ""}, {"called", ""}};
        const EncodedSentence enc = encode_infer(m, s);

        SeededRng rng(0);
        const EmissionLattice lattice = network_forward(m, enc, RunMode::infer, rng);
        std::vector<int> best_path(4, 0);
        double best = -1e300;
        std::vector<int> path(4, 0);
        const int k = static_cast<int>(m.num_labels());
        while (true) {
            const double score = path_score(lattice, m.params.transitions, path);
            if (score > best) {
                best = score;
                best_path = path;
            }
            std::size_t pos = 0;
            while (pos < 4 && ++path[pos] == k) path[pos++] = 0;
            if (pos == 4) break;
        }
        CHECK(predict(m, enc) == best_path);
    }
}

TEST_CASE("predict on a zero model returns label 0 everywhere") {
    NerModel m = small_random_model(9);
    m.params = ModelParams::make(m.hp, m.vocab.num_tokens(), m.vocab.num_chars(),
                                 m.vocab.num_labels());
    const Sentence s{{"ona", ""}, {"visited", ""}, {"ward", ""}};
    CHECK(predict(m, encode_infer(m, s)) == std::vector<int>{0, 0, 0});
    CHECK(predict_labels(m, s) == std::vector<std::string>{"O", "O", "O"});
}

TEST_CASE("fit stops on a forced dev-F1 drop and restores the best epoch") {
    const Corpus train = toy_corpus();
    NerModel m = small_random_model(10);
    m.hp.patience = 1;
    m.hp.max_epochs = 10;

    std::vector<ModelParams> snapshots;
    const std::vector<double> forced{0.5, 0.4, 0.3};
    DevMetric metric = [&](const NerModel& model, const Corpus&) {
        snapshots.push_back(model.params);
        return forced[std::min(snapshots.size() - 1, forced.size() - 1)];
    };

    SeededRng rng(11);
    const TrainingReport report = fit(m, train, train, rng, metric);
    CHECK(report.epochs.size() == 2);  // stops right after the first non-improvement
    CHECK(report.best_epoch == 1);
    CHECK(report.best_dev_f1 == 0.5);
    CHECK(report.stop_reason == "patience");
    CHECK(m.params == snapshots[0]);   // epoch-1 parameters restored
    CHECK_FALSE(m.params == snapshots[1]);
}

TEST_CASE("learning rate zero keeps dev F1 constant until the patience bound") {
    const Corpus train = toy_corpus();
    NerModel m = small_random_model(12);
    m.hp.learning_rate = 0.0;
    m.hp.patience = 3;
    m.hp.max_epochs = 20;

    SeededRng rng(13);
    const TrainingReport report = fit(m, train, train, rng);
    CHECK(report.epochs.size() == 4);  // 1 best epoch + 3 patience epochs
    CHECK(report.stop_reason == "patience");
    CHECK(report.best_epoch == 1);
    for (const auto& e : report.epochs) CHECK(e.dev_f1 == report.epochs[0].dev_f1);
}

TEST_CASE("fit is deterministic given seed and data") {
    const Corpus train = toy_corpus();
    auto run = [&]() {
        NerModel m = small_random_model(14);
        m.hp.max_epochs = 4;
        m.hp.dropout_rate = 0.3;
        SeededRng rng(15);
        const TrainingReport r = fit(m, train, train, rng);
        return std::pair{m.params, r};
    };
    const auto [params_a, report_a] = run();
    const auto [params_b, report_b] = run();
    CHECK(params_a == params_b);
    REQUIRE(report_a.epochs.size() == report_b.epochs.size());
    for (std::size_t i = 0; i < report_a.epochs.size(); ++i) {
        CHECK(report_a.epochs[i].train_loss == report_b.epochs[i].train_loss);
        CHECK(report_a.epochs[i].dev_f1 == report_b.epochs[i].dev_f1);
    }
}

TEST_CASE("returned model attains the report's best dev F1") {
    const Corpus data = toy_corpus();
    NerModel m = small_random_model(16);
    m.hp.max_epochs = 6;
    m.hp.patience = 6;
    SeededRng rng(17);
    const TrainingReport report = fit(m, data, data, rng);

    double max_f1 = 0.0;
    for (const auto& e : report.epochs) max_f1 = std::max(max_f1, e.dev_f1);
    CHECK(report.best_dev_f1 == max_f1);
    const double actual = entity_prf(corpus_labels(data), predict_corpus(m, data)).f1;
    CHECK(actual == doctest::Approx(report.best_dev_f1).epsilon(1e-12));
}

TEST_CASE("predict is rng-independent (inverted dropout is an inference no-op)") {
    NerModel m = small_random_model(18);
    m.hp.dropout_rate = 0.7;
    const Sentence s{{"mercy", ""}, {"ward", ""}};
    const EncodedSentence enc = encode_infer(m, s);
    const auto first = predict(m, enc);
    for (int i = 0; i < 5; ++i) CHECK(predict(m, enc) == first);
}

TEST_SUITE_END();
