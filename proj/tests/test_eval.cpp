#include <doctest.h>

#include "nertl/eval.hpp"
#include "nertl/rng.hpp"

using namespace nertl;

TEST_SUITE_BEGIN("eval");

namespace {

std::vector<std::string> labels(std::initializer_list<const char*> xs) {
    return {xs.begin(), xs.end()};
}

// Random label sequence over a small type set.
std::vector<std::string> random_labels(std::size_t len, SeededRng& rng) {
    static const char* tags[] = {"O",      "B-NAME", "I-NAME", "B-DATE",
                                 "I-DATE", "B-ID",   "I-ID"};
    std::vector<std::string> out;
    for (std::size_t t = 0; t < len; ++t) out.push_back(tags[rng.uniform_index(7)]);
    return out;
}

// Span extraction written independently for the recount oracle: scans for
// boundaries instead of streaming open/close state.
std::vector<EntitySpan> oracle_spans(const std::vector<std::string>& ls) {
    // First repair orphan/type-changing I- to B-.
    std::vector<std::string> fixed = ls;
    for (std::size_t t = 0; t < fixed.size(); ++t) {
        if (fixed[t].size() > 1 && fixed[t][0] == 'I') {
            const bool ok = t > 0 && fixed[t - 1] != "O" &&
                            fixed[t - 1].substr(2) == fixed[t].substr(2);
            if (!ok) fixed[t][0] = 'B';
        }
    }
    std::vector<EntitySpan> spans;
    for (std::size_t t = 0; t < fixed.size(); ++t) {
        if (fixed[t][0] != 'B') continue;
        std::size_t end = t + 1;
        while (end < fixed.size() && fixed[end][0] == 'I' &&
               fixed[end].substr(2) == fixed[t].substr(2))
            ++end;
        spans.push_back({fixed[t].substr(2), t, end});
    }
    return spans;
}

PrfScores oracle_entity_prf(const LabelSeqs& gold, const LabelSeqs& pred) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto gs = oracle_spans(gold[i]);
        const auto ps = oracle_spans(pred[i]);
        for (const auto& p : ps) {
            if (std::find(gs.begin(), gs.end(), p) != gs.end()) ++tp;
            else ++fp;
        }
        for (const auto& g : gs)
            if (std::find(ps.begin(), ps.end(), g) == ps.end()) ++fn;
    }
    return make_prf(tp, fp, fn);
}

}  // namespace

TEST_CASE("extract_spans basics") {
    const auto a = extract_spans(labels({"O", "B-NAME", "I-NAME", "O"}));
    REQUIRE(a.size() == 1);
    CHECK(a[0] == EntitySpan{"NAME", 1, 3});

    // Orphan I- repaired to B-.
    const auto b = extract_spans(labels({"I-DATE", "O"}));
    REQUIRE(b.size() == 1);
    CHECK(b[0] == EntitySpan{"DATE", 0, 1});

    // Type change forces a new span.
    const auto c = extract_spans(labels({"B-NAME", "I-DATE"}));
    REQUIRE(c.size() == 2);
    CHECK(c[0] == EntitySpan{"NAME", 0, 1});
    CHECK(c[1] == EntitySpan{"DATE", 1, 2});
}

TEST_CASE("extract_spans output is sorted, disjoint and covers non-O positions") {
    SeededRng rng(51);
    for (int trial = 0; trial < 200; ++trial) {
        const auto ls = random_labels(1 + rng.uniform_index(12), rng);
        const auto spans = extract_spans(ls);
        std::vector<bool> covered(ls.size(), false);
        std::size_t prev_end = 0;
        for (const auto& span : spans) {
            REQUIRE(span.start < span.end);
            REQUIRE(span.start >= prev_end);  // sorted and non-overlapping
            prev_end = span.end;
            for (std::size_t t = span.start; t < span.end; ++t) covered[t] = true;
        }
        for (std::size_t t = 0; t < ls.size(); ++t) REQUIRE(covered[t] == (ls[t] != "O"));
    }
}

TEST_CASE("entity_prf hand cases") {
    const LabelSeqs gold{labels({"B-NAME", "O", "B-DATE", "I-DATE"})};

    SUBCASE("exact match") {
        const auto s = entity_prf(gold, gold);
        CHECK(s.precision == 1.0);
        CHECK(s.recall == 1.0);
        CHECK(s.f1 == 1.0);
    }
    SUBCASE("one hit one miss one spurious") {
        const LabelSeqs pred{labels({"B-NAME", "O", "O", "B-ID"})};
        const auto s = entity_prf(gold, pred);
        CHECK(s.true_positives == 1);
        CHECK(s.false_positives == 1);
        CHECK(s.false_negatives == 1);
        CHECK(s.precision == 0.5);
        CHECK(s.recall == 0.5);
        CHECK(s.f1 == 0.5);
    }
    SUBCASE("empty prediction") {
        const LabelSeqs pred{labels({"O", "O", "O", "O"})};
        CHECK(entity_prf(gold, pred).f1 == 0.0);
    }
    SUBCASE("all O vs all O is the 0/0 convention") {
        const LabelSeqs o{labels({"O", "O"})};
        const auto s = entity_prf(o, o);
        CHECK(s.f1 == 0.0);
        CHECK(s.precision == 0.0);
    }
    SUBCASE("alignment mismatch throws") {
        const LabelSeqs pred{labels({"O", "O"})};
        CHECK_THROWS_AS(entity_prf(gold, pred), ContractError);
    }
    SUBCASE("boundary error is both a false positive and a false negative") {
        const LabelSeqs pred{labels({"B-NAME", "O", "B-DATE", "O"})};
        const auto s = entity_prf(gold, pred);
        CHECK(s.true_positives == 1);
        CHECK(s.false_positives == 1);
        CHECK(s.false_negatives == 1);
    }
}

TEST_CASE("binary_phi_prf collapses types") {
    const LabelSeqs gold{labels({"B-NAME", "O"})};
    const LabelSeqs pred{labels({"B-DATE", "O"})};
    CHECK(binary_phi_prf(gold, pred).f1 == 1.0);
    CHECK(entity_prf(gold, pred).f1 == 0.0);

    const LabelSeqs o{labels({"O", "O", "O"})};
    const auto zero = binary_phi_prf(o, o);
    CHECK(zero.true_positives == 0);
    CHECK(zero.false_positives == 0);
    CHECK(zero.false_negatives == 0);
    CHECK(zero.f1 == 0.0);
}

TEST_CASE("binary_phi_prf is invariant under PHI type relabeling") {
    SeededRng rng(52);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t len = 1 + rng.uniform_index(20);
        LabelSeqs gold{random_labels(len, rng)};
        LabelSeqs pred{random_labels(len, rng)};
        const auto base = binary_phi_prf(gold, pred);

        auto relabel = [](LabelSeqs& seqs) {
            for (auto& s : seqs)
                for (auto& l : s)
                    if (l != "O") l = l.substr(0, 2) + "XTYPE";
        };
        relabel(gold);
        relabel(pred);
        const auto after = binary_phi_prf(gold, pred);
        CHECK(after.true_positives == base.true_positives);
        CHECK(after.false_positives == base.false_positives);
        CHECK(after.false_negatives == base.false_negatives);
    }
}

TEST_CASE("token_accuracy") {
    const LabelSeqs gold{labels({"O", "B-NAME", "O", "O"})};
    CHECK(token_accuracy(gold, gold) == 1.0);
    const LabelSeqs wrong{labels({"B-ID", "O", "B-ID", "B-ID"})};
    CHECK(token_accuracy(gold, wrong) == 0.0);
    const LabelSeqs mostly{labels({"O", "B-NAME", "O", "B-ID"})};
    CHECK(token_accuracy(gold, mostly) == 0.75);
}

TEST_CASE("swapping gold and pred swaps FP and FN") {
    SeededRng rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t len = 1 + rng.uniform_index(15);
        const LabelSeqs a{random_labels(len, rng)};
        const LabelSeqs b{random_labels(len, rng)};
        const auto ab = entity_prf(a, b);
        const auto ba = entity_prf(b, a);
        CHECK(ab.true_positives == ba.true_positives);
        CHECK(ab.false_positives == ba.false_negatives);
        CHECK(ab.false_negatives == ba.false_positives);
    }
}

TEST_CASE("entity and binary scores agree with recount oracles on random pairs") {
    SeededRng rng(54);
    for (int trial = 0; trial < 100; ++trial) {
        LabelSeqs gold, pred;
        const std::size_t n_sent = 1 + rng.uniform_index(4);
        for (std::size_t i = 0; i < n_sent; ++i) {
            const std::size_t len = 1 + rng.uniform_index(25);
            gold.push_back(random_labels(len, rng));
            pred.push_back(random_labels(len, rng));
        }
        const auto fast = entity_prf(gold, pred);
        const auto slow = oracle_entity_prf(gold, pred);
        CHECK(fast.true_positives == slow.true_positives);
        CHECK(fast.false_positives == slow.false_positives);
        CHECK(fast.false_negatives == slow.false_negatives);
        CHECK(fast.f1 == doctest::Approx(slow.f1).epsilon(1e-12));

        // Naive token recount for the binary view.
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < gold.size(); ++i)
            for (std::size_t t = 0; t < gold[i].size(); ++t) {
                const bool g = gold[i][t] != "O", p = pred[i][t] != "O";
                tp += g && p;
                fp += !g && p;
                fn += g && !p;
            }
        const auto binary = binary_phi_prf(gold, pred);
        CHECK(binary.true_positives == tp);
        CHECK(binary.false_positives == fp);
        CHECK(binary.false_negatives == fn);
    }
}

TEST_SUITE_END();
