#include <doctest.h>

#include <set>

#include "nertl/data.hpp"
#include "nertl/synth.hpp"

using namespace nertl;

TEST_SUITE_BEGIN("data");

TEST_CASE("column parser handles a minimal file") {
    const Corpus c = parse_column_text("John B-NAME\nsmiled O\n\n");
    REQUIRE(c.documents.size() == 1);
    REQUIRE(c.documents[0].sentences.size() == 1);
    const Sentence& s = c.documents[0].sentences[0];
    REQUIRE(s.size() == 2);
    CHECK(s[0] == TokenAnn{"John", "B-NAME"});
    CHECK(s[1] == TokenAnn{"smiled", "O"});
    CHECK(c.label_inventory == std::vector<std::string>{"B-NAME", "O"});
}

TEST_CASE("column parser reports malformed lines with their line number") {
    try {
        parse_column_text("John\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_column_text("a O\nb NOT_A_TAG\n"), ParseError);
    CHECK_THROWS_AS(parse_column_text("a O extra\n"), ParseError);
}

TEST_CASE("empty file gives an empty corpus") {
    CHECK(parse_column_text("").documents.empty());
}

TEST_CASE("docstart lines split documents") {
    const Corpus c = parse_column_text(
        "-DOCSTART- O\n\na O\n\n-DOCSTART- O\n\nb O\nc B-DATE\n\n");
    REQUIRE(c.documents.size() == 2);
    CHECK(c.documents[0].sentences.size() == 1);
    CHECK(c.documents[1].sentences[0].size() == 2);
    CHECK(c.documents[0].note_id == "note-0000");
    CHECK(c.documents[1].note_id == "note-0001");
}

TEST_CASE("write/read round trip is a fixpoint") {
    SynthSpec spec = SynthSpec::defaults();
    spec.source_notes = 100;
    spec.target_notes = 10;
    spec.seed = 99;
    const SyntheticData data = generate_synthetic(spec);
    const Corpus& corpus = data.source.train;

    const std::string text1 = to_column_text(corpus);
    const Corpus reread = parse_column_text(text1);
    CHECK(reread == corpus);
    CHECK(to_column_text(reread) == text1);
}

TEST_CASE("build_vocabulary basics") {
    const Corpus c = parse_column_text("a O\nb O\na O\n\n");
    const Vocabulary v1 = build_vocabulary(c, 1);
    CHECK(v1.num_tokens() == 4);  // PAD, UNK, a, b
    CHECK(v1.token_id("a") == 2);
    CHECK(v1.token_id("b") == 3);
    CHECK(v1.singletons == std::unordered_set<std::string>{"b"});

    const Vocabulary v2 = build_vocabulary(c, 2);
    CHECK(v2.num_tokens() == 3);  // b is below min_freq
    CHECK(v2.token_id("b") == Vocabulary::unk_id);

    CHECK(v1.label_by_id[0] == "O");
    CHECK(v1.label_id("O") == 0);
    CHECK_THROWS_AS(v1.label_id("B-NAME"), ContractError);
}

TEST_CASE("vocabulary size equals distinct frequent tokens plus two") {
    SynthSpec spec = SynthSpec::defaults();
    spec.source_notes = 250;  // about 1000 sentences in the train split
    spec.seed = 3;
    const Corpus corpus = generate_synthetic(spec).source.train;

    for (int min_freq : {1, 2, 3}) {
        std::unordered_map<std::string, int> freq;
        for (const auto& doc : corpus.documents)
            for (const auto& s : doc.sentences)
                for (const auto& tok : s) ++freq[tok.surface];
        std::size_t expect = 2;
        for (const auto& [surface, count] : freq)
            if (count >= min_freq) ++expect;
        CHECK(build_vocabulary(corpus, min_freq).num_tokens() == expect);
    }
}

TEST_CASE("encode_sentence maps ids and handles unknowns") {
    const Corpus c = parse_column_text("alpha B-NAME\nbeta O\nalpha O\n\n");
    const Vocabulary v = build_vocabulary(c, 1);
    SeededRng rng(1);

    const Sentence s{{"alpha", "O"}, {"zzz", "O"}};
    const EncodedSentence enc = encode_sentence(v, s, EncodeMode::infer, rng);
    CHECK(enc.token_ids[0] == v.token_id("alpha"));
    CHECK(enc.token_ids[1] == Vocabulary::unk_id);
    CHECK(enc.char_ids[0].size() == 5);
    CHECK(enc.label_ids == std::vector<int>{0, 0});

    // Unseen characters encode to the UNK char id.
    const Sentence weird{{"\xc3\xa9", "O"}};  // e-acute, not in the corpus
    const EncodedSentence enc2 = encode_sentence(v, weird, EncodeMode::infer, rng);
    CHECK(enc2.char_ids[0] == std::vector<int>{Vocabulary::unk_id});

    // Train mode requires known labels.
    const Sentence bad{{"alpha", "B-DATE"}};
    CHECK_THROWS_AS(encode_sentence(v, bad, EncodeMode::train, rng), ContractError);
}

TEST_CASE("singleton tokens are replaced by UNK half the time in train mode") {
    const Corpus c = parse_column_text("once B-NAME\ncommon O\ncommon O\n\n");
    const Vocabulary v = build_vocabulary(c, 1);
    REQUIRE(v.singletons.contains("once"));

    const Sentence s{{"once", "O"}, {"common", "O"}};
    SeededRng master(7);
    int unk_count = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        SeededRng rng = master.fork("trial" + std::to_string(i));
        const EncodedSentence enc = encode_sentence(v, s, EncodeMode::train, rng);
        if (enc.token_ids[0] == Vocabulary::unk_id) ++unk_count;
        CHECK(enc.token_ids[1] == v.token_id("common"));  // non-singleton untouched
    }
    const double rate = static_cast<double>(unk_count) / trials;
    CHECK(rate > 0.48);
    CHECK(rate < 0.52);
}

TEST_CASE("corpus_stats hand cases") {
    const CorpusStats s1 = corpus_stats(parse_column_text("John B-NAME\nsmiled O\n\n"));
    CHECK(s1.num_tokens == 2);
    CHECK(s1.num_phi_instances == 1);
    CHECK(s1.num_phi_tokens == 1);
    CHECK(s1.num_notes == 1);
    CHECK(s1.vocabulary_size == 2);

    const CorpusStats s2 = corpus_stats(parse_column_text("John B-NAME\nSmith I-NAME\n\n"));
    CHECK(s2.num_phi_instances == 1);
    CHECK(s2.num_phi_tokens == 2);

    // Orphan I- opens a new instance (repair rule).
    const CorpusStats s3 = corpus_stats(parse_column_text("x I-DATE\ny O\n\n"));
    CHECK(s3.num_phi_instances == 1);
    CHECK(s3.num_phi_tokens == 1);
}

TEST_CASE("corpus_stats agrees with a naive recount on generated corpora") {
    SynthSpec spec = SynthSpec::defaults();
    spec.source_notes = 50;
    spec.seed = 11;
    const Corpus corpus = generate_synthetic(spec).source.train;
    const CorpusStats st = corpus_stats(corpus);

    std::size_t tokens = 0, phi_tokens = 0, instances = 0;
    std::set<std::string> vocab;
    for (const auto& doc : corpus.documents) {
        for (const auto& s : doc.sentences) {
            for (std::size_t t = 0; t < s.size(); ++t) {
                ++tokens;
                vocab.insert(s[t].surface);
                if (s[t].label == "O") continue;
                ++phi_tokens;
                const bool opener = s[t].label[0] == 'B';
                const bool continues = t > 0 && s[t - 1].label != "O" &&
                                       s[t - 1].label.substr(2) == s[t].label.substr(2);
                if (opener || !continues) ++instances;
            }
        }
    }
    CHECK(st.num_tokens == tokens);
    CHECK(st.num_phi_tokens == phi_tokens);
    CHECK(st.num_phi_instances == instances);
    CHECK(st.vocabulary_size == vocab.size());
    CHECK(st.num_phi_tokens >= st.num_phi_instances);
    CHECK(st.num_tokens >= st.num_phi_tokens);
}

TEST_CASE("subsample_train counts follow the whole-dataset convention") {
    SynthSpec spec = SynthSpec::defaults();
    spec.target_notes = 100;
    spec.seed = 5;
    const SplitCorpus target = generate_synthetic(spec).target;
    REQUIRE(target.train.documents.size() == 60);

    CHECK(subsample_train(target.train, 0.6, 1).documents.size() == 60);
    CHECK(subsample_train(target.train, 0.05, 1).documents.size() == 5);
    CHECK(subsample_train(target.train, 0.10, 1).documents.size() == 10);
    CHECK(subsample_train(target.train, 0.01, 1).documents.size() == 1);
    CHECK_THROWS_AS(subsample_train(target.train, 0.7, 1), ContractError);
    CHECK_THROWS_AS(subsample_train(target.train, 0.0, 1), ContractError);
}

TEST_CASE("subsampling is deterministic and nested across fractions") {
    SynthSpec spec = SynthSpec::defaults();
    spec.target_notes = 100;
    spec.seed = 6;
    const SplitCorpus target = generate_synthetic(spec).target;

    const Corpus a = subsample_train(target.train, 0.2, 42);
    const Corpus b = subsample_train(target.train, 0.2, 42);
    CHECK(a == b);

    auto ids = [](const Corpus& c) {
        std::set<std::string> out;
        for (const auto& d : c.documents) out.insert(d.note_id);
        return out;
    };
    const auto small = ids(subsample_train(target.train, 0.05, 42));
    const auto medium = ids(subsample_train(target.train, 0.2, 42));
    const auto large = ids(subsample_train(target.train, 0.6, 42));
    CHECK(std::includes(medium.begin(), medium.end(), small.begin(), small.end()));
    CHECK(std::includes(large.begin(), large.end(), medium.begin(), medium.end()));
}

TEST_CASE("utf8 round trip") {
    const std::string text = "a\xc3\xa9\xe2\x82\xac";  // a, e-acute, euro sign
    const auto cps = utf8_decode(text);
    REQUIRE(cps.size() == 3);
    CHECK(cps[0] == 'a');
    CHECK(cps[1] == 0xe9);
    CHECK(cps[2] == 0x20ac);
    CHECK(utf8_encode(cps) == text);
    CHECK_THROWS_AS(utf8_decode("\xff"), ParseError);
    CHECK_THROWS_AS(utf8_decode("\xc3"), ParseError);
}

TEST_SUITE_END();
