#include "nertl/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nertl {

namespace {

constexpr const char* kDocStart = "-DOCSTART-";

std::string make_note_id(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "note-%04zu", index);
    return buf;
}

}  // namespace

std::size_t Corpus::num_sentences() const {
    std::size_t n = 0;
    for (const auto& doc : documents) n += doc.sentences.size();
    return n;
}

std::size_t Corpus::num_tokens() const {
    std::size_t n = 0;
    for (const auto& doc : documents)
        for (const auto& s : doc.sentences) n += s.size();
    return n;
}

bool is_valid_bio_label(const std::string& label) {
    if (label == "O") return true;
    if (label.size() < 3) return false;
    if (label[0] != 'B' && label[0] != 'I') return false;
    if (label[1] != '-') return false;
    for (std::size_t i = 2; i < label.size(); ++i) {
        const char c = label[i];
        if (!((c >= 'A' && c <= 'Z') || c == '_')) return false;
    }
    return true;
}

void rebuild_label_inventory(Corpus& corpus) {
    std::set<std::string> labels;
    for (const auto& doc : corpus.documents)
        for (const auto& s : doc.sentences)
            for (const auto& tok : s) labels.insert(tok.label);
    corpus.label_inventory.assign(labels.begin(), labels.end());
}

int Vocabulary::token_id(const std::string& surface) const {
    const auto it = token_to_id.find(surface);
    return it == token_to_id.end() ? unk_id : it->second;
}

int Vocabulary::char_id(uint32_t codepoint) const {
    const auto it = char_to_id.find(codepoint);
    return it == char_to_id.end() ? unk_id : it->second;
}

int Vocabulary::label_id(const std::string& label) const {
    const auto it = label_to_id.find(label);
    require(it != label_to_id.end(), "unknown label: " + label);
    return it->second;
}

bool Vocabulary::operator==(const Vocabulary& other) const {
    return token_by_id == other.token_by_id && char_by_id == other.char_by_id &&
           label_by_id == other.label_by_id && singletons == other.singletons &&
           min_token_freq == other.min_token_freq;
}

Vocabulary build_vocabulary(const Corpus& train, int min_token_freq) {
    require(!train.documents.empty(), "build_vocabulary: empty train corpus");
    require(min_token_freq >= 1, "build_vocabulary: min_token_freq must be >= 1");

    Vocabulary v;
    v.min_token_freq = min_token_freq;
    v.token_by_id = {"<PAD>", "<UNK>"};
    v.char_by_id = {0, 0};  // placeholder codepoints for PAD and UNK
    v.token_to_id = {{"<PAD>", Vocabulary::pad_id}, {"<UNK>", Vocabulary::unk_id}};

    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& doc : train.documents)
        for (const auto& s : doc.sentences)
            for (const auto& tok : s) ++freq[tok.surface];

    // Second pass assigns ids in first-seen order so construction is
    // deterministic across platforms.
    v.label_by_id.push_back("O");
    v.label_to_id["O"] = 0;
    for (const auto& doc : train.documents) {
        for (const auto& s : doc.sentences) {
            for (const auto& tok : s) {
                const std::size_t count = freq.at(tok.surface);
                if (count >= static_cast<std::size_t>(min_token_freq) &&
                    !v.token_to_id.contains(tok.surface)) {
                    v.token_to_id[tok.surface] = static_cast<int>(v.token_by_id.size());
                    v.token_by_id.push_back(tok.surface);
                }
                if (count == 1) v.singletons.insert(tok.surface);
                for (uint32_t cp : utf8_decode(tok.surface)) {
                    if (!v.char_to_id.contains(cp)) {
                        v.char_to_id[cp] = static_cast<int>(v.char_by_id.size());
                        v.char_by_id.push_back(cp);
                    }
                }
                if (!v.label_to_id.contains(tok.label)) {
                    v.label_to_id[tok.label] = static_cast<int>(v.label_by_id.size());
                    v.label_by_id.push_back(tok.label);
                }
            }
        }
    }
    return v;
}

EncodedSentence encode_sentence(const Vocabulary& vocab, const Sentence& sentence, EncodeMode mode,
                                SeededRng& rng) {
    require(!sentence.empty(), "encode_sentence: empty sentence");
    EncodedSentence enc;
    enc.token_ids.reserve(sentence.size());
    enc.char_ids.reserve(sentence.size());

    bool have_labels = true;
    for (const auto& tok : sentence) {
        require(!tok.surface.empty(), "encode_sentence: empty token surface");
        int id = vocab.token_id(tok.surface);
        if (mode == EncodeMode::train && vocab.singletons.contains(tok.surface) &&
            rng.bernoulli(0.5)) {
            id = Vocabulary::unk_id;
        }
        enc.token_ids.push_back(id);

        std::vector<int> chars;
        for (uint32_t cp : utf8_decode(tok.surface)) chars.push_back(vocab.char_id(cp));
        enc.char_ids.push_back(std::move(chars));

        if (tok.label.empty()) have_labels = false;
    }

    if (mode == EncodeMode::train) {
        require(have_labels, "encode_sentence: train mode requires labels on every token");
    }
    if (have_labels) {
        enc.label_ids.reserve(sentence.size());
        for (const auto& tok : sentence) enc.label_ids.push_back(vocab.label_id(tok.label));
    }
    return enc;
}

CorpusStats corpus_stats(const Corpus& corpus) {
    CorpusStats st;
    st.num_notes = corpus.documents.size();
    std::unordered_set<std::string> surfaces;
    for (const auto& doc : corpus.documents) {
        for (const auto& s : doc.sentences) {
            std::string open_type;  // empty = no open span
            for (const auto& tok : s) {
                ++st.num_tokens;
                surfaces.insert(tok.surface);
                const std::string& label = tok.label;
                if (label == "O") {
                    open_type.clear();
                    continue;
                }
                ++st.num_phi_tokens;
                const std::string type = label.substr(2);
                // B- always opens; orphan or type-changing I- is repaired to B-.
                if (label[0] == 'B' || type != open_type) ++st.num_phi_instances;
                open_type = type;
            }
        }
    }
    st.vocabulary_size = surfaces.size();
    return st;
}

std::string corpus_stats_to_text(const CorpusStats& stats) {
    std::ostringstream out;
    out << "vocabulary_size = " << stats.vocabulary_size << "\n";
    out << "num_notes = " << stats.num_notes << "\n";
    out << "num_tokens = " << stats.num_tokens << "\n";
    out << "num_phi_instances = " << stats.num_phi_instances << "\n";
    out << "num_phi_tokens = " << stats.num_phi_tokens << "\n";
    return out.str();
}

Corpus parse_column_text(const std::string& text, const std::string& origin) {
    Corpus corpus;
    Document doc;
    Sentence sentence;
    bool any_content = false;

    auto flush_sentence = [&]() {
        if (!sentence.empty()) {
            doc.sentences.push_back(std::move(sentence));
            sentence.clear();
        }
    };
    auto flush_document = [&]() {
        flush_sentence();
        if (!doc.sentences.empty()) {
            doc.note_id = make_note_id(corpus.documents.size());
            corpus.documents.push_back(std::move(doc));
            doc = Document{};
        }
    };

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush_sentence();
            continue;
        }
        const std::size_t space = line.find(' ');
        if (space == std::string::npos || space == 0 || space + 1 >= line.size())
            throw ParseError(origin + ":" + std::to_string(line_no) +
                             ": expected \"surface label\", got: " + line);
        const std::string surface = line.substr(0, space);
        const std::string label = line.substr(space + 1);
        if (label.find(' ') != std::string::npos)
            throw ParseError(origin + ":" + std::to_string(line_no) + ": extra column in line: " + line);
        if (surface == kDocStart) {
            flush_document();
            any_content = true;
            continue;
        }
        if (!is_valid_bio_label(label))
            throw ParseError(origin + ":" + std::to_string(line_no) + ": bad BIO label: " + label);
        sentence.push_back({surface, label});
        any_content = true;
    }
    flush_document();
    (void)any_content;
    rebuild_label_inventory(corpus);
    return corpus;
}

std::string to_column_text(const Corpus& corpus) {
    std::ostringstream out;
    for (const auto& doc : corpus.documents) {
        out << kDocStart << " O\n\n";
        for (const auto& s : doc.sentences) {
            for (const auto& tok : s) out << tok.surface << ' ' << tok.label << '\n';
            out << '\n';
        }
    }
    return out.str();
}

Corpus read_column_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_column_text(buf.str(), path.string());
}

void write_column_file(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write corpus file: " + path.string());
    out << to_column_text(corpus);
    if (!out) throw IoError("write failed: " + path.string());
}

Corpus subsample_train(const Corpus& train_split, double fraction, uint64_t seed) {
    require(fraction > 0.0, "subsample_train: fraction must be positive");
    require(fraction <= 0.6 + 1e-12, "subsample_train: fraction exceeds the 0.6 train share");
    const std::size_t n = train_split.documents.size();
    require(n > 0, "subsample_train: empty train split");

    // fraction is measured against the whole dataset; the split holds 0.6 of it.
    const double want = fraction * static_cast<double>(n) / 0.6;
    std::size_t count = static_cast<std::size_t>(std::ceil(want - 1e-9));
    count = std::min(std::max<std::size_t>(count, 1), n);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    SeededRng rng = SeededRng(seed).fork("subsample");
    rng.shuffle(order);
    order.resize(count);
    std::sort(order.begin(), order.end());  // keep original document order

    Corpus out;
    for (std::size_t idx : order) out.documents.push_back(train_split.documents[idx]);
    rebuild_label_inventory(out);
    return out;
}

std::vector<uint32_t> utf8_decode(const std::string& text) {
    std::vector<uint32_t> out;
    const auto* s = reinterpret_cast<const unsigned char*>(text.data());
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        const unsigned char c = s[i];
        uint32_t cp = 0;
        std::size_t len = 0;
        if (c < 0x80) {
            cp = c;
            len = 1;
        } else if ((c >> 5) == 0x6) {
            cp = c & 0x1f;
            len = 2;
        } else if ((c >> 4) == 0xe) {
            cp = c & 0x0f;
            len = 3;
        } else if ((c >> 3) == 0x1e) {
            cp = c & 0x07;
            len = 4;
        } else {
            throw ParseError("invalid UTF-8 lead byte");
        }
        if (i + len > n) throw ParseError("truncated UTF-8 sequence");
        for (std::size_t k = 1; k < len; ++k) {
            if ((s[i + k] >> 6) != 0x2) throw ParseError("invalid UTF-8 continuation byte");
            cp = (cp << 6) | (s[i + k] & 0x3f);
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string utf8_encode(std::span<const uint32_t> codepoints) {
    std::string out;
    for (uint32_t cp : codepoints) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        } else {
            out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        }
    }
    return out;
}

}  // namespace nertl
