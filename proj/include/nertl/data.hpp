#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nertl/error.hpp"
#include "nertl/rng.hpp"

namespace nertl {

// One token with its BIO tag, e.g. {"John", "B-NAME"}.
struct TokenAnn {
    std::string surface;
    std::string label;

    bool operator==(const TokenAnn&) const = default;
};

using Sentence = std::vector<TokenAnn>;

struct Document {
    std::string note_id;
    std::vector<Sentence> sentences;

    bool operator==(const Document&) const = default;
};

struct Corpus {
    std::vector<Document> documents;
    std::vector<std::string> label_inventory;  // sorted, includes "O"

    std::size_t num_sentences() const;
    std::size_t num_tokens() const;

    bool operator==(const Corpus&) const = default;
};

// True for "O" or "B-TYPE"/"I-TYPE" with TYPE in [A-Z_]+.
bool is_valid_bio_label(const std::string& label);

// Rebuilds the sorted label inventory from the documents.
void rebuild_label_inventory(Corpus& corpus);

// Token/char/label id maps. PAD=0 and UNK=1 for tokens and chars; the label
// map has no UNK (an unseen test label is an error).
struct Vocabulary {
    static constexpr int pad_id = 0;
    static constexpr int unk_id = 1;

    std::vector<std::string> token_by_id;  // [0]="<PAD>", [1]="<UNK>"
    std::unordered_map<std::string, int> token_to_id;
    std::vector<uint32_t> char_by_id;  // Unicode scalar values; 0 and 1 reserved
    std::unordered_map<uint32_t, int> char_to_id;
    std::vector<std::string> label_by_id;
    std::unordered_map<std::string, int> label_to_id;
    std::unordered_set<std::string> singletons;  // train frequency exactly 1
    int min_token_freq = 1;

    std::size_t num_tokens() const { return token_by_id.size(); }
    std::size_t num_chars() const { return char_by_id.size(); }
    std::size_t num_labels() const { return label_by_id.size(); }

    int token_id(const std::string& surface) const;  // UNK if absent
    int char_id(uint32_t codepoint) const;           // UNK if absent
    int label_id(const std::string& label) const;    // throws if absent

    bool operator==(const Vocabulary& other) const;
};

// Tokens below min_token_freq stay out of the map (they encode to UNK).
// Label ids are first-seen order with "O" forced to 0.
Vocabulary build_vocabulary(const Corpus& train, int min_token_freq);

struct EncodedSentence {
    std::vector<int> token_ids;
    std::vector<std::vector<int>> char_ids;  // per token, nonempty
    std::vector<int> label_ids;              // empty when labels are absent
};

enum class EncodeMode { train, infer };

// In train mode every singleton token is replaced by UNK with probability
// 0.5 so the UNK embedding gets trained; infer mode never draws from rng.
EncodedSentence encode_sentence(const Vocabulary& vocab, const Sentence& sentence, EncodeMode mode,
                                SeededRng& rng);

// Table-1-style corpus summary. A PHI instance is a maximal span of one
// B- tag plus following I- tags of the same type; an orphan I- opens a new
// instance (same repair rule as evaluation).
struct CorpusStats {
    std::size_t vocabulary_size = 0;  // distinct token surfaces
    std::size_t num_notes = 0;
    std::size_t num_tokens = 0;
    std::size_t num_phi_instances = 0;
    std::size_t num_phi_tokens = 0;

    bool operator==(const CorpusStats&) const = default;
};

CorpusStats corpus_stats(const Corpus& corpus);

std::string corpus_stats_to_text(const CorpusStats& stats);

// Column interchange format: one "surface<SPACE>label" per line, blank line
// ends a sentence, a "-DOCSTART- O" line begins a new document. Note ids are
// not part of the format; readers assign sequential ids ("note-0000", ...).
Corpus parse_column_text(const std::string& text, const std::string& origin = "<string>");
std::string to_column_text(const Corpus& corpus);
Corpus read_column_file(const std::filesystem::path& path);
void write_column_file(const Corpus& corpus, const std::filesystem::path& path);

// Seeded nested subsample of the official train split. `fraction` is
// expressed against the whole dataset (train split = 60% of it), so fraction
// f keeps ceil(f/0.6 * N) of the split's N documents; f must be in (0, 0.6].
// Same seed => the kept sets are nested across fractions.
Corpus subsample_train(const Corpus& train_split, double fraction, uint64_t seed);

// UTF-8 <-> Unicode scalar values. Malformed input throws ParseError.
std::vector<uint32_t> utf8_decode(const std::string& text);
std::string utf8_encode(std::span<const uint32_t> codepoints);

}  // namespace nertl
