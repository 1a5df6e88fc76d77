#pragma once

#include "nertl/config.hpp"
#include "nertl/data.hpp"

namespace nertl {

// One PHI lexicon: entries are token sequences ("Mara Quillen" is two
// tokens, tagged B-NAME I-NAME when filled into a slot).
struct PhiLexicon {
    std::string type;
    std::vector<std::vector<std::string>> entries;
};

// Synthetic de-identification benchmark spec. The target corpus reuses the
// source pools except that a lexical_shift fraction of lexicon entries and
// templates is resampled from replacement pools; primary and replacement
// pools are disjoint by construction, so lexical_shift = 1 yields disjoint
// PHI fillers.
struct SynthSpec {
    uint64_t seed = 1;
    int source_notes = 300;
    int target_notes = 100;
    int sentences_min = 3;
    int sentences_max = 6;
    double lexical_shift = 0.3;

    std::vector<PhiLexicon> lexicons;              // primary pools
    std::vector<PhiLexicon> replacement_lexicons;  // disjoint from primary
    std::vector<std::string> templates;            // tokens with {TYPE} slots
    std::vector<std::string> replacement_templates;

    // Built-in pools for the default PHI inventory
    // (NAME, DATE, PHONE, ID, ADDRESS, HOSPITAL, AGE).
    static SynthSpec defaults();

    void validate() const;
};

struct SplitCorpus {
    Corpus train, dev, test;
};

struct SyntheticData {
    SplitCorpus source, target;
};

// Deterministic given spec.seed. Splits are 60/20/20 over notes, disjoint.
SyntheticData generate_synthetic(const SynthSpec& spec);

// Applies config keys over the defaults: seed, num_notes (sets both sides),
// source_notes, target_notes, sentences_min, sentences_max, lexical_shift,
// template / replacement_template (repeatable; replaces the default pool),
// lexicon_<TYPE> / replacement_lexicon_<TYPE> (pipe-separated entries,
// tokens space-separated).
SynthSpec load_synth_spec(const KvConfig& cfg);

}  // namespace nertl
