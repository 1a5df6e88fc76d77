#include "nertl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace nertl {

namespace {

// Pool construction is seeded by a fixed constant, independent of the spec
// seed: the default lexicons are fixed values, the spec seed only drives
// which entries get drawn.
constexpr uint64_t kPoolSeed = 0x70015eedull;

std::vector<std::string> shuffled(std::vector<std::string> xs, const std::string& label) {
    SeededRng rng = SeededRng(kPoolSeed).fork(label);
    rng.shuffle(xs);
    return xs;
}

std::vector<std::string> make_given_names() {
    static const char* onsets[] = {"B",  "Br", "C", "D", "F", "G", "H", "J", "K", "L",
                                   "M",  "N",  "P", "R", "S", "T", "V", "W", "Y"};
    static const char* nuclei[] = {"a", "e", "i", "o", "u", "ay", "el", "or", "an", "ira"};
    static const char* codas[] = {"l", "n", "r", "s", "th", "m", "k", "da", "vin", "ssa"};
    std::vector<std::string> names;
    for (const char* o : onsets)
        for (const char* nu : nuclei)
            for (const char* c : codas) names.push_back(std::string(o) + nu + c);
    return shuffled(std::move(names), "given");
}

std::vector<std::string> make_surnames() {
    static const char* stems[] = {"Hart", "Wren", "Cald", "Marl", "Fen",  "Gray", "Hol",
                                  "Kemp", "Lang", "Mort", "Nash", "Pell", "Rook", "Sher",
                                  "Thorn", "Vance", "Wick", "Bram", "Crof", "Dray"};
    static const char* ends[] = {"son", "well", "ford", "ley", "man", "field", "worth", "by"};
    std::vector<std::string> names;
    for (const char* s : stems)
        for (const char* e : ends) names.push_back(std::string(s) + e);
    return shuffled(std::move(names), "surname");
}

std::string format_date(SeededRng& rng, int year) {
    char buf[32];
    static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                   "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    const int month = 1 + static_cast<int>(rng.uniform_index(12));
    const int day = 1 + static_cast<int>(rng.uniform_index(28));
    switch (rng.uniform_index(3)) {
        case 0:
            std::snprintf(buf, sizeof(buf), "%02d/%02d/%d", month, day, year);
            break;
        case 1:
            std::snprintf(buf, sizeof(buf), "%d-%02d-%02d", year, month, day);
            break;
        default:
            std::snprintf(buf, sizeof(buf), "%s-%02d-%d", months[month - 1], day, year);
            break;
    }
    return buf;
}

std::vector<std::string> make_dates(int year_lo, int year_hi, std::size_t count,
                                    const std::string& label) {
    SeededRng rng = SeededRng(kPoolSeed).fork(label);
    std::set<std::string> seen;
    std::vector<std::string> out;
    while (out.size() < count) {
        const int year = year_lo + static_cast<int>(rng.uniform_index(year_hi - year_lo + 1));
        std::string d = format_date(rng, year);
        if (seen.insert(d).second) out.push_back(std::move(d));
    }
    return out;
}

std::vector<std::string> make_phones(std::span<const char* const> area_codes, int last4_base,
                                     std::size_t count) {
    std::vector<std::string> out;
    char buf[32];
    for (std::size_t k = 0; k < count; ++k) {
        const char* area = area_codes[k % area_codes.size()];
        std::snprintf(buf, sizeof(buf), "%s-555-%04d", area, last4_base + static_cast<int>(k));
        out.push_back(buf);
    }
    return out;
}

std::vector<std::string> make_ids(std::span<const char* const> prefixes, int digit_lo,
                                  std::size_t count, const std::string& label) {
    SeededRng rng = SeededRng(kPoolSeed).fork(label);
    std::set<std::string> seen;
    std::vector<std::string> out;
    char buf[32];
    while (out.size() < count) {
        const char* prefix = prefixes[rng.uniform_index(prefixes.size())];
        const int number = (digit_lo + static_cast<int>(rng.uniform_index(4))) * 100000 +
                           static_cast<int>(rng.uniform_index(100000));
        std::snprintf(buf, sizeof(buf), "%s%06d", prefix, number);
        if (seen.insert(buf).second) out.emplace_back(buf);
    }
    return out;
}

std::vector<std::vector<std::string>> make_addresses(int num_lo, int num_hi,
                                                     std::span<const char* const> streets,
                                                     std::span<const char* const> suffixes,
                                                     std::size_t count, const std::string& label) {
    SeededRng rng = SeededRng(kPoolSeed).fork(label);
    std::set<std::string> seen;
    std::vector<std::vector<std::string>> out;
    while (out.size() < count) {
        const int num = num_lo + static_cast<int>(rng.uniform_index(num_hi - num_lo + 1));
        const char* street = streets[rng.uniform_index(streets.size())];
        const char* suffix = suffixes[rng.uniform_index(suffixes.size())];
        const std::string key = std::to_string(num) + " " + street + " " + suffix;
        if (seen.insert(key).second) out.push_back({std::to_string(num), street, suffix});
    }
    return out;
}

std::vector<std::vector<std::string>> pair_names(const std::vector<std::string>& given,
                                                 const std::vector<std::string>& surnames,
                                                 std::size_t count, const std::string& label) {
    SeededRng rng = SeededRng(kPoolSeed).fork(label);
    std::vector<std::vector<std::string>> out;
    for (std::size_t k = 0; k < count; ++k) {
        const std::string& first = given[k % given.size()];
        if (rng.bernoulli(0.4)) {
            out.push_back({first, surnames[rng.uniform_index(surnames.size())]});
        } else {
            out.push_back({first});
        }
    }
    return out;
}

std::vector<std::vector<std::string>> single_token_entries(const std::vector<std::string>& xs) {
    std::vector<std::vector<std::string>> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back({x});
    return out;
}

std::vector<std::string> number_range(int lo, int hi) {
    std::vector<std::string> out;
    for (int n = lo; n <= hi; ++n) out.push_back(std::to_string(n));
    return out;
}

const PhiLexicon* find_lexicon(const std::vector<PhiLexicon>& pools, const std::string& type) {
    for (const auto& p : pools)
        if (p.type == type) return &p;
    return nullptr;
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

// A template token is either a literal or a "{TYPE}" slot.
bool is_slot(const std::string& tok, std::string& type_out) {
    if (tok.size() >= 3 && tok.front() == '{' && tok.back() == '}') {
        type_out = tok.substr(1, tok.size() - 2);
        return true;
    }
    return false;
}

Sentence fill_template(const std::string& tmpl, const std::vector<PhiLexicon>& pools,
                       SeededRng& rng) {
    Sentence sentence;
    std::string type;
    for (const std::string& tok : split_tokens(tmpl)) {
        if (is_slot(tok, type)) {
            const PhiLexicon* lex = find_lexicon(pools, type);
            require(lex != nullptr && !lex->entries.empty(),
                    "synthetic template references empty or unknown lexicon: " + type);
            const auto& entry = lex->entries[rng.uniform_index(lex->entries.size())];
            for (std::size_t k = 0; k < entry.size(); ++k)
                sentence.push_back({entry[k], (k == 0 ? "B-" : "I-") + type});
        } else {
            sentence.push_back({tok, "O"});
        }
    }
    return sentence;
}

Corpus generate_corpus(const std::vector<PhiLexicon>& pools,
                       const std::vector<std::string>& templates, int num_notes,
                       int sentences_min, int sentences_max, SeededRng rng) {
    Corpus corpus;
    for (int i = 0; i < num_notes; ++i) {
        Document doc;
        doc.note_id = "tmp";
        const int span = sentences_max - sentences_min + 1;
        const int n_sent = sentences_min + static_cast<int>(rng.uniform_index(span));
        for (int s = 0; s < n_sent; ++s) {
            const std::string& tmpl = templates[rng.uniform_index(templates.size())];
            doc.sentences.push_back(fill_template(tmpl, pools, rng));
        }
        corpus.documents.push_back(std::move(doc));
    }
    rebuild_label_inventory(corpus);
    return corpus;
}

void assign_note_ids(Corpus& corpus) {
    char buf[32];
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "note-%04zu", i);
        corpus.documents[i].note_id = buf;
    }
}

SplitCorpus split_60_20_20(Corpus&& all) {
    const std::size_t n = all.documents.size();
    const std::size_t n_train = static_cast<std::size_t>(std::llround(0.6 * n));
    const std::size_t n_dev = static_cast<std::size_t>(std::llround(0.2 * n));

    SplitCorpus out;
    for (std::size_t i = 0; i < n; ++i) {
        Corpus& dst = i < n_train ? out.train : (i < n_train + n_dev ? out.dev : out.test);
        dst.documents.push_back(std::move(all.documents[i]));
    }
    for (Corpus* c : {&out.train, &out.dev, &out.test}) {
        assign_note_ids(*c);
        rebuild_label_inventory(*c);
    }
    return out;
}

// Resamples a lexical_shift fraction of entries from the replacement pool;
// replacements are consumed in shuffled order so repeats only appear once a
// pool is exhausted.
std::vector<PhiLexicon> shift_lexicons(const std::vector<PhiLexicon>& primary,
                                       const std::vector<PhiLexicon>& replacement, double shift,
                                       SeededRng& rng) {
    std::vector<PhiLexicon> out = primary;
    for (auto& lex : out) {
        const PhiLexicon* repl = find_lexicon(replacement, lex.type);
        if (repl == nullptr || repl->entries.empty()) continue;
        std::vector<std::size_t> order(repl->entries.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        std::size_t next = 0;
        for (auto& entry : lex.entries) {
            if (rng.bernoulli(shift)) {
                entry = repl->entries[order[next % order.size()]];
                ++next;
            }
        }
    }
    return out;
}

std::vector<std::string> shift_templates(const std::vector<std::string>& primary,
                                         const std::vector<std::string>& replacement, double shift,
                                         SeededRng& rng) {
    std::vector<std::string> out = primary;
    if (replacement.empty()) return out;
    std::vector<std::size_t> order(replacement.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::size_t next = 0;
    for (auto& tmpl : out) {
        if (rng.bernoulli(shift)) {
            tmpl = replacement[order[next % order.size()]];
            ++next;
        }
    }
    return out;
}

const std::vector<std::string>& default_templates() {
    static const std::vector<std::string> templates = {
        "Patient {NAME} was admitted to {HOSPITAL} on {DATE} .",
        "{NAME} is a {AGE} year old patient seen on {DATE} .",
        "Contact number {PHONE} on file for {NAME} .",
        "Record {ID} updated at {HOSPITAL} yesterday .",
        "Home address listed as {ADDRESS} in the chart .",
        "Follow up scheduled for {DATE} at {HOSPITAL} .",
        "Discharge summary signed by Dr {NAME} .",
        "The patient lives at {ADDRESS} with family .",
        "Insurance id {ID} verified by phone at {PHONE} .",
        "Spoke with {NAME} regarding goals of care .",
        "Case discussed with the team at {HOSPITAL} .",
        "Transfer paperwork includes id {ID} and contact {PHONE} .",
        "Next of kin reachable at {PHONE} after hours .",
        "{NAME} reports improvement since {DATE} .",
        "Seen in clinic on {DATE} for routine review .",
        "The {AGE} year old was accompanied by {NAME} .",
        "Pharmacy confirmed delivery to {ADDRESS} on {DATE} .",
        "Chart id {ID} merged with prior record {ID} .",
        "Labs reviewed ; no acute findings today .",
        "Vitals stable overnight ; continue current plan .",
        "Medication reconciliation completed without changes .",
        "The plan was reviewed in detail with the family .",
        "Pain controlled ; ambulating without assistance .",
        "Allergy list reviewed and unchanged this admission .",
        "Glasgow score recorded as normal on exam .",
        "Holter monitor results pending at this time .",
    };
    return templates;
}

const std::vector<std::string>& default_replacement_templates() {
    static const std::vector<std::string> templates = {
        "Note for {NAME} , reviewed at {HOSPITAL} on {DATE} .",
        "Callback requested at {PHONE} for patient {NAME} .",
        "Registration lists {ADDRESS} as the current residence .",
        "Visit on {DATE} documented under id {ID} .",
        "A {AGE} year old presented to {HOSPITAL} overnight .",
        "Escort arranged for {NAME} , aged {AGE} , on {DATE} .",
        "Billing reference {ID} closed after review .",
        "Message left at {PHONE} regarding the {DATE} visit .",
        "Imaging reviewed ; impression unchanged from prior .",
        "Disposition discussed ; family agreeable to the plan .",
    };
    return templates;
}

}  // namespace

SynthSpec SynthSpec::defaults() {
    SynthSpec spec;

    const std::vector<std::string> given = make_given_names();      // 1900 distinct
    const std::vector<std::string> surnames = make_surnames();      // 160 distinct
    const std::vector<std::string> given_p(given.begin(), given.begin() + 160);
    const std::vector<std::string> given_r(given.begin() + 160, given.begin() + 240);
    const std::vector<std::string> sur_p(surnames.begin(), surnames.begin() + 60);
    const std::vector<std::string> sur_r(surnames.begin() + 60, surnames.begin() + 100);

    static const char* phone_area_p[] = {"617", "603", "781", "508"};
    static const char* phone_area_r[] = {"212", "415"};
    static const char* id_prefix_p[] = {"A", "B", "C", "E", "F", "G", "H", "J"};
    static const char* id_prefix_r[] = {"P", "Q", "R", "T", "U"};
    static const char* streets_p[] = {"Oak",    "Elm",      "Maple",  "Willow",
                                      "Juniper", "Hawthorn", "Linden", "Magnolia"};
    static const char* streets_r[] = {"Birch", "Aspen", "Sequoia", "Sycamore", "Alder"};
    static const char* suffix_p[] = {"St", "Ave", "Rd"};
    static const char* suffix_r[] = {"Blvd", "Ln", "Way"};
    static const char* hospitals_p[] = {"Mercy",  "Fairview",   "Lakeside", "Ridgemont",
                                        "Beacon", "Harborview", "Summit",   "Parkland"};
    static const char* hospitals_r[] = {"Crestwood", "Silverpine", "Eastbrook", "Northgate",
                                        "Fallbrook"};

    auto add = [](std::vector<PhiLexicon>& pools, const char* type,
                  std::vector<std::vector<std::string>> entries) {
        PhiLexicon lex;
        lex.type = type;
        lex.entries = std::move(entries);
        pools.push_back(std::move(lex));
    };

    add(spec.lexicons, "NAME", pair_names(given_p, sur_p, 150, "name-p"));
    add(spec.lexicons, "DATE", single_token_entries(make_dates(2010, 2019, 150, "date-p")));
    add(spec.lexicons, "PHONE", single_token_entries(make_phones(phone_area_p, 100, 120)));
    add(spec.lexicons, "ID", single_token_entries(make_ids(id_prefix_p, 1, 140, "id-p")));
    add(spec.lexicons, "ADDRESS", make_addresses(100, 499, streets_p, suffix_p, 120, "addr-p"));
    std::vector<std::vector<std::string>> hosp_p;
    for (const char* h : hospitals_p) hosp_p.push_back({h, "General", "Hospital"});
    add(spec.lexicons, "HOSPITAL", std::move(hosp_p));
    add(spec.lexicons, "AGE", single_token_entries(number_range(25, 64)));

    add(spec.replacement_lexicons, "NAME", pair_names(given_r, sur_r, 80, "name-r"));
    add(spec.replacement_lexicons, "DATE",
        single_token_entries(make_dates(2020, 2029, 70, "date-r")));
    add(spec.replacement_lexicons, "PHONE",
        single_token_entries(make_phones(phone_area_r, 500, 60)));
    add(spec.replacement_lexicons, "ID", single_token_entries(make_ids(id_prefix_r, 6, 70, "id-r")));
    add(spec.replacement_lexicons, "ADDRESS",
        make_addresses(500, 999, streets_r, suffix_r, 60, "addr-r"));
    std::vector<std::vector<std::string>> hosp_r;
    for (const char* h : hospitals_r) hosp_r.push_back({h, "Medical", "Center"});
    add(spec.replacement_lexicons, "HOSPITAL", std::move(hosp_r));
    add(spec.replacement_lexicons, "AGE", single_token_entries(number_range(65, 99)));

    spec.templates = default_templates();
    spec.replacement_templates = default_replacement_templates();
    return spec;
}

void SynthSpec::validate() const {
    require(source_notes > 0 && target_notes > 0, "synth spec: note counts must be positive");
    require(sentences_min >= 1 && sentences_max >= sentences_min,
            "synth spec: bad sentences_per_note range");
    require(lexical_shift >= 0.0 && lexical_shift <= 1.0, "synth spec: lexical_shift outside [0,1]");
    require(!templates.empty(), "synth spec: no templates");
    require(!lexicons.empty(), "synth spec: no lexicons");
    for (const auto& lex : lexicons) {
        require(!lex.entries.empty(), "synth spec: empty lexicon for type " + lex.type);
        for (const auto& entry : lex.entries)
            require(!entry.empty(), "synth spec: empty entry in lexicon " + lex.type);
    }
    std::string type;
    for (const auto* pool : {&templates, &replacement_templates})
        for (const auto& tmpl : *pool)
            for (const auto& tok : split_tokens(tmpl))
                if (is_slot(tok, type))
                    require(find_lexicon(lexicons, type) != nullptr,
                            "synth spec: template slot has no lexicon: " + type);
}

SyntheticData generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    const SeededRng master(spec.seed);

    SeededRng shift_rng = master.fork("lexical-shift");
    const std::vector<PhiLexicon> target_lexicons =
        shift_lexicons(spec.lexicons, spec.replacement_lexicons, spec.lexical_shift, shift_rng);
    const std::vector<std::string> target_templates = shift_templates(
        spec.templates, spec.replacement_templates, spec.lexical_shift, shift_rng);

    SyntheticData data;
    data.source = split_60_20_20(generate_corpus(spec.lexicons, spec.templates, spec.source_notes,
                                                 spec.sentences_min, spec.sentences_max,
                                                 master.fork("source-notes")));
    data.target = split_60_20_20(generate_corpus(target_lexicons, target_templates,
                                                 spec.target_notes, spec.sentences_min,
                                                 spec.sentences_max, master.fork("target-notes")));
    return data;
}

SynthSpec load_synth_spec(const KvConfig& cfg) {
    SynthSpec spec = SynthSpec::defaults();
    spec.seed = cfg.get_u64("seed", spec.seed);
    if (cfg.has("num_notes")) {
        const int n = static_cast<int>(cfg.get_int("num_notes", 0));
        spec.source_notes = n;
        spec.target_notes = n;
    }
    spec.source_notes = static_cast<int>(cfg.get_int("source_notes", spec.source_notes));
    spec.target_notes = static_cast<int>(cfg.get_int("target_notes", spec.target_notes));
    spec.sentences_min = static_cast<int>(cfg.get_int("sentences_min", spec.sentences_min));
    spec.sentences_max = static_cast<int>(cfg.get_int("sentences_max", spec.sentences_max));
    spec.lexical_shift = cfg.get_double("lexical_shift", spec.lexical_shift);

    if (cfg.has("phi_types")) {
        const auto keep = cfg.get_strings("phi_types");
        auto filter = [&keep](std::vector<PhiLexicon>& pools) {
            std::erase_if(pools, [&keep](const PhiLexicon& lex) {
                return std::find(keep.begin(), keep.end(), lex.type) == keep.end();
            });
        };
        filter(spec.lexicons);
        filter(spec.replacement_lexicons);
        // Default templates mentioning a dropped type go with it; custom
        // templates below are kept verbatim and validated.
        auto uses_dropped = [&keep](const std::string& tmpl) {
            std::string type;
            for (const auto& tok : split_tokens(tmpl))
                if (is_slot(tok, type) && std::find(keep.begin(), keep.end(), type) == keep.end())
                    return true;
            return false;
        };
        std::erase_if(spec.templates, uses_dropped);
        std::erase_if(spec.replacement_templates, uses_dropped);
    }

    auto parse_entries = [](const std::vector<std::string>& values) {
        std::vector<std::vector<std::string>> entries;
        for (const auto& value : values)
            for (const auto& item : split_list(value, '|')) entries.push_back(split_tokens(item));
        return entries;
    };
    auto apply_lexicon_overrides = [&](const std::string& prefix, std::vector<PhiLexicon>& pools) {
        std::set<std::string> seen_types;
        for (const auto& [key, value] : cfg.entries()) {
            if (key.rfind(prefix, 0) != 0) continue;
            const std::string type = key.substr(prefix.size());
            if (!seen_types.insert(type).second) continue;
            auto entries = parse_entries(cfg.get_all(key));
            if (PhiLexicon* lex = const_cast<PhiLexicon*>(find_lexicon(pools, type))) {
                lex->entries = std::move(entries);
            } else {
                pools.push_back({type, std::move(entries)});
            }
        }
    };
    apply_lexicon_overrides("lexicon_", spec.lexicons);
    apply_lexicon_overrides("replacement_lexicon_", spec.replacement_lexicons);

    if (cfg.has("template")) spec.templates = cfg.get_all("template");
    if (cfg.has("replacement_template")) spec.replacement_templates = cfg.get_all("replacement_template");

    spec.validate();
    return spec;
}

}  // namespace nertl
