#include "nertl/eval.hpp"

#include <algorithm>
#include <sstream>

namespace nertl {

namespace {

void check_aligned(const LabelSeqs& gold, const LabelSeqs& pred) {
    require(gold.size() == pred.size(), "eval: gold/pred sentence counts differ");
    for (std::size_t i = 0; i < gold.size(); ++i)
        require(gold[i].size() == pred[i].size(),
                "eval: gold/pred token counts differ in sentence " + std::to_string(i));
}

}  // namespace

std::vector<EntitySpan> extract_spans(std::span<const std::string> labels) {
    std::vector<EntitySpan> spans;
    std::string open_type;
    std::size_t open_start = 0;

    auto close = [&](std::size_t end) {
        if (!open_type.empty()) {
            spans.push_back({open_type, open_start, end});
            open_type.clear();
        }
    };

    for (std::size_t t = 0; t < labels.size(); ++t) {
        const std::string& label = labels[t];
        if (label == "O") {
            close(t);
            continue;
        }
        require(is_valid_bio_label(label), "extract_spans: bad BIO label: " + label);
        const std::string type = label.substr(2);
        if (label[0] == 'B' || type != open_type) {
            // B- opens; orphan or type-changing I- is repaired to B-.
            close(t);
            open_type = type;
            open_start = t;
        }
    }
    close(labels.size());
    return spans;
}

PrfScores make_prf(std::size_t tp, std::size_t fp, std::size_t fn) {
    PrfScores s;
    s.true_positives = tp;
    s.false_positives = fp;
    s.false_negatives = fn;
    s.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    s.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    s.f1 = s.precision + s.recall == 0.0 ? 0.0
                                         : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

LabelSeqs corpus_labels(const Corpus& corpus) {
    LabelSeqs out;
    for (const auto& doc : corpus.documents) {
        for (const auto& sentence : doc.sentences) {
            std::vector<std::string> labels;
            labels.reserve(sentence.size());
            for (const auto& tok : sentence) labels.push_back(tok.label);
            out.push_back(std::move(labels));
        }
    }
    return out;
}

PrfScores entity_prf(const LabelSeqs& gold, const LabelSeqs& pred) {
    check_aligned(gold, pred);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        std::vector<EntitySpan> gs = extract_spans(gold[i]);
        std::vector<EntitySpan> ps = extract_spans(pred[i]);
        std::sort(gs.begin(), gs.end());
        std::sort(ps.begin(), ps.end());
        std::vector<EntitySpan> matched;
        std::set_intersection(gs.begin(), gs.end(), ps.begin(), ps.end(),
                              std::back_inserter(matched));
        tp += matched.size();
        fp += ps.size() - matched.size();
        fn += gs.size() - matched.size();
    }
    return make_prf(tp, fp, fn);
}

PrfScores binary_phi_prf(const LabelSeqs& gold, const LabelSeqs& pred) {
    check_aligned(gold, pred);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        for (std::size_t t = 0; t < gold[i].size(); ++t) {
            const bool g = gold[i][t] != "O";
            const bool p = pred[i][t] != "O";
            if (g && p) ++tp;
            else if (p) ++fp;
            else if (g) ++fn;
        }
    }
    return make_prf(tp, fp, fn);
}

double token_accuracy(const LabelSeqs& gold, const LabelSeqs& pred) {
    check_aligned(gold, pred);
    std::size_t total = 0, hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        for (std::size_t t = 0; t < gold[i].size(); ++t) {
            ++total;
            if (gold[i][t] == pred[i][t]) ++hits;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

std::string metrics_to_text(const PrfScores& entity, const PrfScores& binary, double accuracy) {
    std::ostringstream out;
    char buf[64];
    auto line = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%s = %.6f\n", key, v);
        out << buf;
    };
    out << "entity_tp = " << entity.true_positives << "\n";
    out << "entity_fp = " << entity.false_positives << "\n";
    out << "entity_fn = " << entity.false_negatives << "\n";
    line("entity_precision", entity.precision);
    line("entity_recall", entity.recall);
    line("entity_f1", entity.f1);
    line("binary_phi_precision", binary.precision);
    line("binary_phi_recall", binary.recall);
    line("binary_phi_f1", binary.f1);
    line("token_accuracy", accuracy);
    return out.str();
}

}  // namespace nertl
