#pragma once

#include <span>
#include <string>
#include <vector>

#include "nertl/data.hpp"

namespace nertl {

// Token-index span [start, end) of one entity type.
struct EntitySpan {
    std::string type;
    std::size_t start = 0;
    std::size_t end = 0;

    bool operator==(const EntitySpan&) const = default;
    auto operator<=>(const EntitySpan&) const = default;
};

// Maximal B-/I- runs of one type become spans. An I-X with no preceding
// B-X or I-X of the same type is repaired to B-X and opens a new span.
std::vector<EntitySpan> extract_spans(std::span<const std::string> labels);

struct PrfScores {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    double precision = 0.0;  // 0/0 := 0
    double recall = 0.0;
    double f1 = 0.0;
};

PrfScores make_prf(std::size_t tp, std::size_t fp, std::size_t fn);

// Label sequences per sentence; gold and pred must be aligned
// sentence-for-sentence and token-for-token.
using LabelSeqs = std::vector<std::vector<std::string>>;

LabelSeqs corpus_labels(const Corpus& corpus);

// Exact-match entity-level micro P/R/F1: a predicted span is a true
// positive iff a gold span matches its (type, start, end) exactly.
PrfScores entity_prf(const LabelSeqs& gold, const LabelSeqs& pred);

// Token-level P/R/F1 after collapsing every non-O label to a single PHI
// class (any-PHI detection).
PrfScores binary_phi_prf(const LabelSeqs& gold, const LabelSeqs& pred);

// Fraction of exactly matching labels.
double token_accuracy(const LabelSeqs& gold, const LabelSeqs& pred);

std::string metrics_to_text(const PrfScores& entity, const PrfScores& binary, double accuracy);

}  // namespace nertl
