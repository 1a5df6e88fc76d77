#pragma once

#include <filesystem>
#include <set>

#include "nertl/network.hpp"

namespace nertl {

// Self-describing serialized model: little-endian binary, magic "NERTL",
// version 1, length-prefixed UTF-8 strings, 64-bit float parameters and a
// trailing 64-bit checksum over the payload. Save/load is bit-exact.
struct Checkpoint {
    uint32_t format_version = 1;
    Hyperparameters hp;
    Vocabulary vocab;
    ModelParams params;
};

constexpr uint32_t kCheckpointVersion = 1;

void save_checkpoint(const NerModel& model, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);
NerModel model_from_checkpoint(Checkpoint ckpt);

enum class LabelPolicy { require_identical, reinit_label_layers };

// Which layer parameter groups to copy from the source checkpoint into a
// freshly initialized target model. Normally a prefix of the layer order.
struct TransferPlan {
    std::set<LayerId> layers;
    LabelPolicy label_policy = LabelPolicy::require_identical;

    bool contains(LayerId id) const { return layers.contains(id); }
    std::string describe() const;  // e.g. "none", "layers1-3"
};

struct TransferReport {
    // outcome per layer 1..6: "transferred", "partially transferred" or
    // "reinitialized"
    std::vector<std::pair<LayerId, std::string>> outcomes;
    std::size_t token_rows_transferred = 0, token_rows_reinitialized = 0;
    std::size_t char_rows_transferred = 0, char_rows_reinitialized = 0;
    std::string label_layer_disposition;
    std::string plan_description;

    std::string to_text() const;
};

// Copies planned parameter groups from source into target as initialization
// (everything stays trainable). Embedding rows are remapped by surface-form
// overlap; LSTM and dense blocks copy whole; the label-indexed layers
// (dense, seq_opt) copy only when the label vocabularies are identical as
// ordered sets, else label_policy decides.
TransferReport transfer_parameters(const Checkpoint& source, NerModel& target,
                                   const TransferPlan& plan);

// The seven prefix plans of the layer order: none, {1}, {1,2}, ..., {1..6}.
std::vector<TransferPlan> prefix_plans();

}  // namespace nertl
