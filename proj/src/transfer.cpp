#include "nertl/transfer.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nertl {

namespace {

constexpr char kMagic[5] = {'N', 'E', 'R', 'T', 'L'};

struct ByteWriter {
    std::string buf;

    void u8(uint8_t v) { buf.push_back(static_cast<char>(v)); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<uint32_t>(s.size()));
        buf.append(s);
    }
};

struct ByteReader {
    std::string_view buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw IntegrityError("checkpoint truncated");
    }
    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(buf[pos++]);
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos++])) << (8 * i);
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(buf[pos++])) << (8 * i);
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const uint32_t n = u32();
        need(n);
        std::string s(buf.substr(pos, n));
        pos += n;
        return s;
    }
};

void write_tensor(ByteWriter& w, const std::string& name, const Mat& m) {
    w.str(name);
    w.u8(1);
    w.u64(m.rows);
    w.u64(m.cols);
    for (double x : m.a) w.f64(x);
}

void write_tensor(ByteWriter& w, const std::string& name, const Vec& v) {
    w.str(name);
    w.u8(0);
    w.u64(v.size());
    w.u64(0);
    for (double x : v.a) w.f64(x);
}

void read_tensor(ByteReader& r, const std::string& expect_name, Mat& m) {
    const std::string name = r.str();
    if (name != expect_name) throw IntegrityError("checkpoint tensor order: expected " +
                                                  expect_name + ", found " + name);
    if (r.u8() != 1) throw IntegrityError("checkpoint tensor kind mismatch for " + name);
    const uint64_t rows = r.u64(), cols = r.u64();
    m = Mat(rows, cols);
    for (double& x : m.a) x = r.f64();
}

void read_tensor(ByteReader& r, const std::string& expect_name, Vec& v) {
    const std::string name = r.str();
    if (name != expect_name) throw IntegrityError("checkpoint tensor order: expected " +
                                                  expect_name + ", found " + name);
    if (r.u8() != 0) throw IntegrityError("checkpoint tensor kind mismatch for " + name);
    const uint64_t n = r.u64();
    r.u64();
    v = Vec(n);
    for (double& x : v.a) x = r.f64();
}

void write_hp(ByteWriter& w, const Hyperparameters& hp) {
    w.u32(static_cast<uint32_t>(hp.token_emb_dim));
    w.u32(static_cast<uint32_t>(hp.char_emb_dim));
    w.u32(static_cast<uint32_t>(hp.char_lstm_hidden));
    w.u32(static_cast<uint32_t>(hp.token_lstm_hidden));
    w.f64(hp.learning_rate);
    w.f64(hp.dropout_rate);
    w.f64(hp.grad_clip_norm);
    w.i32(hp.max_epochs);
    w.i32(hp.patience);
    w.u64(hp.seed);
    w.u8(hp.bidirectional ? 1 : 0);
    w.i32(hp.min_token_freq);
}

Hyperparameters read_hp(ByteReader& r) {
    Hyperparameters hp;
    hp.token_emb_dim = r.u32();
    hp.char_emb_dim = r.u32();
    hp.char_lstm_hidden = r.u32();
    hp.token_lstm_hidden = r.u32();
    hp.learning_rate = r.f64();
    hp.dropout_rate = r.f64();
    hp.grad_clip_norm = r.f64();
    hp.max_epochs = r.i32();
    hp.patience = r.i32();
    hp.seed = r.u64();
    hp.bidirectional = r.u8() != 0;
    hp.min_token_freq = r.i32();
    return hp;
}

void write_vocab(ByteWriter& w, const Vocabulary& v) {
    w.u32(static_cast<uint32_t>(v.num_tokens()));
    for (std::size_t i = 2; i < v.num_tokens(); ++i) w.str(v.token_by_id[i]);
    w.u32(static_cast<uint32_t>(v.num_chars()));
    for (std::size_t i = 2; i < v.num_chars(); ++i) w.u32(v.char_by_id[i]);
    w.u32(static_cast<uint32_t>(v.num_labels()));
    for (const auto& label : v.label_by_id) w.str(label);
    std::vector<std::string> singles(v.singletons.begin(), v.singletons.end());
    std::sort(singles.begin(), singles.end());
    w.u32(static_cast<uint32_t>(singles.size()));
    for (const auto& s : singles) w.str(s);
    w.i32(v.min_token_freq);
}

Vocabulary read_vocab(ByteReader& r) {
    Vocabulary v;
    v.token_by_id = {"<PAD>", "<UNK>"};
    v.token_to_id = {{"<PAD>", Vocabulary::pad_id}, {"<UNK>", Vocabulary::unk_id}};
    const uint32_t n_tokens = r.u32();
    if (n_tokens < 2) throw IntegrityError("checkpoint vocab too small");
    for (uint32_t i = 2; i < n_tokens; ++i) {
        std::string s = r.str();
        v.token_to_id[s] = static_cast<int>(i);
        v.token_by_id.push_back(std::move(s));
    }
    const uint32_t n_chars = r.u32();
    if (n_chars < 2) throw IntegrityError("checkpoint char vocab too small");
    v.char_by_id = {0, 0};
    for (uint32_t i = 2; i < n_chars; ++i) {
        const uint32_t cp = r.u32();
        v.char_to_id[cp] = static_cast<int>(i);
        v.char_by_id.push_back(cp);
    }
    const uint32_t n_labels = r.u32();
    for (uint32_t i = 0; i < n_labels; ++i) {
        std::string s = r.str();
        v.label_to_id[s] = static_cast<int>(i);
        v.label_by_id.push_back(std::move(s));
    }
    const uint32_t n_singles = r.u32();
    for (uint32_t i = 0; i < n_singles; ++i) v.singletons.insert(r.str());
    v.min_token_freq = r.i32();
    return v;
}

void write_lstm(ByteWriter& w, const LstmParams& p) {
    p.for_each([&](const char* name, const auto& tensor) { write_tensor(w, name, tensor); });
}

void read_lstm(ByteReader& r, LstmParams& p) {
    p.for_each([&](const char* name, auto& tensor) { read_tensor(r, name, tensor); });
}

std::string serialize_payload(const Hyperparameters& hp, const Vocabulary& vocab,
                              const ModelParams& params) {
    ByteWriter w;
    write_hp(w, hp);
    write_vocab(w, vocab);
    write_tensor(w, "token_emb", params.token_emb.table);
    write_tensor(w, "char_emb", params.char_emb.table);
    write_lstm(w, params.char_lstm_fwd);
    write_lstm(w, params.char_lstm_bwd);
    write_lstm(w, params.token_lstm_fwd);
    write_lstm(w, params.token_lstm_bwd);
    write_tensor(w, "dense_w", params.dense.w);
    write_tensor(w, "dense_b", params.dense.b);
    write_tensor(w, "transitions", params.transitions.scores);
    return std::move(w.buf);
}

}  // namespace

void save_checkpoint(const NerModel& model, const std::filesystem::path& path) {
    model.check_consistent();
    const std::string payload = serialize_payload(model.hp, model.vocab, model.params);

    ByteWriter head;
    head.buf.append(kMagic, sizeof(kMagic));
    head.u32(kCheckpointVersion);

    ByteWriter tail;
    tail.u64(fnv1a64(payload));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + path.string());
    out << head.buf << payload << tail.buf;
    if (!out) throw IoError("checkpoint write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();

    if (bytes.size() < sizeof(kMagic) + 4 + 8) throw IntegrityError("checkpoint too short");
    if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw IntegrityError("bad checkpoint magic");

    ByteReader header{std::string_view(bytes).substr(sizeof(kMagic), 4)};
    const uint32_t version = header.u32();
    if (version != kCheckpointVersion)
        throw VersionError("unsupported checkpoint version " + std::to_string(version));

    const std::string_view payload(bytes.data() + sizeof(kMagic) + 4,
                                   bytes.size() - sizeof(kMagic) - 4 - 8);
    ByteReader trailer{std::string_view(bytes).substr(bytes.size() - 8)};
    if (trailer.u64() != fnv1a64(payload)) throw IntegrityError("checkpoint checksum mismatch");

    ByteReader r{payload};
    Checkpoint ckpt;
    ckpt.format_version = version;
    ckpt.hp = read_hp(r);
    ckpt.vocab = read_vocab(r);
    ckpt.params = ModelParams::make(ckpt.hp, ckpt.vocab.num_tokens(), ckpt.vocab.num_chars(),
                                    ckpt.vocab.num_labels());
    read_tensor(r, "token_emb", ckpt.params.token_emb.table);
    read_tensor(r, "char_emb", ckpt.params.char_emb.table);
    read_lstm(r, ckpt.params.char_lstm_fwd);
    read_lstm(r, ckpt.params.char_lstm_bwd);
    read_lstm(r, ckpt.params.token_lstm_fwd);
    read_lstm(r, ckpt.params.token_lstm_bwd);
    read_tensor(r, "dense_w", ckpt.params.dense.w);
    read_tensor(r, "dense_b", ckpt.params.dense.b);
    read_tensor(r, "transitions", ckpt.params.transitions.scores);
    if (r.pos != payload.size()) throw IntegrityError("checkpoint has trailing bytes");

    ckpt.params.token_emb.name = "token";
    ckpt.params.char_emb.name = "char";

    // Cross-check the parsed shapes against hyperparameters and vocabulary.
    NerModel probe;
    probe.vocab = ckpt.vocab;
    probe.hp = ckpt.hp;
    probe.params = ckpt.params;
    try {
        probe.check_consistent();
    } catch (const ContractError& e) {
        throw IntegrityError(std::string("checkpoint inconsistent: ") + e.what());
    }
    return ckpt;
}

NerModel model_from_checkpoint(Checkpoint ckpt) {
    NerModel m;
    m.vocab = std::move(ckpt.vocab);
    m.hp = std::move(ckpt.hp);
    m.params = std::move(ckpt.params);
    m.check_consistent();
    return m;
}

std::string TransferPlan::describe() const {
    if (layers.empty()) return "none";
    // Prefix plans get the compact form.
    bool is_prefix = true;
    int expect = 1;
    for (LayerId id : layers) {
        if (static_cast<int>(id) != expect++) {
            is_prefix = false;
            break;
        }
    }
    if (is_prefix) return "layers1-" + std::to_string(layers.size());
    std::string out = "layers{";
    bool first = true;
    for (LayerId id : layers) {
        if (!first) out += ",";
        out += std::to_string(static_cast<int>(id));
        first = false;
    }
    return out + "}";
}

std::string TransferReport::to_text() const {
    std::ostringstream out;
    out << "plan = " << plan_description << "\n";
    for (const auto& [layer, outcome] : outcomes)
        out << "layer" << static_cast<int>(layer) << "_" << layer_name(layer) << " = " << outcome
            << "\n";
    out << "token_rows_transferred = " << token_rows_transferred << "\n";
    out << "token_rows_reinitialized = " << token_rows_reinitialized << "\n";
    out << "char_rows_transferred = " << char_rows_transferred << "\n";
    out << "char_rows_reinitialized = " << char_rows_reinitialized << "\n";
    out << "label_layers = " << label_layer_disposition << "\n";
    return out.str();
}

namespace {

void check_lstm_dims(const LstmParams& a, const LstmParams& b, const char* what) {
    require(a.in_dim() == b.in_dim() && a.hidden() == b.hidden(),
            std::string("transfer: dimension mismatch on ") + what);
}

}  // namespace

TransferReport transfer_parameters(const Checkpoint& source, NerModel& target,
                                   const TransferPlan& plan) {
    TransferReport report;
    report.plan_description = plan.describe();

    const bool labels_identical = source.vocab.label_by_id == target.vocab.label_by_id;
    const bool label_layer_planned =
        plan.contains(LayerId::dense) || plan.contains(LayerId::seq_opt);
    if (label_layer_planned && !labels_identical &&
        plan.label_policy == LabelPolicy::require_identical) {
        throw LabelMismatchError(
            "source and target label vocabularies differ; plan includes a label-indexed layer "
            "under require_identical");
    }

    // Token embedding: remap rows by surface form.
    report.token_rows_reinitialized = target.vocab.num_tokens();
    report.char_rows_reinitialized = target.vocab.num_chars();
    std::string token_outcome = "reinitialized";
    if (plan.contains(LayerId::token_emb)) {
        require(source.hp.token_emb_dim == target.hp.token_emb_dim,
                "transfer: token embedding dim mismatch");
        std::size_t copied = 0;
        for (std::size_t id = 0; id < target.vocab.num_tokens(); ++id) {
            const auto it = source.vocab.token_to_id.find(target.vocab.token_by_id[id]);
            if (it == source.vocab.token_to_id.end()) continue;
            const auto src = source.params.token_emb.table.row(static_cast<std::size_t>(it->second));
            const auto dst = target.params.token_emb.table.row(id);
            std::copy(src.begin(), src.end(), dst.begin());
            ++copied;
        }
        report.token_rows_transferred = copied;
        report.token_rows_reinitialized = target.vocab.num_tokens() - copied;
        token_outcome = copied == target.vocab.num_tokens() ? "transferred"
                        : copied > 0                        ? "partially transferred"
                                                            : "reinitialized";
    }
    report.outcomes.emplace_back(LayerId::token_emb, token_outcome);

    // Character embedding: same remap by codepoint; the reserved PAD and UNK
    // rows are shared by construction and always copy.
    std::string char_outcome = "reinitialized";
    if (plan.contains(LayerId::char_emb)) {
        require(source.hp.char_emb_dim == target.hp.char_emb_dim,
                "transfer: char embedding dim mismatch");
        std::size_t copied = 0;
        for (std::size_t id = 0; id < target.vocab.num_chars(); ++id) {
            int src_id = -1;
            if (id == Vocabulary::pad_id || id == Vocabulary::unk_id) {
                src_id = static_cast<int>(id);
            } else {
                const auto it = source.vocab.char_to_id.find(target.vocab.char_by_id[id]);
                if (it != source.vocab.char_to_id.end()) src_id = it->second;
            }
            if (src_id < 0) continue;
            const auto src = source.params.char_emb.table.row(static_cast<std::size_t>(src_id));
            const auto dst = target.params.char_emb.table.row(id);
            std::copy(src.begin(), src.end(), dst.begin());
            ++copied;
        }
        report.char_rows_transferred = copied;
        report.char_rows_reinitialized = target.vocab.num_chars() - copied;
        char_outcome = copied == target.vocab.num_chars() ? "transferred"
                       : copied > 0                       ? "partially transferred"
                                                          : "reinitialized";
    }
    report.outcomes.emplace_back(LayerId::char_emb, char_outcome);

    if (plan.contains(LayerId::char_lstm)) {
        check_lstm_dims(source.params.char_lstm_fwd, target.params.char_lstm_fwd, "char LSTM");
        target.params.char_lstm_fwd = source.params.char_lstm_fwd;
        target.params.char_lstm_bwd = source.params.char_lstm_bwd;
        report.outcomes.emplace_back(LayerId::char_lstm, "transferred");
    } else {
        report.outcomes.emplace_back(LayerId::char_lstm, "reinitialized");
    }

    if (plan.contains(LayerId::token_lstm)) {
        check_lstm_dims(source.params.token_lstm_fwd, target.params.token_lstm_fwd, "token LSTM");
        target.params.token_lstm_fwd = source.params.token_lstm_fwd;
        target.params.token_lstm_bwd = source.params.token_lstm_bwd;
        report.outcomes.emplace_back(LayerId::token_lstm, "transferred");
    } else {
        report.outcomes.emplace_back(LayerId::token_lstm, "reinitialized");
    }

    // Label-indexed layers copy only when the label sets match exactly.
    const bool copy_label_layers = labels_identical;
    if (plan.contains(LayerId::dense) && copy_label_layers) {
        require(source.params.dense.w.rows == target.params.dense.w.rows &&
                    source.params.dense.w.cols == target.params.dense.w.cols,
                "transfer: dense dimension mismatch");
        target.params.dense = source.params.dense;
        report.outcomes.emplace_back(LayerId::dense, "transferred");
    } else {
        report.outcomes.emplace_back(LayerId::dense, "reinitialized");
    }
    if (plan.contains(LayerId::seq_opt) && copy_label_layers) {
        target.params.transitions = source.params.transitions;
        report.outcomes.emplace_back(LayerId::seq_opt, "transferred");
    } else {
        report.outcomes.emplace_back(LayerId::seq_opt, "reinitialized");
    }

    if (!label_layer_planned) {
        report.label_layer_disposition = "not planned";
    } else if (copy_label_layers) {
        report.label_layer_disposition = "copied";
    } else {
        report.label_layer_disposition = "reinitialized (label vocabularies differ)";
    }
    return report;
}

std::vector<TransferPlan> prefix_plans() {
    std::vector<TransferPlan> plans(7);
    for (int k = 1; k <= kNumLayers; ++k)
        for (int layer = 1; layer <= k; ++layer)
            plans[static_cast<std::size_t>(k)].layers.insert(static_cast<LayerId>(layer));
    return plans;
}

}  // namespace nertl
