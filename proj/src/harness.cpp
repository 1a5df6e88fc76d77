#include "nertl/harness.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

namespace nertl {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

std::string fraction_str(double fraction) { return fmt("%g", fraction); }

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string csv_safe(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

// Runs tasks on `jobs` threads, delivering results to on_done on the calling
// thread in index order. Keeps CSV output bytes independent of scheduling.
template <class T>
void run_ordered(std::vector<std::function<T()>>& tasks, int jobs,
                 const std::function<void(std::size_t, T&)>& on_done) {
    const std::size_t n = tasks.size();
    if (n == 0) return;
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));

    std::vector<std::optional<T>> results(n);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            T r = tasks[i]();
            {
                std::lock_guard<std::mutex> lock(mu);
                results[i] = std::move(r);
            }
            cv.notify_all();
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) threads.emplace_back(worker);

    for (std::size_t i = 0; i < n; ++i) {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait(lock, [&]() { return results[i].has_value(); });
        on_done(i, *results[i]);
    }
    for (auto& t : threads) t.join();
}

Corpus concat_splits(const SplitCorpus& s) {
    Corpus all;
    for (const Corpus* c : {&s.train, &s.dev, &s.test})
        for (const auto& doc : c->documents) all.documents.push_back(doc);
    rebuild_label_inventory(all);
    return all;
}

TransferPlan prefix_plan(int num_layers, LabelPolicy policy = LabelPolicy::require_identical) {
    TransferPlan plan;
    plan.label_policy = policy;
    for (int layer = 1; layer <= num_layers; ++layer)
        plan.layers.insert(static_cast<LayerId>(layer));
    return plan;
}

double test_entity_f1(const NerModel& model, const Corpus& test) {
    return entity_prf(corpus_labels(test), predict_corpus(model, test)).f1;
}

}  // namespace

void ExperimentConfig::validate() const {
    require(!seeds.empty(), "experiment config: seeds must be nonempty");
    require(!fractions.empty(), "experiment config: fractions must be nonempty");
    for (double f : fractions)
        require(f > 0.0 && f <= 0.6 + 1e-12, "experiment config: fraction outside (0, 0.6]");
    require(!out_dir.empty(), "experiment config: out directory required");
    hp.validate();
}

Hyperparameters hyperparameters_from_config(const KvConfig& cfg) {
    Hyperparameters hp;
    hp.token_emb_dim = static_cast<std::size_t>(cfg.get_int("token_emb_dim", static_cast<int64_t>(hp.token_emb_dim)));
    hp.char_emb_dim = static_cast<std::size_t>(cfg.get_int("char_emb_dim", static_cast<int64_t>(hp.char_emb_dim)));
    hp.char_lstm_hidden = static_cast<std::size_t>(cfg.get_int("char_lstm_hidden", static_cast<int64_t>(hp.char_lstm_hidden)));
    hp.token_lstm_hidden = static_cast<std::size_t>(cfg.get_int("token_lstm_hidden", static_cast<int64_t>(hp.token_lstm_hidden)));
    hp.learning_rate = cfg.get_double("learning_rate", hp.learning_rate);
    hp.dropout_rate = cfg.get_double("dropout_rate", hp.dropout_rate);
    hp.grad_clip_norm = cfg.get_double("grad_clip_norm", hp.grad_clip_norm);
    hp.max_epochs = static_cast<int>(cfg.get_int("max_epochs", hp.max_epochs));
    hp.patience = static_cast<int>(cfg.get_int("patience", hp.patience));
    hp.seed = cfg.get_u64("seed", hp.seed);
    hp.bidirectional = cfg.get_bool("bidirectional", hp.bidirectional);
    hp.min_token_freq = static_cast<int>(cfg.get_int("min_token_freq", hp.min_token_freq));
    hp.validate();
    return hp;
}

ExperimentConfig load_experiment_config(const KvConfig& cfg) {
    ExperimentConfig ec;
    if (cfg.has("seeds")) ec.seeds = cfg.get_u64s("seeds");
    if (cfg.has("fractions")) ec.fractions = cfg.get_doubles("fractions");
    ec.jobs = static_cast<int>(cfg.get_int("jobs", ec.jobs));
    ec.hp = hyperparameters_from_config(cfg);
    if (cfg.has("spec_file")) {
        ec.synth = load_synth_spec(KvConfig::parse_file(cfg.get_or("spec_file", "")));
    } else {
        ec.synth = load_synth_spec(cfg);
    }
    if (cfg.has("out")) ec.out_dir = cfg.get_or("out", "");
    return ec;
}

Checkpoint source_checkpoint(const ExperimentConfig& cfg, const SyntheticData& data,
                             uint64_t seed) {
    const fs::path path = cfg.out_dir / ("source_seed" + std::to_string(seed) + ".ckpt");
    if (fs::exists(path)) return load_checkpoint(path);

    const auto t0 = std::chrono::steady_clock::now();
    SeededRng rng = SeededRng(seed).fork("source");
    Vocabulary vocab = build_vocabulary(data.source.train, cfg.hp.min_token_freq);
    Hyperparameters hp = cfg.hp;
    hp.seed = seed;
    SeededRng init_rng = rng.fork("init");
    NerModel model = NerModel::init(std::move(vocab), hp, init_rng);
    SeededRng fit_rng = rng.fork("fit");
    const TrainingReport report = fit(model, data.source.train, data.source.dev, fit_rng);
    save_checkpoint(model, path);
    std::cerr << fmt("[source] seed=%llu dev_f1=%.4f epochs=%zu (%.1fs)\n",
                     static_cast<unsigned long long>(seed), report.best_dev_f1,
                     report.epochs.size(), elapsed_seconds(t0));
    return load_checkpoint(path);
}

ResultRow run_target_once(const SyntheticData& data, const Checkpoint* source,
                          const Hyperparameters& hp, uint64_t seed, double fraction,
                          int num_layers, const std::string& experiment) {
    ResultRow row;
    row.experiment = experiment;
    row.seed = seed;
    row.fraction = fraction;
    row.num_layers = num_layers;
    row.plan = num_layers == 0 ? "baseline" : prefix_plan(num_layers).describe();

    const auto t0 = std::chrono::steady_clock::now();
    try {
        // The fork label depends only on (fraction, layers); together with
        // the seed it pins the run's whole random stream, so experiment 1
        // baselines and experiment 2 zero-layer rows are bit-identical.
        const std::string label =
            "target/frac=" + fraction_str(fraction) + "/layers=" + std::to_string(num_layers);
        const SeededRng run_rng = SeededRng(seed).fork(label);

        const Corpus sub = subsample_train(data.target.train, fraction, seed);
        Vocabulary vocab = build_vocabulary(sub, hp.min_token_freq);
        Hyperparameters run_hp = hp;
        run_hp.seed = seed;
        SeededRng init_rng = run_rng.fork("init");
        NerModel model = NerModel::init(std::move(vocab), run_hp, init_rng);

        if (num_layers > 0) {
            require(source != nullptr, "transfer run requires a source checkpoint");
            transfer_parameters(*source, model, prefix_plan(num_layers));
        }

        SeededRng fit_rng = run_rng.fork("fit");
        const TrainingReport report = fit(model, sub, data.target.dev, fit_rng);
        row.dev_f1 = report.best_dev_f1;
        row.epochs_run = static_cast<int>(report.epochs.size());
        row.test_f1 = test_entity_f1(model, data.target.test);
    } catch (const std::exception& e) {
        row.status = csv_safe(std::string("error: ") + e.what());
    }
    row.wall_seconds = elapsed_seconds(t0);
    return row;
}

namespace {

void write_meta(const ExperimentConfig& cfg, const std::string& experiment) {
    std::ofstream out(cfg.out_dir / (experiment + ".meta.txt"), std::ios::trunc);
    out << "experiment = " << experiment << "\n";
    out << "seeds =";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
        out << (i ? "," : " ") << cfg.seeds[i];
    out << "\nfractions =";
    for (std::size_t i = 0; i < cfg.fractions.size(); ++i)
        out << (i ? "," : " ") << fraction_str(cfg.fractions[i]);
    out << "\nreplicates = " << cfg.seeds.size()
        << "\naggregate = mean over seeds per grid cell\n";
    out << "source_notes = " << cfg.synth.source_notes << "\n";
    out << "target_notes = " << cfg.synth.target_notes << "\n";
    out << fmt("lexical_shift = %g\n", cfg.synth.lexical_shift);
}

std::vector<ResultRow> run_experiment_grid(const ExperimentConfig& cfg,
                                           const std::string& experiment,
                                           const std::vector<int>& layer_variants,
                                           const std::string& header,
                                           const std::function<std::string(const ResultRow&)>& to_csv) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    const SyntheticData data = generate_synthetic(cfg.synth);

    // Source models are trained once per seed and shared by both experiments.
    std::unordered_map<uint64_t, Checkpoint> sources;
    const bool need_source =
        std::any_of(layer_variants.begin(), layer_variants.end(), [](int k) { return k > 0; });
    if (need_source) {
        std::vector<std::function<Checkpoint()>> tasks;
        for (uint64_t seed : cfg.seeds)
            tasks.push_back([&cfg, &data, seed]() { return source_checkpoint(cfg, data, seed); });
        run_ordered<Checkpoint>(tasks, cfg.jobs, [&](std::size_t i, Checkpoint& ckpt) {
            sources.emplace(cfg.seeds[i], std::move(ckpt));
        });
    }

    struct Cell {
        uint64_t seed;
        double fraction;
        int layers;
    };
    std::vector<Cell> grid;
    for (uint64_t seed : cfg.seeds)
        for (double fraction : cfg.fractions)
            for (int layers : layer_variants) grid.push_back({seed, fraction, layers});

    std::vector<std::function<ResultRow()>> tasks;
    tasks.reserve(grid.size());
    for (const Cell& cell : grid) {
        const Checkpoint* src = cell.layers > 0 ? &sources.at(cell.seed) : nullptr;
        tasks.push_back([&data, src, &cfg, cell, &experiment]() {
            return run_target_once(data, src, cfg.hp, cell.seed, cell.fraction, cell.layers,
                                   experiment);
        });
    }

    write_meta(cfg, experiment);
    std::ofstream csv(cfg.out_dir / (experiment + ".csv"), std::ios::trunc);
    if (!csv) throw IoError("cannot write experiment csv in " + cfg.out_dir.string());
    csv << header << "\n";
    csv.flush();

    std::vector<ResultRow> rows(grid.size());
    run_ordered<ResultRow>(tasks, cfg.jobs, [&](std::size_t i, ResultRow& row) {
        csv << to_csv(row) << "\n";
        csv.flush();  // row-level atomicity: a killed sweep leaves whole rows
        std::cerr << fmt("[%s] seed=%llu frac=%s layers=%d test_f1=%.4f (%.1fs) %s\n",
                         experiment.c_str(), static_cast<unsigned long long>(row.seed),
                         fraction_str(row.fraction).c_str(), row.num_layers, row.test_f1,
                         row.wall_seconds, row.status.c_str());
        rows[i] = std::move(row);
    });
    return rows;
}

std::string exp1_row(const ResultRow& r) {
    const std::string condition = r.num_layers == 0 ? "baseline" : "transfer";
    if (r.status != "ok")
        return fraction_str(r.fraction) + "," + condition + "," + std::to_string(r.seed) + ",,,," +
               r.status;
    return fraction_str(r.fraction) + "," + condition + "," + std::to_string(r.seed) + "," +
           fmt("%.6f,%.6f,%d,", r.test_f1, r.dev_f1, r.epochs_run) + r.status;
}

std::string exp2_row(const ResultRow& r) {
    if (r.status != "ok")
        return fraction_str(r.fraction) + "," + std::to_string(r.num_layers) + "," +
               std::to_string(r.seed) + ",,,," + r.status;
    return fraction_str(r.fraction) + "," + std::to_string(r.num_layers) + "," +
           std::to_string(r.seed) + "," + fmt("%.6f,%.6f,%d,", r.test_f1, r.dev_f1, r.epochs_run) +
           r.status;
}

}  // namespace

std::vector<ResultRow> run_experiment1(const ExperimentConfig& cfg) {
    return run_experiment_grid(cfg, "experiment1", {0, 6},
                               "fraction,condition,seed,test_f1,dev_f1,epochs,status", exp1_row);
}

std::vector<ResultRow> run_experiment2(const ExperimentConfig& cfg) {
    return run_experiment_grid(
        cfg, "experiment2", {0, 1, 2, 3, 4, 5, 6},
        "fraction,num_layers_transferred,seed,test_f1,dev_f1,epochs,status", exp2_row);
}

// ---------------------------------------------------------------------------
// CLI
// ---------------------------------------------------------------------------

namespace {

TransferPlan parse_plan(const std::string& text, LabelPolicy policy) {
    TransferPlan plan;
    plan.label_policy = policy;
    if (text == "none" || text == "0") return plan;
    if (text.find(',') == std::string::npos) {
        // A single integer k means the prefix {1..k}.
        int k = 0;
        try {
            k = std::stoi(text);
        } catch (const std::exception&) {
            throw ParseError("bad --plan value: " + text);
        }
        require(k >= 0 && k <= kNumLayers, "--plan prefix must be in 0..6");
        return prefix_plan(k, policy);
    }
    for (const auto& item : split_list(text, ',')) {
        int layer = 0;
        try {
            layer = std::stoi(item);
        } catch (const std::exception&) {
            throw ParseError("bad --plan layer: " + item);
        }
        require(layer >= 1 && layer <= kNumLayers, "--plan layers must be in 1..6");
        plan.layers.insert(static_cast<LayerId>(layer));
    }
    return plan;
}

Hyperparameters cli_hyperparameters(const std::string& config_path, std::optional<uint64_t> seed) {
    KvConfig cfg;
    if (!config_path.empty()) cfg = KvConfig::parse_file(config_path);
    Hyperparameters hp = hyperparameters_from_config(cfg);
    if (seed) hp.seed = *seed;
    return hp;
}

int cmd_gen_corpus(const std::string& spec_path, const std::string& out_dir,
                   std::optional<uint64_t> seed) {
    KvConfig cfg;
    if (!spec_path.empty()) cfg = KvConfig::parse_file(spec_path);
    if (seed) cfg.set("seed", std::to_string(*seed));
    const SynthSpec spec = load_synth_spec(cfg);
    const SyntheticData data = generate_synthetic(spec);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_column_file(data.source.train, dir / "source_train.txt");
    write_column_file(data.source.dev, dir / "source_dev.txt");
    write_column_file(data.source.test, dir / "source_test.txt");
    write_column_file(data.target.train, dir / "target_train.txt");
    write_column_file(data.target.dev, dir / "target_dev.txt");
    write_column_file(data.target.test, dir / "target_test.txt");

    for (const auto& [name, split] : {std::pair{"source", &data.source}, {"target", &data.target}}) {
        std::ofstream stats(dir / (std::string(name) + "_stats.txt"), std::ios::trunc);
        stats << corpus_stats_to_text(corpus_stats(concat_splits(*split)));
    }
    std::cout << "wrote source/target train,dev,test and stats under " << out_dir << "\n";
    return 0;
}

int cmd_corpus_stats(const std::string& in_path) {
    std::cout << corpus_stats_to_text(corpus_stats(read_column_file(in_path)));
    return 0;
}

int cmd_train(const std::string& train_path, const std::string& dev_path,
              const std::string& out_path, const std::string& config_path,
              std::optional<uint64_t> seed) {
    const Hyperparameters hp = cli_hyperparameters(config_path, seed);
    const Corpus train = read_column_file(train_path);
    const Corpus dev = read_column_file(dev_path);

    SeededRng rng(hp.seed);
    Vocabulary vocab = build_vocabulary(train, hp.min_token_freq);
    SeededRng init_rng = rng.fork("init");
    NerModel model = NerModel::init(std::move(vocab), hp, init_rng);
    SeededRng fit_rng = rng.fork("fit");
    const TrainingReport report = fit(model, train, dev, fit_rng);
    save_checkpoint(model, out_path);
    std::cout << report.to_text();
    std::cout << "checkpoint = " << out_path << "\n";
    return 0;
}

int cmd_transfer_train(const std::string& source_path, const std::string& train_path,
                       const std::string& dev_path, const std::string& plan_text,
                       const std::string& label_policy_text, const std::string& out_path,
                       const std::string& config_path, std::optional<uint64_t> seed) {
    const LabelPolicy policy = label_policy_text == "reinit" ? LabelPolicy::reinit_label_layers
                                                             : LabelPolicy::require_identical;
    const TransferPlan plan = parse_plan(plan_text, policy);
    const Hyperparameters hp = cli_hyperparameters(config_path, seed);
    const Corpus train = read_column_file(train_path);
    const Corpus dev = read_column_file(dev_path);
    const Checkpoint source = load_checkpoint(source_path);

    SeededRng rng(hp.seed);
    Vocabulary vocab = build_vocabulary(train, hp.min_token_freq);
    SeededRng init_rng = rng.fork("init");
    NerModel model = NerModel::init(std::move(vocab), hp, init_rng);
    const TransferReport transfer_report = transfer_parameters(source, model, plan);
    SeededRng fit_rng = rng.fork("fit");
    const TrainingReport report = fit(model, train, dev, fit_rng);
    save_checkpoint(model, out_path);
    std::cout << transfer_report.to_text();
    std::cout << report.to_text();
    std::cout << "checkpoint = " << out_path << "\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& in_path,
                const std::string& out_path) {
    const NerModel model = model_from_checkpoint(load_checkpoint(model_path));
    Corpus corpus = read_column_file(in_path);
    for (auto& doc : corpus.documents) {
        for (auto& sentence : doc.sentences) {
            const std::vector<std::string> labels = predict_labels(model, sentence);
            for (std::size_t t = 0; t < sentence.size(); ++t) sentence[t].label = labels[t];
        }
    }
    rebuild_label_inventory(corpus);
    write_column_file(corpus, out_path);
    std::cout << "wrote predictions to " << out_path << "\n";
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& in_path) {
    const NerModel model = model_from_checkpoint(load_checkpoint(model_path));
    const Corpus gold = read_column_file(in_path);
    for (const auto& label : gold.label_inventory)
        require(model.vocab.label_to_id.contains(label),
                "evaluate: corpus label not in model label set: " + label);
    const LabelSeqs gold_labels = corpus_labels(gold);
    const LabelSeqs pred_labels = predict_corpus(model, gold);
    std::cout << metrics_to_text(entity_prf(gold_labels, pred_labels),
                                 binary_phi_prf(gold_labels, pred_labels),
                                 token_accuracy(gold_labels, pred_labels));
    return 0;
}

int cmd_experiment(int which, const std::string& config_path, const std::string& out_dir,
                   const std::string& seeds_csv, const std::string& fractions_csv, int jobs) {
    KvConfig cfg;
    if (!config_path.empty()) cfg = KvConfig::parse_file(config_path);
    if (!out_dir.empty()) cfg.set("out", out_dir);
    if (!seeds_csv.empty()) cfg.set("seeds", seeds_csv);
    if (!fractions_csv.empty()) cfg.set("fractions", fractions_csv);
    if (jobs > 0) cfg.set("jobs", std::to_string(jobs));
    const ExperimentConfig ec = load_experiment_config(cfg);
    const auto rows = which == 1 ? run_experiment1(ec) : run_experiment2(ec);
    std::size_t failed = 0;
    for (const auto& row : rows)
        if (row.status != "ok") ++failed;
    std::cout << "experiment" << which << ": " << rows.size() << " rows, " << failed
              << " failed; csv = " << (ec.out_dir / ("experiment" + std::to_string(which) + ".csv")).string()
              << "\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"LSTM-CRF de-identification tagger with layer-prefix transfer learning"};
    app.require_subcommand(1);

    std::string spec_path, out_path, in_path, train_path, dev_path, model_path, source_path;
    std::string config_path, plan_text = "6", label_policy = "require", seeds_csv, fractions_csv;
    std::optional<uint64_t> seed;
    int jobs = 0;

    auto* gen = app.add_subcommand("gen-corpus", "Generate the synthetic source/target corpora");
    gen->add_option("--spec", spec_path, "synthetic spec file (key = value)");
    gen->add_option("--out", out_path, "output directory")->required();
    gen->add_option("--seed", seed, "override the spec seed");

    auto* stats = app.add_subcommand("corpus-stats", "Print Table-1-style stats for a corpus");
    stats->add_option("--in", in_path, "column-format corpus")->required();

    auto* train = app.add_subcommand("train", "Train a model from scratch");
    train->add_option("--train", train_path, "train corpus")->required();
    train->add_option("--dev", dev_path, "dev corpus for early stopping")->required();
    train->add_option("--out", out_path, "output checkpoint")->required();
    train->add_option("--config", config_path, "hyperparameter file (key = value)");
    train->add_option("--seed", seed, "training seed");

    auto* transfer = app.add_subcommand("transfer-train", "Initialize from a source checkpoint, then train");
    transfer->add_option("--source", source_path, "source checkpoint")->required();
    transfer->add_option("--train", train_path, "target train corpus")->required();
    transfer->add_option("--dev", dev_path, "target dev corpus")->required();
    transfer->add_option("--plan", plan_text,
                         "layer prefix count 0..6, 'none', or explicit list like 1,2,5");
    transfer->add_option("--label-policy", label_policy, "require (default) or reinit");
    transfer->add_option("--out", out_path, "output checkpoint")->required();
    transfer->add_option("--config", config_path, "hyperparameter file");
    transfer->add_option("--seed", seed, "training seed");

    auto* predict_cmd = app.add_subcommand("predict", "Write a corpus with predicted labels");
    predict_cmd->add_option("--model", model_path, "checkpoint")->required();
    predict_cmd->add_option("--in", in_path, "input corpus")->required();
    predict_cmd->add_option("--out", out_path, "output corpus")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint against a gold corpus");
    evaluate->add_option("--model", model_path, "checkpoint")->required();
    evaluate->add_option("--in", in_path, "gold corpus")->required();

    auto* exp1 = app.add_subcommand("experiment1", "Train-fraction sweep, baseline vs transfer");
    auto* exp2 = app.add_subcommand("experiment2", "Layer-prefix sweep across fractions");
    for (CLI::App* e : {exp1, exp2}) {
        e->add_option("--config", config_path, "experiment config file");
        e->add_option("--out", out_path, "output directory");
        e->add_option("--seeds", seeds_csv, "comma-separated seed list");
        e->add_option("--fractions", fractions_csv, "comma-separated fractions in (0, 0.6]");
        e->add_option("--jobs", jobs, "parallel runs (default 1)");
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed()) return cmd_gen_corpus(spec_path, out_path, seed);
        if (stats->parsed()) return cmd_corpus_stats(in_path);
        if (train->parsed()) return cmd_train(train_path, dev_path, out_path, config_path, seed);
        if (transfer->parsed())
            return cmd_transfer_train(source_path, train_path, dev_path, plan_text, label_policy,
                                      out_path, config_path, seed);
        if (predict_cmd->parsed()) return cmd_predict(model_path, in_path, out_path);
        if (evaluate->parsed()) return cmd_evaluate(model_path, in_path);
        if (exp1->parsed())
            return cmd_experiment(1, config_path, out_path, seeds_csv, fractions_csv, jobs);
        if (exp2->parsed())
            return cmd_experiment(2, config_path, out_path, seeds_csv, fractions_csv, jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace nertl
