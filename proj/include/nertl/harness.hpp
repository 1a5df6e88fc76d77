#pragma once

#include <filesystem>
#include <optional>

#include "nertl/config.hpp"
#include "nertl/synth.hpp"
#include "nertl/transfer.hpp"

namespace nertl {

// Grid definition for the two experiments.
struct ExperimentConfig {
    std::vector<uint64_t> seeds = {1, 2, 3};
    std::vector<double> fractions = {0.05, 0.10, 0.20, 0.40, 0.60};
    Hyperparameters hp;
    SynthSpec synth;
    std::filesystem::path out_dir;
    int jobs = 1;  // level of run parallelism; results are order-independent

    void validate() const;
};

// One completed grid run.
struct ResultRow {
    std::string experiment;  // "experiment1" or "experiment2"
    uint64_t seed = 0;
    double fraction = 0.0;
    std::string plan;  // "baseline", "transfer" or a layer count
    int num_layers = 0;
    double dev_f1 = 0.0;
    double test_f1 = 0.0;
    int epochs_run = 0;
    double wall_seconds = 0.0;  // logged to stderr, never written to the CSV
    std::string status = "ok";
};

Hyperparameters hyperparameters_from_config(const KvConfig& cfg);
ExperimentConfig load_experiment_config(const KvConfig& cfg);

// Train (or load the cached) source model for one seed; the checkpoint is
// stored under out_dir and shared by both experiments.
Checkpoint source_checkpoint(const ExperimentConfig& cfg, const SyntheticData& data,
                             uint64_t seed);

// Baseline vs full transfer at every (seed, fraction); writes
// out_dir/experiment1.csv with columns
// fraction,condition,seed,test_f1,dev_f1,epochs,status.
std::vector<ResultRow> run_experiment1(const ExperimentConfig& cfg);

// Layer-prefix sweep, 7 plans per (seed, fraction); writes
// out_dir/experiment2.csv with columns
// fraction,num_layers_transferred,seed,test_f1,dev_f1,epochs,status.
std::vector<ResultRow> run_experiment2(const ExperimentConfig& cfg);

// One target-side training run (the unit both experiments grid over);
// num_layers = 0 is the baseline. Deterministic given (seed, fraction,
// num_layers) regardless of execution order.
ResultRow run_target_once(const SyntheticData& data, const Checkpoint* source,
                          const Hyperparameters& hp, uint64_t seed, double fraction,
                          int num_layers, const std::string& experiment);

// Full command-line surface; args exclude the program name. Returns the
// process exit code and reports categorized errors on stderr.
int run_cli(const std::vector<std::string>& args);

}  // namespace nertl
