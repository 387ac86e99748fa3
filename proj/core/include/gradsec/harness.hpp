#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradsec/data.hpp"
#include "gradsec/nn.hpp"
#include "gradsec/outcome.hpp"
#include "gradsec/shield.hpp"
#include "gradsec/tune.hpp"

namespace gradsec {

// Attack stage wired to a run. Defaults follow the canonical pairings:
// reconstruction on the tiny net, membership with a logistic scorer,
// property inference with a forest over snapshot deltas.
struct AttackConfig {
    std::string kind = "none";  // none | dria | mia | dpia

    // dria
    std::string optimizer = "adam";  // adam | lbfgs
    int iterations = 400;
    double step = 0.1;
    double fd_step = 1e-3;

    // mia
    int members = 128;
    int nonmembers = 128;

    // dpia
    int aux_batches = 2;         // attacker batches per class per cycle
    double presence_prob = 0.5;  // chance the victim trains on flagged data in a cycle
    int pool_rows = 64;          // rows per property pool (victim and attacker each)

    // attack-model family; empty picks logistic for mia, forest for dpia
    std::string model_family;
    int model_epochs = 200;
    double model_lr = 0.5;
    double model_l2 = 1e-4;
    int trees = 100;
    int max_depth = 4;
    int min_leaf = 2;
};

struct ExperimentConfig {
    std::string name = "custom";
    std::string model = "tiny";         // lenet5 | alexnet | tiny
    std::string activation = "sigmoid";

    std::string dataset_kind = "synth";  // synth | cifar10 | cifar100
    std::string dataset_path;            // cifar binary batch file
    int take = 0;                        // optional row cap for cifar (0 = all)
    SynthSpec synth;
    int samples = 64;                    // synth rows for plain/dria runs

    int clients = 1;
    std::string partition_mode = "iid";
    TrainConfig train;
    int cycles = 1;

    std::string policy = "none";
    AttackConfig attack;

    std::uint64_t seed = 1;
    std::string out_dir = "runs";
    bool save_traces = true;
    bool save_snapshots = true;
    int threads = 0;  // sweep workers; 0 defers to GRADSEC_THREADS

    void validate() const;
    std::string to_json_text() const;
    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
};

// canonical configurations, one per attack/policy pairing plus baselines
const std::vector<std::string>& preset_names();
ExperimentConfig make_preset(const std::string& name);

struct MetricsRow {
    int cycle = 0;
    std::string protected_layers;  // "2|5" or "-"
    int window_location = 0;
    std::uint64_t footprint_bytes = 0;
    double mean_loss = 0.0;
};

struct RunReport {
    std::string run_dir;
    std::vector<MetricsRow> rows;
    AttackOutcome outcome;
};

// Executes one full experiment: dataset, FL cycles under the policy, then the
// configured attack. Writes metrics.csv, outcome.json, meta.json, snapshots/
// and traces/ under <out_dir>/<name>_seed<seed>/.
RunReport run_experiment(const ExperimentConfig& cfg);

struct SweepPoint {
    std::string policy;
    std::uint64_t seed = 0;
    std::string status;  // "ok" or the error message
    double value = 0.0;
    std::string metric;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepPoint> points;
    std::string table_path;    // per-run rows
    std::string summary_path;  // per-policy mean/stddev
};

// Policy axes: static_single, static_prefix, static_suffix, dynamic_size.
// Runs every (policy, seed) combination on a worker pool bounded by
// GRADSEC_THREADS (or cfg.threads when positive).
SweepResult sweep_layers(const ExperimentConfig& base, const std::string& axis, int seeds,
                         const std::string& out_dir);

// Defender tuning flow: an unprotected property-inference run generates
// reference gradients; even cycles train, odd cycles validate; the candidate
// grid is scored and the winner reported.
struct VmwStudy {
    std::vector<std::vector<double>> candidates;
    VmwTuneResult result;
    std::string report_path;
};
VmwStudy run_tune_vmw(const ExperimentConfig& base, int window_size, int candidate_count,
                      const std::string& out_dir);

int effective_threads(int requested);  // GRADSEC_THREADS / hardware fallback

}  // namespace gradsec
