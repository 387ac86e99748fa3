#include "gradsec/harness.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "gradsec/dpia.hpp"
#include "gradsec/dria.hpp"
#include "gradsec/error.hpp"
#include "gradsec/flsim.hpp"
#include "gradsec/metrics.hpp"
#include "gradsec/mia.hpp"
#include "gradsec/model_io.hpp"
#include "gradsec/model_zoo.hpp"

namespace gradsec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// shortest round-trip decimal form; keeps CSV bytes reproducible
std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail("cannot open '" + path + "' for writing");
    os << text;
    if (!os) fail("write failed for '" + path + "'");
}

void check_known_keys(const json& j, const std::vector<std::string>& allowed,
                      const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const std::string& k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) fail("config: unknown field '" + it.key() + "' in " + where);
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    bool known_model = false;
    for (const std::string& m : model_names()) known_model |= (m == model);
    if (!known_model) fail("config: unknown model '" + model + "'");
    activation_from_string(activation);
    if (dataset_kind != "synth" && dataset_kind != "cifar10" && dataset_kind != "cifar100")
        fail("config: dataset_kind must be synth|cifar10|cifar100, got '" + dataset_kind + "'");
    if (dataset_kind != "synth" && dataset_path.empty())
        fail("config: dataset_path required for cifar datasets");
    if (dataset_kind == "synth") synth.validate();
    if (clients < 1) fail("config: clients must be >= 1");
    partition_mode_from_string(partition_mode);
    if (cycles < 1) fail("config: cycles must be >= 1");
    if (train.lr <= 0.0) fail("config: train.lr must be positive");
    if (train.batch_size < 1) fail("config: train.batch_size must be >= 1");
    if (train.epochs_per_cycle < 1) fail("config: train.epochs_per_cycle must be >= 1");
    ShieldPolicy::parse(policy);  // syntax check; bounds checked against the model later

    const AttackConfig& a = attack;
    if (a.kind != "none" && a.kind != "dria" && a.kind != "mia" && a.kind != "dpia")
        fail("config: attack.kind must be none|dria|mia|dpia, got '" + a.kind + "'");
    if (a.kind == "dria") {
        if (a.optimizer != "adam" && a.optimizer != "lbfgs")
            fail("config: attack.optimizer must be adam|lbfgs");
        if (a.iterations < 1) fail("config: attack.iterations must be >= 1");
        if (samples != 1 || train.batch_size != 1)
            fail("config: reconstruction runs need samples == 1 and train.batch_size == 1");
        if (dataset_kind != "synth") fail("config: reconstruction presets use synthetic data");
    }
    if (a.kind == "mia") {
        if (a.members < 2 || a.nonmembers < 2)
            fail("config: attack.members and attack.nonmembers must be >= 2");
        if (a.members < clients)
            fail("config: attack.members must cover every client with at least one row");
    }
    if (a.kind == "dpia") {
        if (!synth.with_property) fail("config: property inference needs synth.with_property");
        if (a.aux_batches < 1) fail("config: attack.aux_batches must be >= 1");
        if (a.presence_prob <= 0.0 || a.presence_prob >= 1.0)
            fail("config: attack.presence_prob must lie strictly inside (0, 1)");
        if (a.pool_rows < train.batch_size)
            fail("config: attack.pool_rows must cover train.batch_size");
        if (clients != 1) fail("config: property-inference runs use a single victim client");
        if (cycles < 4) fail("config: property inference needs several cycles");
    }
    if (!a.model_family.empty()) attack_family_from_string(a.model_family);
    if (samples < 1) fail("config: samples must be >= 1");
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["name"] = name;
    j["model"] = model;
    j["activation"] = activation;
    j["dataset"] = {{"kind", dataset_kind}};
    if (!dataset_path.empty()) j["dataset"]["path"] = dataset_path;
    if (take > 0) j["dataset"]["take"] = take;
    if (dataset_kind == "synth") {
        json s;
        s["classes"] = synth.classes;
        s["height"] = synth.height;
        s["width"] = synth.width;
        s["channels"] = synth.channels;
        s["prototype_seed"] = synth.prototype_seed;
        s["noise_sigma"] = synth.noise_sigma;
        s["with_property"] = synth.with_property;
        if (synth.with_property) {
            s["blend"] = synth.blend;
            s["prevalence"] = synth.prevalence;
        }
        j["dataset"]["synth"] = s;
        j["samples"] = samples;
    }
    j["clients"] = clients;
    j["partition"] = partition_mode;
    j["train"] = {{"lr", train.lr},
                  {"epochs_per_cycle", train.epochs_per_cycle},
                  {"batch_size", train.batch_size}};
    j["cycles"] = cycles;
    j["policy"] = policy;
    json a;
    a["kind"] = attack.kind;
    if (attack.kind == "dria") {
        a["optimizer"] = attack.optimizer;
        a["iterations"] = attack.iterations;
        a["step"] = attack.step;
        a["fd_step"] = attack.fd_step;
    } else if (attack.kind == "mia") {
        a["members"] = attack.members;
        a["nonmembers"] = attack.nonmembers;
    } else if (attack.kind == "dpia") {
        a["aux_batches"] = attack.aux_batches;
        a["presence_prob"] = attack.presence_prob;
        a["pool_rows"] = attack.pool_rows;
    }
    if (attack.kind == "mia" || attack.kind == "dpia") {
        a["model_family"] = attack.model_family;
        a["model_epochs"] = attack.model_epochs;
        a["model_lr"] = attack.model_lr;
        a["model_l2"] = attack.model_l2;
        a["trees"] = attack.trees;
        a["max_depth"] = attack.max_depth;
        a["min_leaf"] = attack.min_leaf;
    }
    j["attack"] = a;
    j["seed"] = seed;
    j["out"] = out_dir;
    j["save_traces"] = save_traces;
    j["save_snapshots"] = save_snapshots;
    if (threads > 0) j["threads"] = threads;
    return j.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("config: top level must be a JSON object");
    check_known_keys(j, {"name", "model", "activation", "dataset", "samples", "clients",
                         "partition", "train", "cycles", "policy", "attack", "seed", "out",
                         "save_traces", "save_snapshots", "threads"},
                     "the top level");
    ExperimentConfig cfg;
    try {
        cfg.name = j.value("name", cfg.name);
        cfg.model = j.value("model", cfg.model);
        cfg.activation = j.value("activation", cfg.activation);
        if (j.contains("dataset")) {
            const json& d = j["dataset"];
            check_known_keys(d, {"kind", "path", "take", "synth"}, "dataset");
            cfg.dataset_kind = d.value("kind", cfg.dataset_kind);
            cfg.dataset_path = d.value("path", cfg.dataset_path);
            cfg.take = d.value("take", cfg.take);
            if (d.contains("synth")) {
                const json& s = d["synth"];
                check_known_keys(s, {"classes", "height", "width", "channels", "prototype_seed",
                                     "noise_sigma", "with_property", "blend", "prevalence"},
                                 "dataset.synth");
                cfg.synth.classes = s.value("classes", cfg.synth.classes);
                cfg.synth.height = s.value("height", cfg.synth.height);
                cfg.synth.width = s.value("width", cfg.synth.width);
                cfg.synth.channels = s.value("channels", cfg.synth.channels);
                cfg.synth.prototype_seed = s.value("prototype_seed", cfg.synth.prototype_seed);
                cfg.synth.noise_sigma = s.value("noise_sigma", cfg.synth.noise_sigma);
                cfg.synth.with_property = s.value("with_property", cfg.synth.with_property);
                cfg.synth.blend = s.value("blend", cfg.synth.blend);
                cfg.synth.prevalence = s.value("prevalence", cfg.synth.prevalence);
            }
        }
        cfg.samples = j.value("samples", cfg.samples);
        cfg.clients = j.value("clients", cfg.clients);
        cfg.partition_mode = j.value("partition", cfg.partition_mode);
        if (j.contains("train")) {
            const json& t = j["train"];
            check_known_keys(t, {"lr", "epochs_per_cycle", "batch_size"}, "train");
            cfg.train.lr = t.value("lr", cfg.train.lr);
            cfg.train.epochs_per_cycle = t.value("epochs_per_cycle", cfg.train.epochs_per_cycle);
            cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
        }
        cfg.cycles = j.value("cycles", cfg.cycles);
        cfg.policy = j.value("policy", cfg.policy);
        if (j.contains("attack")) {
            const json& a = j["attack"];
            check_known_keys(a, {"kind", "optimizer", "iterations", "step", "fd_step", "members",
                                 "nonmembers", "aux_batches", "presence_prob", "pool_rows",
                                 "model_family", "model_epochs", "model_lr", "model_l2", "trees",
                                 "max_depth", "min_leaf"},
                             "attack");
            AttackConfig& k = cfg.attack;
            k.kind = a.value("kind", k.kind);
            k.optimizer = a.value("optimizer", k.optimizer);
            k.iterations = a.value("iterations", k.iterations);
            k.step = a.value("step", k.step);
            k.fd_step = a.value("fd_step", k.fd_step);
            k.members = a.value("members", k.members);
            k.nonmembers = a.value("nonmembers", k.nonmembers);
            k.aux_batches = a.value("aux_batches", k.aux_batches);
            k.presence_prob = a.value("presence_prob", k.presence_prob);
            k.pool_rows = a.value("pool_rows", k.pool_rows);
            k.model_family = a.value("model_family", k.model_family);
            k.model_epochs = a.value("model_epochs", k.model_epochs);
            k.model_lr = a.value("model_lr", k.model_lr);
            k.model_l2 = a.value("model_l2", k.model_l2);
            k.trees = a.value("trees", k.trees);
            k.max_depth = a.value("max_depth", k.max_depth);
            k.min_leaf = a.value("min_leaf", k.min_leaf);
        }
        cfg.seed = j.value("seed", cfg.seed);
        cfg.out_dir = j.value("out", cfg.out_dir);
        cfg.save_traces = j.value("save_traces", cfg.save_traces);
        cfg.save_snapshots = j.value("save_snapshots", cfg.save_snapshots);
        cfg.threads = j.value("threads", cfg.threads);
    } catch (const json::exception& e) {
        fail(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

// ---------------------------------------------------------------------------
// presets

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "dria-tiny-none",  "dria-tiny-first2", "mia-lenet5-none", "mia-lenet5-L5",
        "mia-lenet5-early", "dpia-synth-none",  "dpia-synth-mw2",
    };
    return names;
}

ExperimentConfig make_preset(const std::string& name) {
    ExperimentConfig cfg;
    cfg.name = name;
    if (name == "dria-tiny-none" || name == "dria-tiny-first2") {
        cfg.model = "tiny";
        cfg.activation = "sigmoid";
        cfg.synth = SynthSpec{};  // 4 classes, 8x8x1
        cfg.synth.noise_sigma = 0.15;
        cfg.samples = 1;
        cfg.clients = 1;
        cfg.cycles = 1;
        cfg.train = {0.25, 1, 1};
        cfg.policy = name == "dria-tiny-first2" ? "static:1,2" : "none";
        cfg.attack.kind = "dria";
        cfg.attack.optimizer = "lbfgs";  // converges orders of magnitude faster here
        cfg.attack.iterations = 400;
        cfg.attack.step = 0.1;
        return cfg;
    }
    if (name == "mia-lenet5-none" || name == "mia-lenet5-L5" || name == "mia-lenet5-early") {
        cfg.model = "lenet5";
        cfg.activation = "relu";
        cfg.synth.classes = 10;
        cfg.synth.height = 32;
        cfg.synth.width = 32;
        cfg.synth.channels = 3;
        cfg.synth.noise_sigma = 0.7;
        cfg.samples = 256;
        cfg.clients = 2;  // FedAvg across two clients keeps the fit stable seed to seed
        cfg.cycles = 60;
        cfg.train = {0.1, 2, 32};
        cfg.policy = name == "mia-lenet5-L5"      ? "static:5"
                     : name == "mia-lenet5-early" ? "static:1,2"
                                                  : "none";
        cfg.attack.kind = "mia";
        cfg.attack.members = 128;
        cfg.attack.nonmembers = 128;
        cfg.attack.model_family = "forest";
        cfg.save_traces = false;  // the attack probes the final model instead
        return cfg;
    }
    if (name == "dpia-synth-none" || name == "dpia-synth-mw2") {
        cfg.model = "lenet5";
        cfg.activation = "relu";
        cfg.synth.classes = 4;
        cfg.synth.height = 32;
        cfg.synth.width = 32;
        cfg.synth.channels = 3;
        cfg.synth.noise_sigma = 0.2;
        cfg.synth.with_property = true;
        // blend picked so the marker shows in every layer's gradient without
        // saturating the scorer; that is what separates static from dynamic arms
        cfg.synth.blend = 0.19;
        cfg.synth.prevalence = 0.5;  // pool construction overrides per pool
        cfg.clients = 1;
        cfg.cycles = 60;
        cfg.train = {0.1, 1, 8};
        cfg.policy = name == "dpia-synth-mw2" ? "dynamic:2" : "none";
        cfg.attack.kind = "dpia";
        cfg.attack.aux_batches = 4;
        cfg.attack.presence_prob = 0.5;
        cfg.attack.pool_rows = 64;
        cfg.attack.model_family = "forest";
        cfg.attack.trees = 150;
        cfg.attack.max_depth = 6;
        cfg.save_traces = false;  // snapshots carry the leak for this attack
        return cfg;
    }
    fail("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// run_experiment

namespace {

struct RunContext {
    ExperimentConfig cfg;
    fs::path dir;
    Model model;
    Dataset data;  // full dataset before partitioning (empty for dpia)
    AttackTrainConfig trainer;
};

AttackTrainConfig make_trainer(const ExperimentConfig& cfg, AttackFamily fallback) {
    AttackTrainConfig t;
    t.family = cfg.attack.model_family.empty()
                   ? fallback
                   : attack_family_from_string(cfg.attack.model_family);
    t.seed = mix_seed({cfg.seed, 0xa77c});
    t.epochs = cfg.attack.model_epochs;
    t.lr = cfg.attack.model_lr;
    t.l2 = cfg.attack.model_l2;
    t.trees = cfg.attack.trees;
    t.max_depth = cfg.attack.max_depth;
    t.min_leaf = cfg.attack.min_leaf;
    return t;
}

int dataset_classes(const ExperimentConfig& cfg) {
    if (cfg.dataset_kind == "synth") return cfg.synth.classes;
    return cfg.dataset_kind == "cifar10" ? 10 : 100;
}

Dataset build_dataset(const ExperimentConfig& cfg, int rows) {
    if (cfg.dataset_kind == "synth")
        return synth_generate(cfg.synth, rows, mix_seed({cfg.seed, 0xda7a}));
    Dataset d = load_cifar(cfg.dataset_path, cfg.dataset_kind == "cifar10"
                                                 ? CifarVariant::Cifar10
                                                 : CifarVariant::Cifar100);
    int want = cfg.take > 0 ? std::min(cfg.take, d.size()) : d.size();
    if (rows > 0) want = std::min(want, rows);
    if (want < d.size()) {
        std::vector<int> order(std::size_t(d.size()));
        for (int i = 0; i < d.size(); ++i) order[std::size_t(i)] = i;
        Rng rng = derive_rng(cfg.seed, kStreamHarness, 0x7a4e);
        rng.shuffle(order);
        order.resize(std::size_t(want));
        std::sort(order.begin(), order.end());
        d = d.subset(order);
    }
    return d;
}

void save_cycle_artifacts(const RunContext& ctx, const ServerState& server,
                          const CycleReport& report, const std::vector<ClientState>& clients) {
    if (ctx.cfg.save_traces) {
        for (std::size_t i = 0; i < report.traces.size(); ++i) {
            AttackerView view = client_view(report, clients, int(i));
            fs::path p = ctx.dir / "traces" /
                         ("cycle_" + std::to_string(report.cycle) + "_client_" +
                          std::to_string(report.traces[i].client_id) + ".trace");
            save_view(view, p.string());
        }
    }
    if (ctx.cfg.save_snapshots) {
        // server.global already holds the post-cycle weights
        fs::path p = ctx.dir / "snapshots" / ("cycle_" + std::to_string(server.cycle) + ".bin");
        save_model(server.global, p.string());
    }
}

MetricsRow cycle_metrics(const RunContext& ctx, const CycleReport& report) {
    MetricsRow row;
    row.cycle = report.cycle;
    row.protected_layers = report.pset.layers_str();
    row.window_location = report.pset.window_location;
    row.footprint_bytes =
        memory_footprint(ctx.model, report.pset, ctx.cfg.train.batch_size).bytes_total;
    double loss = 0.0;
    for (double v : report.client_loss) loss += v;
    row.mean_loss = loss / double(report.client_loss.size());
    return row;
}

AttackOutcome attack_dria(RunContext& ctx, const ServerState& server,
                          const std::vector<CycleReport>& reports,
                          const std::vector<ClientState>& clients) {
    Model snapshot0 = ctx.model;
    snapshot0.load_weights(server.snapshots[0]);
    AttackerView view = client_view(reports[0], clients, 0);
    DriaTarget target =
        make_dria_target(snapshot0, view, 0, mix_seed({ctx.cfg.seed, 0x5eed}));

    DriaConfig dc;
    dc.optimizer = ctx.cfg.attack.optimizer == "lbfgs" ? DriaConfig::Optimizer::LbfgsLite
                                                       : DriaConfig::Optimizer::Adam;
    dc.iterations = ctx.cfg.attack.iterations;
    dc.step = ctx.cfg.attack.step;
    dc.fd_step = ctx.cfg.attack.fd_step;
    dc.seed = mix_seed({ctx.cfg.seed, 0xd2ea});

    std::vector<int> first_row = {0};
    Batch truth = make_batch(clients[0].data, first_row);
    DriaResult res = dria(target, dc, &truth.X);

    fs::path recon = ctx.dir / "reconstruction.tns";
    save_tensor(res.reconstruction, recon.string());
    bool rgb = ctx.model.input_shape[2] == 3;
    save_image_preview(res.reconstruction, (ctx.dir / (rgb ? "reconstruction.ppm"
                                                           : "reconstruction.pgm")).string());
    save_image_preview(truth.X, (ctx.dir / (rgb ? "original.ppm" : "original.pgm")).string());
    std::string curve_csv = "iteration,match_loss\n";
    for (std::size_t i = 0; i < res.outcome.curve.size(); ++i)
        curve_csv += std::to_string(i) + "," + fmt_double(res.outcome.curve[i]) + "\n";
    write_text((ctx.dir / "curve.csv").string(), curve_csv);

    res.outcome.seed = ctx.cfg.seed;
    res.outcome.policy = ctx.cfg.policy;
    res.outcome.artifact_path = recon.string();
    return res.outcome;
}

// The scorer is fitted shadow-style on full-observability probe gradients
// (the attacker can always replicate the architecture offline); the deployed
// policy then redacts the probes it is scored on. A static policy therefore
// degrades a fixed scorer by deleting the columns it leaned on.
AttackOutcome attack_mia(RunContext& ctx, const ServerState& server,
                         const std::vector<CycleReport>& reports) {
    const ExperimentConfig& cfg = ctx.cfg;
    const ProtectedSet& pset = reports.back().pset;
    ProtectedSet open;
    open.cycle = pset.cycle;

    std::array<int, 3> shape = ctx.data.image_shape();
    std::size_t px = std::size_t(shape[0]) * shape[1] * shape[2];
    std::vector<AttackerView> shadow_probes, victim_probes;
    std::vector<std::uint8_t> shadow_flags, victim_flags;
    int seen_pos = 0, seen_neg = 0;
    for (int i = 0; i < ctx.data.size(); ++i) {
        Tensor img({1, shape[0], shape[1], shape[2]});
        std::copy_n(ctx.data.images.data.data() + std::size_t(i) * px, px, img.data.data());
        Tensor lab({1, ctx.data.classes()});
        std::copy_n(ctx.data.labels.data.data() + std::size_t(i) * ctx.data.classes(),
                    ctx.data.classes(), lab.data.data());
        std::uint8_t member = i < cfg.attack.members ? 1 : 0;
        int& seen = member ? seen_pos : seen_neg;
        bool shadow = (seen % 2 == 0);  // alternate examples into fit/score halves
        ++seen;
        RawTrace probe = probe_trace(server.global, img, lab, shadow ? open : pset);
        if (shadow) {
            shadow_probes.push_back(redact(probe, open));
            shadow_flags.push_back(member);
        } else {
            victim_probes.push_back(redact(probe, pset));
            victim_flags.push_back(member);
        }
    }
    GradDataset train = mia_build_dataset(ctx.model, shadow_probes, shadow_flags);
    GradDataset test = mia_build_dataset(ctx.model, victim_probes, victim_flags);
    train.check_compatible(test);

    AttackModel model = train_attack_model(impute_mean(train), ctx.trainer);
    std::vector<double> scores = model.score(impute_mean(test));
    AttackOutcome out;
    out.kind = "MIA";
    out.metric = "AUC";
    out.value = auc(scores, test.labels);
    out.seed = cfg.seed;
    out.policy = cfg.policy;
    return out;
}

AttackOutcome attack_dpia(RunContext& ctx, const ServerState& server,
                          const std::vector<ProtectedSet>& schedule,
                          const std::vector<std::uint8_t>& presence) {
    const ExperimentConfig& cfg = ctx.cfg;

    // the attacker samples its own pools from the shared generator spec
    SynthSpec prop_spec = cfg.synth;
    prop_spec.prevalence = 1.0;
    SynthSpec clean_spec = cfg.synth;
    clean_spec.prevalence = 0.0;
    std::uint64_t aux_seed = mix_seed({cfg.seed, 0xaab5});
    Dataset aux_prop_pool = synth_generate(prop_spec, cfg.attack.pool_rows, aux_seed);
    Dataset aux_clean_pool =
        synth_generate(clean_spec, cfg.attack.pool_rows, mix_seed({aux_seed, 1}));

    auto sample_batch = [&](const Dataset& pool, std::uint64_t tag, int cycle, int j) {
        Rng rng = derive_rng(mix_seed({cfg.seed, tag}), kStreamAttack, std::uint64_t(cycle),
                            std::uint64_t(j));
        std::vector<int> rows(std::size_t(pool.size()));
        for (int i = 0; i < pool.size(); ++i) rows[std::size_t(i)] = i;
        rng.shuffle(rows);
        rows.resize(std::size_t(cfg.train.batch_size));
        return make_batch(pool, rows);
    };
    std::vector<std::vector<Batch>> aux_prop(std::size_t(cfg.cycles));
    std::vector<std::vector<Batch>> aux_nonprop(std::size_t(cfg.cycles));
    for (int t = 0; t < cfg.cycles; ++t)
        for (int j = 0; j < cfg.attack.aux_batches; ++j) {
            aux_prop[std::size_t(t)].push_back(sample_batch(aux_prop_pool, 0x11aa, t, j));
            aux_nonprop[std::size_t(t)].push_back(sample_batch(aux_clean_pool, 0x22bb, t, j));
        }

    GradDataset refs =
        dpia_build_dataset(ctx.model, server.snapshots, aux_prop, aux_nonprop, schedule);
    GradDataset victim =
        dpia_victim_rows(ctx.model, server.snapshots, cfg.train.lr, schedule, presence);
    AttackOutcome out = dpia_run(refs, victim, ctx.trainer);
    out.seed = cfg.seed;
    out.policy = cfg.policy;
    return out;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    RunContext ctx;
    ctx.cfg = cfg;
    ctx.dir = fs::path(cfg.out_dir) / (cfg.name + "_seed" + std::to_string(cfg.seed));
    fs::create_directories(ctx.dir / "snapshots");
    fs::create_directories(ctx.dir / "traces");

    int classes = dataset_classes(cfg);
    ctx.model = make_model(cfg.model, classes, activation_from_string(cfg.activation),
                           mix_seed({cfg.seed, 0x10de1}));
    ShieldPolicy policy = ShieldPolicy::parse(cfg.policy);
    policy.validate(ctx.model.layer_count());
    ctx.trainer = make_trainer(cfg, cfg.attack.kind == "dpia" ? AttackFamily::Forest
                                                              : AttackFamily::Logistic);

    RunReport report;
    report.run_dir = ctx.dir.string();

    ServerState server = ServerState::init(ctx.model);
    Rng policy_rng = derive_rng(cfg.seed, kStreamPolicy);
    std::vector<CycleReport> reports;
    std::vector<ProtectedSet> schedule;
    std::vector<std::uint8_t> presence;
    std::vector<ClientState> clients;

    if (cfg.attack.kind == "dpia") {
        // per-cycle victim pool: flagged or clean, by a seeded presence coin
        SynthSpec prop_spec = cfg.synth;
        prop_spec.prevalence = 1.0;
        SynthSpec clean_spec = cfg.synth;
        clean_spec.prevalence = 0.0;
        std::uint64_t pool_seed = mix_seed({cfg.seed, 0xda7a});
        Dataset prop_pool = synth_generate(prop_spec, cfg.attack.pool_rows, pool_seed);
        Dataset clean_pool =
            synth_generate(clean_spec, cfg.attack.pool_rows, mix_seed({pool_seed, 1}));

        clients.resize(1);
        clients[0].id = 0;
        clients[0].seed = mix_seed({cfg.seed, 0xc0c0});
        if (cfg.save_snapshots)
            save_model(ctx.model, (ctx.dir / "snapshots" / "cycle_0.bin").string());
        for (int t = 0; t < cfg.cycles; ++t) {
            Rng coin = derive_rng(cfg.seed, kStreamHarness, 0xc01, std::uint64_t(t));
            bool has_prop = coin.uniform() < cfg.attack.presence_prob;
            presence.push_back(has_prop ? 1 : 0);
            const Dataset& pool = has_prop ? prop_pool : clean_pool;
            Rng pick = derive_rng(cfg.seed, kStreamHarness, 0x91c0, std::uint64_t(t));
            std::vector<int> rows(std::size_t(pool.size()));
            for (int i = 0; i < pool.size(); ++i) rows[std::size_t(i)] = i;
            pick.shuffle(rows);
            rows.resize(std::size_t(cfg.train.batch_size));
            std::sort(rows.begin(), rows.end());
            clients[0].data = pool.subset(rows);

            CycleReport cr = run_cycle(server, clients, cfg.train, policy, policy_rng);
            schedule.push_back(cr.pset);
            report.rows.push_back(cycle_metrics(ctx, cr));
            save_cycle_artifacts(ctx, server, cr, clients);
        }
        bool any = false, all = true;
        for (std::uint8_t p : presence) {
            any |= (p != 0);
            all &= (p != 0);
        }
        if (!any || all)
            fail("property presence labels are degenerate; change seed, cycles, or presence_prob");
        report.outcome = attack_dpia(ctx, server, schedule, presence);
    } else {
        int rows = cfg.attack.kind == "mia" ? cfg.attack.members + cfg.attack.nonmembers
                                            : cfg.samples;
        ctx.data = build_dataset(cfg, rows);

        Dataset train_side = ctx.data;
        if (cfg.attack.kind == "mia") {
            std::vector<int> member_rows(std::size_t(cfg.attack.members));
            for (int i = 0; i < cfg.attack.members; ++i) member_rows[std::size_t(i)] = i;
            train_side = ctx.data.subset(member_rows);
        }
        std::vector<Dataset> shards =
            partition(train_side, cfg.clients,
                      partition_mode_from_string(cfg.partition_mode), mix_seed({cfg.seed, 0x9a7}));
        clients.resize(std::size_t(cfg.clients));
        for (int c = 0; c < cfg.clients; ++c) {
            clients[std::size_t(c)].id = c;
            clients[std::size_t(c)].data = std::move(shards[std::size_t(c)]);
            clients[std::size_t(c)].seed = mix_seed({cfg.seed, 0xc0c0, std::uint64_t(c)});
        }

        if (cfg.save_snapshots)
            save_model(ctx.model, (ctx.dir / "snapshots" / "cycle_0.bin").string());
        for (int t = 0; t < cfg.cycles; ++t) {
            CycleReport cr = run_cycle(server, clients, cfg.train, policy, policy_rng);
            schedule.push_back(cr.pset);
            report.rows.push_back(cycle_metrics(ctx, cr));
            save_cycle_artifacts(ctx, server, cr, clients);
            reports.push_back(std::move(cr));
            if (cfg.attack.kind != "dria" && reports.size() > 1)
                reports.erase(reports.begin());  // only the last cycle is revisited
        }

        if (cfg.attack.kind == "dria")
            report.outcome = attack_dria(ctx, server, reports, clients);
        else if (cfg.attack.kind == "mia")
            report.outcome = attack_mia(ctx, server, reports);
        else {
            report.outcome.kind = "none";
            report.outcome.metric = "TrainLoss";
            report.outcome.value = report.rows.back().mean_loss;
            report.outcome.seed = cfg.seed;
            report.outcome.policy = cfg.policy;
        }
    }

    // metrics.csv
    std::string csv = "cycle,protected_layers,window_location,footprint_bytes,mean_loss\n";
    for (const MetricsRow& r : report.rows)
        csv += std::to_string(r.cycle) + "," + r.protected_layers + "," +
               std::to_string(r.window_location) + "," + fmt_u64(r.footprint_bytes) + "," +
               fmt_double(r.mean_loss) + "\n";
    write_text((ctx.dir / "metrics.csv").string(), csv);
    write_text((ctx.dir / "outcome.json").string(), report.outcome.to_json_text());

    json meta;
    meta["run_id"] = cfg.name + "_seed" + std::to_string(cfg.seed);
    meta["config"] = json::parse(cfg.to_json_text());
    meta["layer_count"] = ctx.model.layer_count();
    std::vector<std::string> descr;
    for (int l = 1; l <= ctx.model.layer_count(); ++l)
        descr.push_back(ctx.model.layers[std::size_t(l - 1)].spec.describe());
    meta["layers"] = descr;
    write_text((ctx.dir / "meta.json").string(), meta.dump(2) + "\n");
    return report;
}

// ---------------------------------------------------------------------------
// sweeps

int effective_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GRADSEC_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

namespace {

std::string sanitize(const std::string& policy) {
    std::string s;
    for (char c : policy) {
        if (c == ':') s += '-';
        else if (c == ',') s += '_';
        else if (c == '.') s += 'p';
        else s += c;
    }
    return s;
}

std::vector<std::string> axis_policies(const std::string& axis, int layers) {
    std::vector<std::string> out;
    if (axis == "static_single") {
        for (int l = 1; l <= layers; ++l) out.push_back("static:" + std::to_string(l));
    } else if (axis == "static_prefix") {
        std::string acc;
        for (int l = 1; l <= layers; ++l) {
            acc += (l > 1 ? "," : "") + std::to_string(l);
            out.push_back("static:" + acc);
        }
    } else if (axis == "static_suffix") {
        for (int first = layers; first >= 1; --first) {
            std::string acc;
            for (int l = first; l <= layers; ++l) acc += (l > first ? "," : "") + std::to_string(l);
            out.push_back("static:" + acc);
        }
    } else if (axis == "dynamic_size") {
        for (int s = 1; s <= layers; ++s) out.push_back("dynamic:" + std::to_string(s));
    } else {
        fail("unknown sweep axis '" + axis +
             "' (expected static_single|static_prefix|static_suffix|dynamic_size)");
    }
    return out;
}

}  // namespace

SweepResult sweep_layers(const ExperimentConfig& base, const std::string& axis, int seeds,
                         const std::string& out_dir) {
    if (seeds < 1) fail("sweep: seeds must be >= 1");
    base.validate();
    Model probe = make_model(base.model, dataset_classes(base),
                             activation_from_string(base.activation), 0);
    std::vector<std::string> policies = axis_policies(axis, probe.layer_count());

    struct Task {
        ExperimentConfig cfg;
        SweepPoint point;
    };
    std::vector<Task> tasks;
    for (const std::string& pol : policies)
        for (int s = 0; s < seeds; ++s) {
            Task t;
            t.cfg = base;
            t.cfg.policy = pol;
            t.cfg.seed = base.seed + std::uint64_t(s);
            t.cfg.name = sanitize(pol);
            t.cfg.out_dir = (fs::path(out_dir) / "runs").string();
            t.point.policy = pol;
            t.point.seed = t.cfg.seed;
            tasks.push_back(std::move(t));
        }

    int workers = std::min<int>(effective_threads(base.threads), int(tasks.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            Task& t = tasks[i];
            try {
                RunReport r = run_experiment(t.cfg);
                t.point.status = "ok";
                t.point.metric = r.outcome.metric;
                t.point.value = r.outcome.value;
            } catch (const std::exception& e) {
                t.point.status = e.what();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    SweepResult result;
    result.axis = axis;
    fs::create_directories(out_dir);
    std::string table = "policy,seed,status,metric,value\n";
    for (const Task& t : tasks) {
        result.points.push_back(t.point);
        table += t.point.policy + "," + std::to_string(t.point.seed) + "," +
                 (t.point.status == "ok" ? "ok" : "error") + "," + t.point.metric + "," +
                 (t.point.status == "ok" ? fmt_double(t.point.value) : "") + "\n";
    }
    result.table_path = (fs::path(out_dir) / "sweep.csv").string();
    write_text(result.table_path, table);

    std::string summary = "policy,n_ok,mean,stddev\n";
    for (const std::string& pol : policies) {
        std::vector<double> vals;
        for (const Task& t : tasks)
            if (t.point.policy == pol && t.point.status == "ok") vals.push_back(t.point.value);
        double mean = 0.0, sd = 0.0;
        for (double v : vals) mean += v;
        if (!vals.empty()) mean /= double(vals.size());
        for (double v : vals) sd += (v - mean) * (v - mean);
        sd = vals.size() > 1 ? std::sqrt(sd / double(vals.size() - 1)) : 0.0;
        summary += pol + "," + std::to_string(vals.size()) + "," +
                   (vals.empty() ? "" : fmt_double(mean)) + "," +
                   (vals.empty() ? "" : fmt_double(sd)) + "\n";
    }
    result.summary_path = (fs::path(out_dir) / "summary.csv").string();
    write_text(result.summary_path, summary);
    return result;
}

VmwStudy run_tune_vmw(const ExperimentConfig& base, int window_size, int candidate_count,
                      const std::string& out_dir) {
    ExperimentConfig cfg = base;
    if (cfg.attack.kind != "dpia")
        fail("tune-vmw: base config must run the property-inference attack");
    cfg.policy = "none";  // tuning observes the undefended gradient stream
    cfg.name = cfg.name + "-vmwtune";
    cfg.out_dir = (fs::path(out_dir) / "runs").string();
    cfg.save_traces = false;
    cfg.save_snapshots = true;  // the tuner replays the snapshot history below

    // reuse the run pipeline up to the reference dataset: run once with no
    // protection, then rebuild references without masks
    RunReport run = run_experiment(cfg);
    (void)run;

    // rebuild the exact same reference rows the attack stage used
    RunContext ctx;
    ctx.cfg = cfg;
    int classes = dataset_classes(cfg);
    ctx.model = make_model(cfg.model, classes, activation_from_string(cfg.activation),
                           mix_seed({cfg.seed, 0x10de1}));

    // replay the snapshots saved by the unprotected run
    std::vector<std::vector<Tensor>> snapshots;
    for (int t = 0;; ++t) {
        fs::path p = fs::path(run.run_dir) / "snapshots" / ("cycle_" + std::to_string(t) + ".bin");
        if (!fs::exists(p)) break;
        snapshots.push_back(load_model(p.string()).weight_snapshot());
    }
    if (int(snapshots.size()) != cfg.cycles + 1)
        fail("tune-vmw: expected " + std::to_string(cfg.cycles + 1) + " snapshots, found " +
             std::to_string(snapshots.size()));

    SynthSpec prop_spec = cfg.synth;
    prop_spec.prevalence = 1.0;
    SynthSpec clean_spec = cfg.synth;
    clean_spec.prevalence = 0.0;
    std::uint64_t aux_seed = mix_seed({cfg.seed, 0xaab5});
    Dataset aux_prop_pool = synth_generate(prop_spec, cfg.attack.pool_rows, aux_seed);
    Dataset aux_clean_pool =
        synth_generate(clean_spec, cfg.attack.pool_rows, mix_seed({aux_seed, 1}));
    auto sample_batch = [&](const Dataset& pool, std::uint64_t tag, int cycle, int j) {
        Rng rng = derive_rng(mix_seed({cfg.seed, tag}), kStreamAttack, std::uint64_t(cycle),
                            std::uint64_t(j));
        std::vector<int> rows(std::size_t(pool.size()));
        for (int i = 0; i < pool.size(); ++i) rows[std::size_t(i)] = i;
        rng.shuffle(rows);
        rows.resize(std::size_t(cfg.train.batch_size));
        return make_batch(pool, rows);
    };
    std::vector<std::vector<Batch>> aux_prop(std::size_t(cfg.cycles));
    std::vector<std::vector<Batch>> aux_nonprop(std::size_t(cfg.cycles));
    for (int t = 0; t < cfg.cycles; ++t)
        for (int j = 0; j < cfg.attack.aux_batches; ++j) {
            aux_prop[std::size_t(t)].push_back(sample_batch(aux_prop_pool, 0x11aa, t, j));
            aux_nonprop[std::size_t(t)].push_back(sample_batch(aux_clean_pool, 0x22bb, t, j));
        }
    std::vector<ProtectedSet> open_schedule(std::size_t(cfg.cycles));
    for (int t = 0; t < cfg.cycles; ++t) open_schedule[std::size_t(t)].cycle = t;
    GradDataset refs =
        dpia_build_dataset(ctx.model, snapshots, aux_prop, aux_nonprop, open_schedule);

    // even cycles train the simulated attacker, odd cycles validate
    GradDataset train = refs, val = refs;
    train.values.clear();
    train.labels.clear();
    train.mask.clear();
    train.row_cycle.clear();
    val.values.clear();
    val.labels.clear();
    val.mask.clear();
    val.row_cycle.clear();
    for (int r = 0; r < refs.rows(); ++r) {
        GradDataset& dst = (refs.row_cycle[std::size_t(r)] % 2 == 0) ? train : val;
        dst.values.insert(dst.values.end(), refs.row(r), refs.row(r) + refs.width);
        dst.labels.push_back(refs.labels[std::size_t(r)]);
        for (std::size_t g = 0; g < refs.groups.size(); ++g)
            dst.mask.push_back(refs.mask[std::size_t(r) * refs.groups.size() + g]);
        dst.row_cycle.push_back(refs.row_cycle[std::size_t(r)]);
    }

    int locations = window_locations(ctx.model.layer_count(), window_size);
    VmwStudy study;
    study.candidates =
        vmw_candidate_grid(locations, candidate_count, mix_seed({cfg.seed, 0x9fd}));
    AttackTrainConfig trainer = make_trainer(cfg, AttackFamily::Forest);
    study.result = tune_vmw(study.candidates, window_size, ctx.model.layer_count(), train, val,
                            trainer, mix_seed({cfg.seed, 0x74e1}));

    json j;
    j["window_size"] = window_size;
    j["locations"] = locations;
    j["candidates"] = study.candidates;
    j["auc"] = study.result.candidate_auc;
    j["best_index"] = study.result.best_index;
    j["best"] = study.result.best;
    fs::create_directories(out_dir);
    study.report_path = (fs::path(out_dir) / "vmw.json").string();
    write_text(study.report_path, j.dump(2) + "\n");
    return study;
}

}  // namespace gradsec
