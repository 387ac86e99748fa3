// gradsec-sim: drive shielded federated-learning experiments from the shell.
#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "gradsec/error.hpp"
#include "gradsec/harness.hpp"
#include "gradsec/model_zoo.hpp"
#include "gradsec/shield.hpp"
#include "gradsec/trace.hpp"

namespace {

using namespace gradsec;

ExperimentConfig load_config(const std::string& config_path, const std::string& preset) {
    if (config_path.empty() == preset.empty())
        fail("pass exactly one of --config and --preset");
    return preset.empty() ? ExperimentConfig::from_json_file(config_path) : make_preset(preset);
}

int cmd_run(const std::string& config_path, const std::string& preset, std::uint64_t seed,
            bool seed_set, const std::string& out_dir) {
    ExperimentConfig cfg = load_config(config_path, preset);
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    RunReport report = run_experiment(cfg);
    std::printf("run dir: %s\n", report.run_dir.c_str());
    std::printf("cycles: %d  final mean loss: %g\n", int(report.rows.size()),
                report.rows.empty() ? 0.0 : report.rows.back().mean_loss);
    if (report.outcome.kind != "none")
        std::printf("%s %s = %.6f\n", report.outcome.kind.c_str(),
                    report.outcome.metric.c_str(), report.outcome.value);
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& preset, const std::string& axis,
              int seeds, const std::string& out_dir) {
    ExperimentConfig cfg = load_config(config_path, preset);
    SweepResult result = sweep_layers(cfg, axis, seeds, out_dir);
    int failures = 0;
    for (const SweepPoint& p : result.points)
        if (p.status != "ok") {
            ++failures;
            std::fprintf(stderr, "point %s seed %llu failed: %s\n", p.policy.c_str(),
                         static_cast<unsigned long long>(p.seed), p.status.c_str());
        }
    std::printf("points: %d  failures: %d\n", int(result.points.size()), failures);
    std::printf("table: %s\nsummary: %s\n", result.table_path.c_str(),
                result.summary_path.c_str());
    return failures == 0 ? 0 : 1;
}

int cmd_tune(const std::string& config_path, const std::string& preset, int window,
             int candidates, const std::string& out_dir) {
    ExperimentConfig cfg = load_config(config_path, preset);
    VmwStudy study = run_tune_vmw(cfg, window, candidates, out_dir);
    for (std::size_t k = 0; k < study.candidates.size(); ++k) {
        std::string probs;
        for (std::size_t i = 0; i < study.candidates[k].size(); ++i)
            probs += (i ? "," : "") + std::to_string(study.candidates[k][i]);
        std::printf("candidate %zu  auc %.4f  [%s]%s\n", k, study.result.candidate_auc[k],
                    probs.c_str(), int(k) == study.result.best_index ? "  <- best" : "");
    }
    std::printf("report: %s\n", study.report_path.c_str());
    return 0;
}

int cmd_footprint(const std::string& model_name, const std::string& policy_text, int batch,
                  int classes, const std::string& activation) {
    int c = classes > 0 ? classes : model_default_classes(model_name);
    Model m = make_model(model_name, c, activation_from_string(activation), 1);
    ShieldPolicy policy = ShieldPolicy::parse(policy_text);
    policy.validate(m.layer_count());
    Rng rng = derive_rng(1, kStreamPolicy);
    ProtectedSet pset = resolve_policy(policy, m.layer_count(), 0, rng);

    std::printf("model %s  layers %d  classes %d  batch %d\n", model_name.c_str(),
                m.layer_count(), c, batch);
    std::printf("policy %s  protected %s\n", policy.to_string().c_str(),
                pset.layers_str().c_str());
    MemoryFootprint fp = memory_footprint(m, pset, batch);
    for (const auto& [id, elems] : fp.buffers)
        std::printf("  %-10s %12llu elements\n", id.c_str(),
                    static_cast<unsigned long long>(elems));
    std::printf("total: %llu bytes (%.2f MiB)\n",
                static_cast<unsigned long long>(fp.bytes_total),
                double(fp.bytes_total) / (1024.0 * 1024.0));
    return 0;
}

int cmd_inspect(const std::string& path) {
    AttackerView view = load_view(path);
    std::printf("client %d  cycle %d  steps %zu  masked buffers %zu\n", view.client_id,
                view.cycle, view.steps.size(), view.mask.size());
    for (std::size_t s = 0; s < view.steps.size(); ++s) {
        const auto& st = view.steps[s];
        std::printf("step %zu (epoch %d, batch %d):\n", s, st.epoch, st.batch);
        auto show = [](const char* name, int idx, bool present) {
            std::printf("  %s%-2d %s", name, idx, present ? "+" : "-");
        };
        std::printf("  input %s\n", st.input.has_value() ? "visible" : "hidden");
        for (std::size_t l = 0; l < st.layers.size(); ++l) {
            const auto& lv = st.layers[l];
            show("W", int(l) + 1, lv.weights.has_value());
            show(" dW", int(l) + 1, lv.grad.has_value());
            show(" Z", int(l) + 1, lv.preact.has_value());
            show(" A", int(l) + 1, lv.act.has_value());
            show(" d", int(l) + 1, lv.delta.has_value());
            std::printf("\n");
        }
        for (const auto& b : st.boundary)
            std::printf("  boundary below layer %d: %s\n", b.below_layer,
                        shape_str(b.value.shape).c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"federated-learning shielding simulator"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir, axis = "static_single";
    std::uint64_t seed = 0;
    int seeds = 5, window = 2, candidates = 8, batch = 32, classes = 0;
    std::string model_name = "lenet5", policy_text = "none", activation = "sigmoid";
    std::string trace_path;

    CLI::App* run = app.add_subcommand("run", "run one experiment from a config");
    run->add_option("-c,--config", config_path, "experiment config (JSON)");
    run->add_option("--preset", preset, "built-in config name");
    CLI::Option* seed_opt = run->add_option("--seed", seed, "override the config seed");
    run->add_option("--out", out_dir, "override the output directory");

    CLI::App* sweep = app.add_subcommand("sweep", "repeat a run across a policy axis");
    sweep->add_option("-c,--config", config_path, "base experiment config (JSON)");
    sweep->add_option("--preset", preset, "built-in config name");
    sweep->add_option("--axis", axis,
                      "static_single | static_prefix | static_suffix | dynamic_size");
    sweep->add_option("--seeds", seeds, "seeds per policy point");
    sweep->add_option("--out", out_dir, "sweep output directory")->required();

    CLI::App* tune = app.add_subcommand("tune-vmw", "pick a window distribution by simulation");
    tune->add_option("-c,--config", config_path, "property-inference config (JSON)");
    tune->add_option("--preset", preset, "built-in config name");
    tune->add_option("--window", window, "moving-window size");
    tune->add_option("--candidates", candidates, "number of candidate distributions");
    tune->add_option("--out", out_dir, "output directory")->required();

    CLI::App* foot = app.add_subcommand("footprint", "enclave memory demand of a policy");
    foot->add_option("-m,--model", model_name, "architecture name")->required();
    foot->add_option("--policy", policy_text, "shielding policy string")->required();
    foot->add_option("--batch", batch, "batch size for activation buffers");
    foot->add_option("--classes", classes, "output classes (default per model)");
    foot->add_option("--activation", activation, "hidden activation");

    CLI::App* inspect = app.add_subcommand("inspect-trace", "summarize a trace file");
    inspect->add_option("file", trace_path, "trace/view file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed())
            return cmd_run(config_path, preset, seed, seed_opt->count() > 0, out_dir);
        if (sweep->parsed()) return cmd_sweep(config_path, preset, axis, seeds, out_dir);
        if (tune->parsed()) return cmd_tune(config_path, preset, window, candidates, out_dir);
        if (foot->parsed())
            return cmd_footprint(model_name, policy_text, batch, classes, activation);
        if (inspect->parsed()) return cmd_inspect(trace_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
