#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "gradsec/attack_model.hpp"
#include "gradsec/grad_dataset.hpp"
#include "gradsec/metrics.hpp"
#include "gradsec/mia.hpp"
#include "gradsec/model_zoo.hpp"
#include "gradsec/rng.hpp"
#include "gradsec/shield.hpp"
#include "gradsec/trace.hpp"

using namespace gradsec;

namespace {

// alternating-label rows over the tiny layout; one group carries the signal
GradDataset gradient_table(int rows, std::uint64_t seed) {
    Model m = make_tiny(4, Activation::Sigmoid, 29);
    GradDataset d = make_grad_dataset(m);
    Rng rng(seed);
    std::vector<std::vector<float>> per_layer(3);
    std::vector<std::uint8_t> hidden{0, 0, 0};
    for (int r = 0; r < rows; ++r) {
        std::uint8_t label = r % 2;
        hidden[1] = (r % 4 == 0) ? 1 : 0;  // a quarter of the rows lose layer 2
        for (int g = 0; g < 3; ++g) {
            std::size_t w =
                std::size_t(d.groups[std::size_t(g)].end - d.groups[std::size_t(g)].begin);
            per_layer[std::size_t(g)].assign(w, 0.0f);
            if (hidden[std::size_t(g)]) continue;
            for (std::size_t i = 0; i < w; ++i)
                per_layer[std::size_t(g)][i] =
                    float(rng.normal() * 0.1 + (g == 0 && label ? 1.0 : 0.0));
        }
        d.append_row(per_layer, hidden, label, r / 2);
    }
    return d;
}

}  // namespace

static void bm_auc_4096(benchmark::State& state) {
    Rng rng(5);
    std::vector<double> scores(4096);
    std::vector<std::uint8_t> labels(4096);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = double(rng.below(512)) / 8.0;  // coarse grid keeps ties in play
        labels[i] = i % 2;
    }
    for (auto _ : state) benchmark::DoNotOptimize(auc(scores, labels));
    state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(bm_auc_4096)->Unit(benchmark::kMicrosecond);

static void bm_impute_mean(benchmark::State& state) {
    GradDataset d = gradient_table(256, 7);
    for (auto _ : state) {
        GradDataset filled = impute_mean(d);
        benchmark::DoNotOptimize(filled.values.data());
    }
    state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(bm_impute_mean)->Unit(benchmark::kMicrosecond);

static void bm_forest_train(benchmark::State& state) {
    GradDataset d = impute_mean(gradient_table(128, 9));
    AttackTrainConfig cfg;
    cfg.family = AttackFamily::Forest;
    cfg.trees = 50;
    cfg.max_depth = 4;
    cfg.seed = 3;
    for (auto _ : state) {
        AttackModel model = train_attack_model(d, cfg);
        benchmark::DoNotOptimize(model.forest.data());
    }
}
BENCHMARK(bm_forest_train)->Unit(benchmark::kMillisecond);

static void bm_redact_step(benchmark::State& state) {
    Model m = make_tiny(4, Activation::Sigmoid, 3);
    Rng rng(11);
    Tensor image({1, 8, 8, 1});
    for (float& v : image.data) v = float(rng.uniform());
    Tensor label({1, 4});
    label.data[1] = 1.0f;
    ProtectedSet pset;
    pset.layers = {2};
    RawTrace trace = probe_trace(m, image, label, pset);
    for (auto _ : state) {
        AttackerView view = redact(trace, pset);
        benchmark::DoNotOptimize(view.mask.data());
    }
}
BENCHMARK(bm_redact_step)->Unit(benchmark::kMicrosecond);

static void bm_footprint_lenet5(benchmark::State& state) {
    Model m = make_lenet5(100, Activation::Relu, 1);
    ProtectedSet pset;
    pset.layers = {2, 3};
    for (auto _ : state) {
        MemoryFootprint fp = memory_footprint(m, pset, 32);
        benchmark::DoNotOptimize(fp.bytes_total);
    }
}
BENCHMARK(bm_footprint_lenet5)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
