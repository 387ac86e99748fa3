#include <benchmark/benchmark.h>

#include <cstdint>

#include "gradsec/model_zoo.hpp"
#include "gradsec/nn.hpp"
#include "gradsec/rng.hpp"

using namespace gradsec;

namespace {

Batch random_batch(const Model& m, int rows, std::uint64_t seed) {
    Rng rng(seed);
    int classes = m.out_dims.back()[0];
    Batch b;
    b.X = Tensor({rows, m.input_shape[0], m.input_shape[1], m.input_shape[2]});
    for (float& v : b.X.data) v = float(rng.uniform());
    b.Y = Tensor({rows, classes});
    for (int r = 0; r < rows; ++r)
        b.Y.data[std::size_t(r) * classes + rng.below(std::uint64_t(classes))] = 1.0f;
    return b;
}

}  // namespace

static void bm_tiny_forward(benchmark::State& state) {
    Model m = make_tiny(4, Activation::Sigmoid, 1);
    Batch b = random_batch(m, 32, 2);
    for (auto _ : state) {
        ForwardCache cache = forward(m, b.X);
        benchmark::DoNotOptimize(cache.act.back().data.data());
    }
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(bm_tiny_forward)->Unit(benchmark::kMillisecond);

static void bm_lenet5_forward(benchmark::State& state) {
    Model m = make_lenet5(10, Activation::Relu, 1);
    Batch b = random_batch(m, 32, 2);
    for (auto _ : state) {
        ForwardCache cache = forward(m, b.X);
        benchmark::DoNotOptimize(cache.act.back().data.data());
    }
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(bm_lenet5_forward)->Unit(benchmark::kMillisecond);

static void bm_lenet5_backward(benchmark::State& state) {
    Model m = make_lenet5(10, Activation::Relu, 1);
    Batch b = random_batch(m, 32, 2);
    ForwardCache cache = forward(m, b.X);
    for (auto _ : state) {
        BackwardResult back = backward(m, cache, b.Y);
        benchmark::DoNotOptimize(back.grads.back().data.data());
    }
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(bm_lenet5_backward)->Unit(benchmark::kMillisecond);

static void bm_lenet5_sgd_step(benchmark::State& state) {
    Model m = make_lenet5(10, Activation::Relu, 1);
    Batch b = random_batch(m, 8, 2);
    BackwardResult back = backward(m, forward(m, b.X), b.Y);
    for (auto _ : state) {
        sgd_step(m, back.grads, 1e-4);
        benchmark::DoNotOptimize(m.layers[0].weights.data.data());
    }
}
BENCHMARK(bm_lenet5_sgd_step)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
