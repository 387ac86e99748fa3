#pragma once

#include <cstdint>
#include <vector>

#include "gradsec/model.hpp"
#include "gradsec/tensor.hpp"

namespace gradsec {

// Mini-batch: X is (m, h, w, c), Y is (m, classes) one-hot (rows sum to 1).
struct Batch {
    Tensor X;
    Tensor Y;
    int size() const { return X.shape.empty() ? 0 : X.shape[0]; }
};

// Everything the backward pass (and a per-layer trace) needs from one forward:
// act[0] is the input batch, act[l] the post-activation output of layer l;
// preact[l-1] is Z_l. The final layer's act rows are softmax probabilities.
struct ForwardCache {
    int batch = 0;
    std::vector<Tensor> preact;                  // Z_1..Z_n at [0..n-1]
    std::vector<Tensor> act;                     // A_0..A_n at [0..n]
    std::vector<std::vector<std::int32_t>> pool_idx;  // argmax routing per pool layer
};

// Per-layer gradients plus the loss derivative w.r.t. layer inputs.
// grads[l-1] = dLoss/dW_l (empty for pools); delta[l-1] = dLoss/dZ_l
// (for pools, dLoss/d(pool output)); d_input[j] = dLoss/dA_j, so d_input[0]
// is the gradient w.r.t. the batch itself.
struct BackwardResult {
    std::vector<Tensor> grads;
    std::vector<Tensor> delta;
    std::vector<Tensor> d_input;
    double loss = 0.0;  // mean cross-entropy over the batch
};

struct TrainConfig {
    double lr = 0.1;
    int epochs_per_cycle = 1;
    int batch_size = 32;
};

// Runs the net on a batch. Softmax is fused into the final Dense layer.
ForwardCache forward(const Model& m, const Tensor& X);

// Gradients for mean cross-entropy over the batch; starts from
// dZ_n = (softmax - Y) / m and walks the stack down to the input.
BackwardResult backward(const Model& m, const ForwardCache& cache, const Tensor& Y);

// W <- W - lr * dW elementwise (computed in double, stored as float)
void sgd_step(Model& m, const std::vector<Tensor>& grads, double lr);

// Mean categorical cross-entropy, -mean_b sum_c Y*ln(P + 1e-12).
// P rows must already sum to 1 (checked to 1e-4).
double loss_ce(const Tensor& probs, const Tensor& Y);

}  // namespace gradsec
