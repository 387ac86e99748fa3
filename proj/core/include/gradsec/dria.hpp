#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gradsec/model.hpp"
#include "gradsec/outcome.hpp"
#include "gradsec/trace.hpp"

namespace gradsec {

// Data reconstruction from observed gradients: optimize a dummy input and a
// soft label until the gradients they induce match the captured ones.
struct DriaConfig {
    enum class Optimizer { Adam, LbfgsLite };
    Optimizer optimizer = Optimizer::Adam;
    int iterations = 300;
    double step = 0.1;        // Adam rate / initial line-search step
    std::uint64_t seed = 0;   // dummy-input initialization
    int lbfgs_memory = 8;
    double fd_step = 1e-3;    // central-difference step for the outer gradient
};

// What the attacker reconstructs from: a stand-in model (true weights where
// observable, re-seeded guesses where shielded) plus the observable per-layer
// gradients. grads[l-1] is empty for shielded and unweighted layers.
struct DriaTarget {
    Model surrogate;
    std::vector<std::optional<Tensor>> grads;
};

// Builds the target from one captured step. Weighted layers whose gradient
// survives redaction take their weights from `snapshot`; shielded ones are
// re-initialized from attacker_seed.
DriaTarget make_dria_target(const Model& snapshot, const AttackerView& view, int step,
                            std::uint64_t attacker_seed);

struct DriaResult {
    AttackOutcome outcome;
    Tensor reconstruction;  // (1, h, w, c)
    Tensor label_guess;     // (1, classes), softmax of the optimized logits
    double initial_match_loss = 0.0;
    double final_match_loss = 0.0;
};

// gradient-match loss for a candidate (input, label-logits) pair
double dria_match_loss(const DriaTarget& target, const Tensor& input, const Tensor& logits);

// Runs the optimization. When `truth` is given the outcome metric is
// ImageLoss against it; otherwise the final match loss is reported.
DriaResult dria(const DriaTarget& target, const DriaConfig& cfg, const Tensor* truth);

}  // namespace gradsec
