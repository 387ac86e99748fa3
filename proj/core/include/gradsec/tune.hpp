#pragma once

#include <cstdint>
#include <vector>

#include "gradsec/attack_model.hpp"
#include "gradsec/grad_dataset.hpp"

namespace gradsec {

// Defender-side window-distribution tuning: pick the candidate V_MW that
// leaves the simulated attacker with the lowest validation AUC.

// Evaluates one candidate: per-cycle window locations are drawn from `probs`
// (one draw per distinct cycle in grad_train, streamed from mask_seed), the
// covered layers are masked in the training rows, both sides are imputed,
// the attack model is fitted, and the validation AUC returned.
double tune_candidate_auc(const std::vector<double>& probs, int window_size, int layer_count,
                          const GradDataset& grad_train, const GradDataset& grad_val,
                          const AttackTrainConfig& trainer, std::uint64_t mask_seed);

struct VmwTuneResult {
    int best_index = -1;
    std::vector<double> best;           // the winning probability vector
    std::vector<double> candidate_auc;  // one entry per candidate, same order
};

// Evaluates every candidate (candidate k uses mask seed (seed, k)) and keeps
// the argmin; ties break toward the lowest index. grad_train rows must carry
// cycle provenance.
VmwTuneResult tune_vmw(const std::vector<std::vector<double>>& candidates, int window_size,
                       int layer_count, const GradDataset& grad_train, const GradDataset& grad_val,
                       const AttackTrainConfig& trainer, std::uint64_t seed);

// seeded candidate grid: `count` draws from a flat Dirichlet over the
// window locations, with the uniform vector always at index 0
std::vector<std::vector<double>> vmw_candidate_grid(int locations, int count, std::uint64_t seed);

}  // namespace gradsec
