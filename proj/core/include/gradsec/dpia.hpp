#pragma once

#include <vector>

#include "gradsec/attack_model.hpp"
#include "gradsec/flsim.hpp"
#include "gradsec/grad_dataset.hpp"
#include "gradsec/outcome.hpp"

namespace gradsec {

// Property inference across cycles. The attacker labels its own auxiliary
// batches (property present / absent), computes reference gradients against
// each public snapshot, and learns a classifier; victim rows come from
// consecutive-snapshot deltas. schedule[t] is cycle t's protected set: layers
// inside it are masked in both reference and victim rows for that cycle.

// Reference rows: for every cycle t and every auxiliary batch, the gradient
// of that batch at snapshot t. aux_prop[t] rows are labeled 1, aux_nonprop[t]
// rows 0. Requires snapshots.size() > schedule.size().
GradDataset dpia_build_dataset(const Model& arch, const std::vector<std::vector<Tensor>>& snapshots,
                               const std::vector<std::vector<Batch>>& aux_prop,
                               const std::vector<std::vector<Batch>>& aux_nonprop,
                               const std::vector<ProtectedSet>& schedule);

// Victim rows: snapshot_delta(snapshots[t], snapshots[t+1], lr) flattened,
// labeled with the ground-truth property presence of cycle t.
GradDataset dpia_victim_rows(const Model& arch, const std::vector<std::vector<Tensor>>& snapshots,
                             double lr, const std::vector<ProtectedSet>& schedule,
                             const std::vector<std::uint8_t>& presence);

// Imputes both sides, trains on the references, scores the victim rows, and
// reports AUC against the presence labels.
AttackOutcome dpia_run(const GradDataset& references, const GradDataset& victim,
                       const AttackTrainConfig& trainer);

}  // namespace gradsec
