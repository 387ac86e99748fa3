#pragma once

#include <vector>

#include "gradsec/flsim.hpp"
#include "gradsec/grad_dataset.hpp"

namespace gradsec {

// One forward/backward probe of a single example against a fixed model; no
// weight update. The result is a one-step trace redactable like any other.
RawTrace probe_trace(const Model& m, const Tensor& image, const Tensor& label_onehot,
                     const ProtectedSet& pset);

// Membership-inference feature table: one row per probe view, columns are the
// flattened per-layer gradients, label 1 = the probed example was in the
// victim's training set. Views must all expose the same layers.
GradDataset mia_build_dataset(const Model& arch, const std::vector<AttackerView>& probes,
                              const std::vector<std::uint8_t>& member_flags);

}  // namespace gradsec
