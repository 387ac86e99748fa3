#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradsec/model.hpp"

namespace gradsec {

// Built-in architectures:
//   lenet5  - 4 stacked Conv2D (12 filters, 5x5) + final Dense, 32x32x3 input
//   alexnet - scaled-down AlexNet; each 2x2 max-pool is its own engine layer,
//             so the stack is 11 layers (conv,pool,conv,pool,conv,conv,conv,
//             pool,dense,dense,dense)
//   tiny    - two stride-2 Conv2D (8 filters, 3x3) + Dense on 8x8x1 input;
//             small enough for reconstruction attacks to converge in seconds
Model make_lenet5(int classes, Activation hidden_act, std::uint64_t init_seed);
Model make_alexnet(int classes, Activation hidden_act, std::uint64_t init_seed);
Model make_tiny(int classes, Activation hidden_act, std::uint64_t init_seed);

// name ∈ {lenet5, alexnet, tiny}
Model make_model(const std::string& name, int classes, Activation hidden_act,
                 std::uint64_t init_seed);
const std::vector<std::string>& model_names();
std::array<int, 3> model_input_shape(const std::string& name);
int model_default_classes(const std::string& name);

}  // namespace gradsec
