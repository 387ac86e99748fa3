#pragma once

#include <cstdint>
#include <vector>

#include "gradsec/tensor.hpp"

namespace gradsec {

// Area under the ROC curve via the rank-sum identity; tied scores contribute
// half a pair. labels are 0/1 and both classes must be present.
double auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels);

// Euclidean distance between a reconstructed image and the original;
// the reconstruction "succeeds" in the source experiments when this is < 1.
double image_loss(const Tensor& reconstructed, const Tensor& original);

}  // namespace gradsec
