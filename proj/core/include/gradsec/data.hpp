#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradsec/nn.hpp"
#include "gradsec/tensor.hpp"

namespace gradsec {

// Labeled image set. images is (N, h, w, c) in [0, 1]; labels is (N, classes)
// one-hot. property_flags is empty, or marks rows carrying a planted property.
struct Dataset {
    Tensor images;
    Tensor labels;
    std::vector<std::uint8_t> property_flags;

    int size() const { return images.shape.empty() ? 0 : images.shape[0]; }
    int classes() const { return labels.shape.empty() ? 0 : labels.shape[1]; }
    std::array<int, 3> image_shape() const;
    bool has_property() const { return !property_flags.empty(); }
    int label_of(int row) const;  // argmax of the one-hot row

    Dataset subset(const std::vector<int>& rows) const;
    static Dataset concat(const Dataset& a, const Dataset& b);
};

// Synthetic data: one random prototype image per class plus Gaussian pixel
// noise, optionally blending a fixed pattern into a `prevalence` fraction of
// rows (those rows get property_flags = 1).
struct SynthSpec {
    int classes = 4;
    int height = 8, width = 8, channels = 1;
    std::uint64_t prototype_seed = 1;  // fixes the class prototypes themselves
    double noise_sigma = 0.15;
    bool with_property = false;
    Tensor pattern;          // (h, w, c); empty selects the default checkerboard
    double blend = 0.5;      // pattern weight in flagged rows
    double prevalence = 0.0;  // fraction of rows flagged

    void validate() const;
};

Tensor default_property_pattern(int h, int w, int c);

// n rows; class of row i is i mod classes, row order shuffled by `seed`.
Dataset synth_generate(const SynthSpec& spec, int n, std::uint64_t seed);

enum class CifarVariant { Cifar10, Cifar100 };

// Reads the stock binary batch format (label byte(s) + 3072 bytes of
// planar RGB per record) and converts to NHWC in [0, 1].
Dataset load_cifar(const std::string& path, CifarVariant variant);

enum class PartitionMode { Iid, ByProperty };
PartitionMode partition_mode_from_string(const std::string& name);
const char* to_string(PartitionMode mode);

// Splits into k client shards. Iid: shuffled round-robin deal. ByProperty:
// client 0 takes every flagged row, the rest are dealt round-robin.
std::vector<Dataset> partition(const Dataset& d, int k, PartitionMode mode, std::uint64_t seed);

// native cache format: u32 header (N, h, w, c, classes, has_property), then
// row-major f32 pixels, then one class byte per row, then flag bytes if any
void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

// gathers the given rows into a training batch
Batch make_batch(const Dataset& d, const std::vector<int>& rows);

}  // namespace gradsec
