#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gradsec/tensor.hpp"

namespace gradsec {

enum class LayerKind : std::uint8_t { Dense = 0, Conv2D = 1, MaxPool2 = 2 };
enum class Activation : std::uint8_t { Identity = 0, Sigmoid = 1, Relu = 2, Tanh = 3 };

const char* to_string(LayerKind k);
const char* to_string(Activation a);
Activation activation_from_string(const std::string& name);

// One layer of a feed-forward net. Layers carry no biases; Dense flattens its
// input; Conv2D weights are (filters, kernel, kernel, in_channels); MaxPool2
// is a fixed 2x2 window with stride 2 and has no weights or activation.
struct LayerSpec {
    LayerKind kind = LayerKind::Dense;
    Activation act = Activation::Identity;
    int units = 0;    // Dense output width
    int filters = 0;  // Conv2D output channels
    int kernel = 0;   // Conv2D square kernel side
    int stride = 1;   // Conv2D stride
    int pad = 0;      // Conv2D symmetric zero padding

    static LayerSpec dense(int units, Activation act);
    static LayerSpec conv(int filters, int kernel, int stride, int pad, Activation act);
    static LayerSpec maxpool();

    bool weighted() const { return kind != LayerKind::MaxPool2; }
    std::string describe() const;
};

// Network = input shape + layer stack + weights. Layer indices in error
// messages and in all shielding APIs are 1-based (1..n); vectors are 0-based.
struct Model {
    std::array<int, 3> input_shape{0, 0, 0};  // h, w, c
    struct Layer {
        LayerSpec spec;
        Tensor weights;  // empty for MaxPool2
    };
    std::vector<Layer> layers;

    // per-layer output dims: {h, w, c} after spatial layers, {units} after Dense
    std::vector<std::vector<int>> out_dims;

    int layer_count() const { return int(layers.size()); }
    bool is_weighted(int idx1) const { return layers[idx1 - 1].spec.weighted(); }
    std::size_t weight_count(int idx1) const { return layers[idx1 - 1].weights.size(); }
    std::size_t total_weights() const;
    const std::vector<int>& output_dims(int idx1) const { return out_dims[idx1 - 1]; }

    // weighted layer indices, ascending, 1-based
    std::vector<int> weighted_layers() const;

    std::vector<Tensor> weight_snapshot() const;            // per layer; empty for pools
    void load_weights(const std::vector<Tensor>& weights);  // shape-checked
};

// Validates the stack, infers shapes, and initializes weights from
// U(-sqrt(1/fan_in), sqrt(1/fan_in)) using a stream derived from init_seed.
Model build_model(std::array<int, 3> input_shape, const std::vector<LayerSpec>& specs,
                  std::uint64_t init_seed);

// structure only; weights stay zero
Model build_model_uninit(std::array<int, 3> input_shape, const std::vector<LayerSpec>& specs);

bool same_structure(const Model& a, const Model& b);

}  // namespace gradsec
