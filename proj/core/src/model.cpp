#include "gradsec/model.hpp"

#include <cmath>

#include "gradsec/error.hpp"
#include "gradsec/rng.hpp"

namespace gradsec {

const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::Dense: return "Dense";
        case LayerKind::Conv2D: return "Conv2D";
        case LayerKind::MaxPool2: return "MaxPool2";
    }
    return "?";
}

const char* to_string(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
    }
    return "?";
}

Activation activation_from_string(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    fail("unknown activation '" + name + "' (expected identity|sigmoid|relu|tanh)");
}

LayerSpec LayerSpec::dense(int units, Activation act) {
    LayerSpec s;
    s.kind = LayerKind::Dense;
    s.units = units;
    s.act = act;
    return s;
}

LayerSpec LayerSpec::conv(int filters, int kernel, int stride, int pad, Activation act) {
    LayerSpec s;
    s.kind = LayerKind::Conv2D;
    s.filters = filters;
    s.kernel = kernel;
    s.stride = stride;
    s.pad = pad;
    s.act = act;
    return s;
}

LayerSpec LayerSpec::maxpool() {
    LayerSpec s;
    s.kind = LayerKind::MaxPool2;
    s.act = Activation::Identity;
    return s;
}

std::string LayerSpec::describe() const {
    std::string s = to_string(kind);
    switch (kind) {
        case LayerKind::Dense: s += "(" + std::to_string(units) + ", " + to_string(act) + ")"; break;
        case LayerKind::Conv2D:
            s += "(" + std::to_string(filters) + "x" + std::to_string(kernel) + "x" +
                 std::to_string(kernel) + ", stride " + std::to_string(stride) + ", pad " +
                 std::to_string(pad) + ", " + to_string(act) + ")";
            break;
        case LayerKind::MaxPool2: s += "(2x2, stride 2)"; break;
    }
    return s;
}

std::size_t Model::total_weights() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.weights.size();
    return n;
}

std::vector<int> Model::weighted_layers() const {
    std::vector<int> out;
    for (int l = 1; l <= layer_count(); ++l)
        if (is_weighted(l)) out.push_back(l);
    return out;
}

std::vector<Tensor> Model::weight_snapshot() const {
    std::vector<Tensor> out;
    out.reserve(layers.size());
    for (const Layer& l : layers) out.push_back(l.weights);
    return out;
}

void Model::load_weights(const std::vector<Tensor>& weights) {
    if (weights.size() != layers.size())
        fail("load_weights: got " + std::to_string(weights.size()) + " tensors for " +
             std::to_string(layers.size()) + " layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (weights[i].shape != layers[i].weights.shape)
            fail("load_weights: layer " + std::to_string(i + 1) + " expects shape " +
                 shape_str(layers[i].weights.shape) + ", got " + shape_str(weights[i].shape));
        layers[i].weights = weights[i];
    }
}

namespace {

std::string layer_tag(int idx1, const LayerSpec& spec) {
    return "layer " + std::to_string(idx1) + " (" + std::string(to_string(spec.kind)) + ")";
}

// validates one layer against its input dims and returns its output dims
std::vector<int> infer_dims(int idx1, const LayerSpec& spec, const std::vector<int>& in) {
    switch (spec.kind) {
        case LayerKind::Dense: {
            if (spec.units <= 0) fail(layer_tag(idx1, spec) + ": units must be positive");
            return {spec.units};
        }
        case LayerKind::Conv2D: {
            if (in.size() != 3) fail(layer_tag(idx1, spec) + ": requires (h, w, c) input");
            if (spec.filters <= 0 || spec.kernel <= 0)
                fail(layer_tag(idx1, spec) + ": filters and kernel must be positive");
            if (spec.stride <= 0) fail(layer_tag(idx1, spec) + ": stride must be positive");
            if (spec.pad < 0) fail(layer_tag(idx1, spec) + ": pad must be non-negative");
            int h = in[0], w = in[1];
            int oh = (h + 2 * spec.pad - spec.kernel) / spec.stride + 1;
            int ow = (w + 2 * spec.pad - spec.kernel) / spec.stride + 1;
            if (oh <= 0 || ow <= 0)
                fail(layer_tag(idx1, spec) + ": kernel " + std::to_string(spec.kernel) +
                     " does not fit input " + shape_str(in));
            return {oh, ow, spec.filters};
        }
        case LayerKind::MaxPool2: {
            if (in.size() != 3) fail(layer_tag(idx1, spec) + ": requires (h, w, c) input");
            if (in[0] < 2 || in[1] < 2)
                fail(layer_tag(idx1, spec) + ": input " + shape_str(in) + " too small for 2x2 window");
            return {in[0] / 2, in[1] / 2, in[2]};
        }
    }
    fail("unreachable layer kind");
}

std::size_t flat_size(const std::vector<int>& dims) {
    std::size_t n = 1;
    for (int d : dims) n *= std::size_t(d);
    return n;
}

}  // namespace

Model build_model_uninit(std::array<int, 3> input_shape, const std::vector<LayerSpec>& specs) {
    if (input_shape[0] <= 0 || input_shape[1] <= 0 || input_shape[2] <= 0)
        fail("model input shape must be positive (h, w, c)");
    if (specs.empty()) fail("model needs at least one layer");
    if (specs.back().kind != LayerKind::Dense)
        fail("layer " + std::to_string(specs.size()) + ": final layer must be Dense (class scores)");
    if (specs.back().act != Activation::Identity)
        fail("layer " + std::to_string(specs.size()) +
             ": final Dense layer fuses softmax; declare identity activation");

    Model m;
    m.input_shape = input_shape;
    std::vector<int> dims = {input_shape[0], input_shape[1], input_shape[2]};
    for (std::size_t i = 0; i < specs.size(); ++i) {
        int idx1 = int(i) + 1;
        const LayerSpec& spec = specs[i];
        std::vector<int> out = infer_dims(idx1, spec, dims);
        Model::Layer layer;
        layer.spec = spec;
        if (spec.kind == LayerKind::Dense)
            layer.weights = Tensor({spec.units, int(flat_size(dims))});
        else if (spec.kind == LayerKind::Conv2D)
            layer.weights = Tensor({spec.filters, spec.kernel, spec.kernel, dims[2]});
        m.layers.push_back(std::move(layer));
        m.out_dims.push_back(out);
        dims = std::move(out);
    }
    return m;
}

Model build_model(std::array<int, 3> input_shape, const std::vector<LayerSpec>& specs,
                  std::uint64_t init_seed) {
    Model m = build_model_uninit(input_shape, specs);
    for (int l = 1; l <= m.layer_count(); ++l) {
        Model::Layer& layer = m.layers[l - 1];
        if (!layer.spec.weighted()) continue;
        std::size_t fan_in;
        if (layer.spec.kind == LayerKind::Dense)
            fan_in = std::size_t(layer.weights.shape[1]);
        else
            fan_in = std::size_t(layer.spec.kernel) * layer.spec.kernel * layer.weights.shape[3];
        double bound = std::sqrt(1.0 / double(fan_in));
        Rng rng = derive_rng(init_seed, kStreamInit, std::uint64_t(l));
        for (float& w : layer.weights.data) w = float(rng.uniform(-bound, bound));
    }
    return m;
}

bool same_structure(const Model& a, const Model& b) {
    if (a.input_shape != b.input_shape || a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        const LayerSpec& x = a.layers[i].spec;
        const LayerSpec& y = b.layers[i].spec;
        if (x.kind != y.kind || x.act != y.act || x.units != y.units || x.filters != y.filters ||
            x.kernel != y.kernel || x.stride != y.stride || x.pad != y.pad)
            return false;
    }
    return true;
}

}  // namespace gradsec
