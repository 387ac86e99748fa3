#include "gradsec/model_zoo.hpp"

#include "gradsec/error.hpp"

namespace gradsec {

Model make_lenet5(int classes, Activation hidden_act, std::uint64_t init_seed) {
    // stride-2 5x5 stem needs pad 2 to land on 16x16, then 8x8 maps
    std::vector<LayerSpec> specs = {
        LayerSpec::conv(12, 5, 2, 2, hidden_act),
        LayerSpec::conv(12, 5, 2, 2, hidden_act),
        LayerSpec::conv(12, 5, 1, 2, hidden_act),
        LayerSpec::conv(12, 5, 1, 2, hidden_act),
        LayerSpec::dense(classes, Activation::Identity),
    };
    return build_model({32, 32, 3}, specs, init_seed);
}

Model make_alexnet(int classes, Activation hidden_act, std::uint64_t init_seed) {
    std::vector<LayerSpec> specs = {
        LayerSpec::conv(64, 3, 2, 1, hidden_act),   // 16x16x64
        LayerSpec::maxpool(),                       // 8x8x64
        LayerSpec::conv(192, 3, 1, 1, hidden_act),  // 8x8x192
        LayerSpec::maxpool(),                       // 4x4x192
        LayerSpec::conv(384, 3, 1, 1, hidden_act),  // 4x4x384
        LayerSpec::conv(256, 3, 1, 1, hidden_act),  // 4x4x256
        LayerSpec::conv(256, 3, 1, 1, hidden_act),  // 4x4x256
        LayerSpec::maxpool(),                       // 2x2x256 -> 1024 flat
        LayerSpec::dense(4096, hidden_act),
        LayerSpec::dense(4096, hidden_act),
        LayerSpec::dense(classes, Activation::Identity),
    };
    return build_model({32, 32, 3}, specs, init_seed);
}

Model make_tiny(int classes, Activation hidden_act, std::uint64_t init_seed) {
    // stride-2 convs instead of pooling: reconstruction attacks need the
    // gradient to keep enough of the input to invert
    std::vector<LayerSpec> specs = {
        LayerSpec::conv(8, 3, 2, 1, hidden_act),  // 4x4x8
        LayerSpec::conv(8, 3, 2, 1, hidden_act),  // 2x2x8
        LayerSpec::dense(classes, Activation::Identity),
    };
    return build_model({8, 8, 1}, specs, init_seed);
}

Model make_model(const std::string& name, int classes, Activation hidden_act,
                 std::uint64_t init_seed) {
    if (classes < 2) fail("model '" + name + "': classes must be >= 2");
    if (name == "lenet5") return make_lenet5(classes, hidden_act, init_seed);
    if (name == "alexnet") return make_alexnet(classes, hidden_act, init_seed);
    if (name == "tiny") return make_tiny(classes, hidden_act, init_seed);
    fail("unknown model '" + name + "' (expected lenet5|alexnet|tiny)");
}

const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names = {"lenet5", "alexnet", "tiny"};
    return names;
}

std::array<int, 3> model_input_shape(const std::string& name) {
    if (name == "lenet5" || name == "alexnet") return {32, 32, 3};
    if (name == "tiny") return {8, 8, 1};
    fail("unknown model '" + name + "'");
}

int model_default_classes(const std::string& name) {
    if (name == "lenet5" || name == "alexnet") return 100;
    if (name == "tiny") return 4;
    fail("unknown model '" + name + "'");
}

}  // namespace gradsec
