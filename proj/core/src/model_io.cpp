#include "gradsec/model_io.hpp"

#include <algorithm>

#include "bytes.hpp"
#include "gradsec/error.hpp"

namespace gradsec {

using namespace detail;

void save_model(const Model& m, const std::string& path) {
    std::ofstream os = open_out(path);
    put_magic(os, "GSEC1");
    put_u32(os, std::uint32_t(m.layers.size()));
    put_u32(os, std::uint32_t(m.input_shape[0]));
    put_u32(os, std::uint32_t(m.input_shape[1]));
    put_u32(os, std::uint32_t(m.input_shape[2]));
    for (const Model::Layer& l : m.layers) {
        put_u8(os, std::uint8_t(l.spec.kind));
        put_u8(os, std::uint8_t(l.spec.act));
        put_u32(os, std::uint32_t(l.spec.units));
        put_u32(os, std::uint32_t(l.spec.filters));
        put_u32(os, std::uint32_t(l.spec.kernel));
        put_u32(os, std::uint32_t(l.spec.stride));
        put_u32(os, std::uint32_t(l.spec.pad));
        put_u64(os, l.weights.size());
        put_f32_array(os, l.weights.data.data(), l.weights.size());
    }
    if (!os) fail("write failed for '" + path + "'");
}

Model load_model(const std::string& path) {
    std::ifstream is = open_in(path);
    const std::string what = "model file '" + path + "'";
    check_magic(is, "GSEC1", what);
    std::uint32_t count = get_u32(is, what);
    if (count == 0 || count > 1024) fail(what + ": implausible layer count");
    std::array<int, 3> input{int(get_u32(is, what)), int(get_u32(is, what)),
                             int(get_u32(is, what))};
    std::vector<LayerSpec> specs;
    std::vector<std::pair<std::uint64_t, std::vector<float>>> blobs;
    for (std::uint32_t i = 0; i < count; ++i) {
        LayerSpec s;
        std::uint8_t kind = get_u8(is, what);
        if (kind > 2) fail(what + ": layer " + std::to_string(i + 1) + " has unknown kind");
        s.kind = LayerKind(kind);
        std::uint8_t act = get_u8(is, what);
        if (act > 3) fail(what + ": layer " + std::to_string(i + 1) + " has unknown activation");
        s.act = Activation(act);
        s.units = int(get_u32(is, what));
        s.filters = int(get_u32(is, what));
        s.kernel = int(get_u32(is, what));
        s.stride = int(get_u32(is, what));
        s.pad = int(get_u32(is, what));
        std::uint64_t n = get_u64(is, what);
        std::vector<float> data(n);
        get_f32_array(is, data.data(), n, what);
        specs.push_back(s);
        blobs.emplace_back(n, std::move(data));
    }
    Model m = build_model_uninit(input, specs);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (blobs[i].first != m.layers[i].weights.size())
            fail(what + ": layer " + std::to_string(i + 1) + " stores " +
                 std::to_string(blobs[i].first) + " weights, expected " +
                 std::to_string(m.layers[i].weights.size()));
        m.layers[i].weights.data = std::move(blobs[i].second);
    }
    return m;
}

void save_tensor(const Tensor& t, const std::string& path) {
    std::ofstream os = open_out(path);
    put_magic(os, "GTNS1");
    put_u32(os, std::uint32_t(t.shape.size()));
    for (int d : t.shape) put_u32(os, std::uint32_t(d));
    put_f32_array(os, t.data.data(), t.size());
    if (!os) fail("write failed for '" + path + "'");
}

Tensor load_tensor(const std::string& path) {
    std::ifstream is = open_in(path);
    const std::string what = "tensor file '" + path + "'";
    check_magic(is, "GTNS1", what);
    std::uint32_t nd = get_u32(is, what);
    if (nd > 8) fail(what + ": implausible rank");
    std::vector<int> shape;
    for (std::uint32_t i = 0; i < nd; ++i) shape.push_back(int(get_u32(is, what)));
    Tensor t(shape);
    get_f32_array(is, t.data.data(), t.size(), what);
    return t;
}

void save_image_preview(const Tensor& t, const std::string& path) {
    std::vector<int> dims = t.shape;
    if (dims.size() == 4 && dims[0] == 1) dims.erase(dims.begin());
    if (dims.size() != 3 || (dims[2] != 1 && dims[2] != 3))
        fail("image preview expects (h, w, 1|3), got " + shape_str(t.shape));
    int h = dims[0], w = dims[1], c = dims[2];
    std::ofstream os = open_out(path);
    os << (c == 1 ? "P5" : "P6") << "\n" << w << " " << h << "\n255\n";
    for (std::size_t i = 0; i < std::size_t(h) * w * c; ++i) {
        float v = std::clamp(t.data[i], 0.0f, 1.0f);
        os.put(char(int(v * 255.0f + 0.5f)));
    }
    if (!os) fail("write failed for '" + path + "'");
}

}  // namespace gradsec
