#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "gradsec/data.hpp"
#include "gradsec/error.hpp"
#include "gradsec/mia.hpp"
#include "gradsec/model_io.hpp"
#include "gradsec/model_zoo.hpp"
#include "gradsec/trace.hpp"

using namespace gradsec;

namespace {

RawTrace one_step_trace(const Model& m, std::uint64_t data_seed, const ProtectedSet& pset) {
    SynthSpec spec;
    spec.classes = m.out_dims.back()[0];
    spec.height = m.input_shape[0];
    spec.width = m.input_shape[1];
    spec.channels = m.input_shape[2];
    Dataset d = synth_generate(spec, 1, data_seed);
    return probe_trace(m, d.images, d.labels, pset);
}

bool view_has(const AttackerView::StepView::LayerView& lv, TraceField f) {
    switch (f) {
        case TraceField::Weights: return lv.weights.has_value();
        case TraceField::Grad: return lv.grad.has_value();
        case TraceField::Preact: return lv.preact.has_value();
        case TraceField::Act: return lv.act.has_value();
        case TraceField::Delta: return lv.delta.has_value();
        default: return false;
    }
}

}  // namespace

TEST_CASE("redaction hides exactly the protected buffers") {
    Model m = make_tiny(4, Activation::Sigmoid, 5);

    SUBCASE("empty set hides nothing") {
        ProtectedSet open;
        AttackerView v = redact(one_step_trace(m, 3, open), open);
        CHECK(v.mask.empty());
        CHECK(v.steps[0].input.has_value());
        for (const auto& lv : v.steps[0].layers) {
            CHECK(lv.preact.has_value());
            CHECK(lv.act.has_value());
            CHECK(lv.delta.has_value());
        }
        CHECK(v.steps[0].boundary.empty());
    }

    SUBCASE("middle layer protected") {
        ProtectedSet p;
        p.layers = {2};
        RawTrace trace = one_step_trace(m, 3, p);
        AttackerView v = redact(trace, p);
        const auto& s = v.steps[0];
        // layer 2 internals disappear
        CHECK_FALSE(view_has(s.layers[1], TraceField::Weights));
        CHECK_FALSE(view_has(s.layers[1], TraceField::Grad));
        CHECK_FALSE(view_has(s.layers[1], TraceField::Preact));
        CHECK_FALSE(view_has(s.layers[1], TraceField::Delta));
        // the host computed A1 itself before handing it to the enclave
        CHECK(view_has(s.layers[0], TraceField::Act));
        CHECK(s.input.has_value());
        CHECK(view_has(s.layers[0], TraceField::Weights));
        CHECK(view_has(s.layers[0], TraceField::Grad));
        // A2 feeds observable layer 3, so the enclave must emit it
        CHECK(view_has(s.layers[1], TraceField::Act));
        CHECK(view_has(s.layers[2], TraceField::Weights));
        // the slice bottom sits at 2, so dLoss/dA1 crosses the boundary
        REQUIRE(s.boundary.size() == 1);
        CHECK(s.boundary[0].below_layer == 2);
        CHECK(s.boundary[0].value.size() == trace.steps[0].layers[0].act.size());
        CHECK(v.mask.size() == 4);  // W2, dW2, Z2, delta2
    }

    SUBCASE("prefix slice hides the input") {
        ProtectedSet p;
        p.layers = {1, 2};
        AttackerView v = redact(one_step_trace(m, 3, p), p);
        const auto& s = v.steps[0];
        CHECK_FALSE(s.input.has_value());
        CHECK_FALSE(view_has(s.layers[0], TraceField::Act));
        CHECK(view_has(s.layers[1], TraceField::Act));
        // slice touches layer 1: no boundary delta to emit
        CHECK(s.boundary.empty());
        CHECK(v.mask.size() == 10);
    }
}

TEST_CASE("redacted values match the raw trace where visible") {
    Model m = make_tiny(4, Activation::Sigmoid, 7);
    ProtectedSet p;
    p.layers = {2};
    RawTrace trace = one_step_trace(m, 11, p);
    AttackerView v = redact(trace, p);
    CHECK(bitwise_equal(*v.steps[0].layers[0].weights, trace.steps[0].layers[0].weights));
    CHECK(bitwise_equal(*v.steps[0].layers[2].grad, trace.steps[0].layers[2].grad));
    CHECK(bitwise_equal(*v.steps[0].layers[1].act, trace.steps[0].layers[1].act));
}

TEST_CASE("view files round-trip") {
    Model m = make_tiny(4, Activation::Sigmoid, 9);
    ProtectedSet p;
    p.layers = {2};
    RawTrace trace = one_step_trace(m, 13, p);
    AttackerView v = redact(trace, p);

    std::string path = "/tmp/gradsec_test_view.trace";
    save_view(v, path);
    AttackerView back = load_view(path);
    CHECK(back.client_id == v.client_id);
    CHECK(back.cycle == v.cycle);
    REQUIRE(back.steps.size() == v.steps.size());
    REQUIRE(back.mask.size() == v.mask.size());
    const auto& a = v.steps[0];
    const auto& b = back.steps[0];
    CHECK(a.epoch == b.epoch);
    CHECK(a.batch == b.batch);
    REQUIRE(a.layers.size() == b.layers.size());
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        CHECK(a.layers[l].weights.has_value() == b.layers[l].weights.has_value());
        CHECK(a.layers[l].act.has_value() == b.layers[l].act.has_value());
        if (a.layers[l].weights)
            CHECK(bitwise_equal(*a.layers[l].weights, *b.layers[l].weights));
    }
    REQUIRE(b.boundary.size() == a.boundary.size());
    CHECK(bitwise_equal(a.boundary[0].value, b.boundary[0].value));
    std::remove(path.c_str());
}

TEST_CASE("raw trace files load as fully visible views") {
    Model m = make_tiny(4, Activation::Sigmoid, 2);
    ProtectedSet open;
    RawTrace trace = one_step_trace(m, 4, open);
    std::string path = "/tmp/gradsec_test_raw.trace";
    save_trace(trace, path);
    AttackerView v = load_view(path);
    CHECK(v.mask.empty());
    CHECK(v.steps[0].input.has_value());
    CHECK(bitwise_equal(*v.steps[0].input, trace.steps[0].input));
    std::remove(path.c_str());
}

TEST_CASE("model files round-trip structure and weights") {
    Model m = make_lenet5(10, Activation::Tanh, 21);
    std::string path = "/tmp/gradsec_test_model.bin";
    save_model(m, path);
    Model back = load_model(path);
    CHECK(same_structure(m, back));
    for (int l = 1; l <= m.layer_count(); ++l)
        if (m.is_weighted(l))
            CHECK(bitwise_equal(m.layers[std::size_t(l - 1)].weights,
                                back.layers[std::size_t(l - 1)].weights));
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_model("/tmp/gradsec_no_such_file.bin"), Error);
}

TEST_CASE("tensor files round-trip") {
    Tensor t({2, 3}, {1.5f, -2.0f, 0.0f, 4.25f, 1e-6f, -1e6f});
    std::string path = "/tmp/gradsec_test_tensor.bin";
    save_tensor(t, path);
    Tensor back = load_tensor(path);
    CHECK(bitwise_equal(t, back));
    std::remove(path.c_str());
}

TEST_CASE("image preview writes pgm and ppm headers") {
    std::string path = "/tmp/gradsec_test_img.pgm";
    Tensor gray({4, 4, 1});
    for (std::size_t i = 0; i < gray.size(); ++i) gray.data[i] = float(i) / 16.0f;
    save_image_preview(gray, path);
    {
        std::FILE* f = std::fopen(path.c_str(), "rb");
        REQUIRE(f);
        char magic[3] = {};
        REQUIRE(std::fread(magic, 1, 2, f) == 2);
        CHECK(magic[0] == 'P');
        CHECK(magic[1] == '5');
        std::fclose(f);
    }
    std::remove(path.c_str());

    Tensor rgb({1, 4, 4, 3});
    for (std::size_t i = 0; i < rgb.size(); ++i) rgb.data[i] = 0.5f;
    std::string path6 = "/tmp/gradsec_test_img.ppm";
    save_image_preview(rgb, path6);
    {
        std::FILE* f = std::fopen(path6.c_str(), "rb");
        REQUIRE(f);
        char magic[3] = {};
        REQUIRE(std::fread(magic, 1, 2, f) == 2);
        CHECK(magic[0] == 'P');
        CHECK(magic[1] == '6');
        std::fclose(f);
    }
    std::remove(path6.c_str());
}
