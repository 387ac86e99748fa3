#include "gradsec/mia.hpp"

#include "gradsec/error.hpp"

namespace gradsec {

RawTrace probe_trace(const Model& m, const Tensor& image, const Tensor& label_onehot,
                     const ProtectedSet& pset) {
    Tensor X = image;
    if (X.shape.size() == 3) X.shape.insert(X.shape.begin(), 1);
    Tensor Y = label_onehot;
    if (Y.shape.size() == 1) Y.shape.insert(Y.shape.begin(), 1);

    ForwardCache cache = forward(m, X);
    BackwardResult back = backward(m, cache, Y);

    int n = m.layer_count();
    RawTrace trace;
    trace.client_id = -1;  // synthetic probe, not a participant
    trace.cycle = -1;
    StepRecord rec;
    rec.input = cache.act[0];
    rec.layers.resize(std::size_t(n));
    for (int l = 1; l <= n; ++l) {
        StepRecord::LayerRecord& lr = rec.layers[std::size_t(l - 1)];
        if (m.is_weighted(l)) {
            lr.weights = m.layers[std::size_t(l - 1)].weights;
            lr.grad = back.grads[std::size_t(l - 1)];
        }
        lr.preact = cache.preact[std::size_t(l - 1)];
        lr.act = cache.act[std::size_t(l)];
        lr.delta = back.delta[std::size_t(l - 1)];
    }
    for (int a : slice_bottoms(pset, n)) rec.boundary.push_back({a, back.d_input[std::size_t(a - 1)]});
    trace.steps.push_back(std::move(rec));
    return trace;
}

GradDataset mia_build_dataset(const Model& arch, const std::vector<AttackerView>& probes,
                              const std::vector<std::uint8_t>& member_flags) {
    if (probes.size() != member_flags.size())
        fail("mia dataset: probe and flag counts differ");
    GradDataset d = make_grad_dataset(arch);
    std::vector<std::vector<float>> per_layer;
    std::vector<std::uint8_t> hidden;
    std::vector<std::uint8_t> expect_hidden;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        if (probes[i].steps.size() != 1)
            fail("mia dataset: probe " + std::to_string(i) + " is not a single-step view");
        view_step_gradients(probes[i], 0, d, per_layer, hidden);
        if (i == 0)
            expect_hidden = hidden;
        else if (hidden != expect_hidden)
            fail("mia dataset: probe " + std::to_string(i) +
                 " exposes a different layer set than probe 0");
        d.append_row(per_layer, hidden, member_flags[i] ? 1 : 0);
    }
    return d;
}

}  // namespace gradsec
