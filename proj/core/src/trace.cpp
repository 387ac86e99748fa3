#include "gradsec/trace.hpp"

#include "bytes.hpp"
#include "gradsec/error.hpp"

namespace gradsec {

using namespace detail;

const char* to_string(TraceField f) {
    switch (f) {
        case TraceField::Weights: return "W";
        case TraceField::Grad: return "dW";
        case TraceField::Preact: return "Z";
        case TraceField::Act: return "A";
        case TraceField::Delta: return "delta";
        case TraceField::Boundary: return "boundary";
    }
    return "?";
}

std::vector<int> slice_bottoms(const ProtectedSet& pset, int layer_count) {
    std::vector<int> bottoms;
    for (int l = 1; l <= layer_count; ++l)
        if (pset.contains(l) && !pset.contains(l - 1) && l >= 2) bottoms.push_back(l);
    return bottoms;
}

AttackerView redact(const RawTrace& trace, const ProtectedSet& pset) {
    AttackerView view;
    view.client_id = trace.client_id;
    view.cycle = trace.cycle;
    // A_j vanishes only when the consuming layer j+1 is protected and the
    // host has no claim on it (the input, or an activation produced inside
    // the protected slice). A_j at a slice bottom stays: the host computed it.
    auto act_hidden = [&](int j) {
        return pset.contains(j + 1) && (j == 0 || pset.contains(j));
    };
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const StepRecord& step = trace.steps[s];
        AttackerView::StepView sv;
        sv.epoch = step.epoch;
        sv.batch = step.batch;
        int n = int(step.layers.size());
        if (act_hidden(0))
            view.mask.push_back({int(s), 0, TraceField::Act});
        else
            sv.input = step.input;
        sv.layers.resize(step.layers.size());
        for (int l = 1; l <= n; ++l) {
            const StepRecord::LayerRecord& lr = step.layers[l - 1];
            AttackerView::StepView::LayerView& lv = sv.layers[l - 1];
            bool hidden = pset.contains(l);
            auto take = [&](const Tensor& t, TraceField f, bool hide, int tag) {
                if (t.empty()) return std::optional<Tensor>();  // never existed (pool W/dW)
                if (hide) {
                    view.mask.push_back({int(s), tag, f});
                    return std::optional<Tensor>();
                }
                return std::optional<Tensor>(t);
            };
            lv.weights = take(lr.weights, TraceField::Weights, hidden, l);
            lv.grad = take(lr.grad, TraceField::Grad, hidden, l);
            lv.preact = take(lr.preact, TraceField::Preact, hidden, l);
            lv.act = take(lr.act, TraceField::Act, act_hidden(l), l);
            lv.delta = take(lr.delta, TraceField::Delta, hidden, l);
        }
        sv.boundary = step.boundary;
        view.steps.push_back(std::move(sv));
    }
    return view;
}

namespace {

void put_tensor_record(std::ostream& os, int step, int layer, TraceField field, const Tensor& t) {
    put_u32(os, std::uint32_t(step));
    put_u32(os, std::uint32_t(layer));
    put_u8(os, std::uint8_t(field));
    put_u8(os, std::uint8_t(t.shape.size()));
    for (int d : t.shape) put_u32(os, std::uint32_t(d));
    put_f32_array(os, t.data.data(), t.size());
}

void save_view_impl(const AttackerView& view, const std::string& path) {
    std::ofstream os = open_out(path);
    put_magic(os, "GTRC1");
    put_u32(os, std::uint32_t(view.client_id));
    put_u32(os, std::uint32_t(view.cycle));
    std::uint32_t layer_count = view.steps.empty() ? 0 : std::uint32_t(view.steps[0].layers.size());
    put_u32(os, layer_count);
    put_u32(os, std::uint32_t(view.steps.size()));

    std::uint32_t records = 0;
    for (const auto& sv : view.steps) {
        if (sv.input) ++records;
        for (const auto& lv : sv.layers)
            records += std::uint32_t(bool(lv.weights)) + std::uint32_t(bool(lv.grad)) +
                       std::uint32_t(bool(lv.preact)) + std::uint32_t(bool(lv.act)) +
                       std::uint32_t(bool(lv.delta));
        records += std::uint32_t(sv.boundary.size());
    }
    put_u32(os, records);

    for (const auto& sv : view.steps) {
        put_u32(os, std::uint32_t(sv.epoch));
        put_u32(os, std::uint32_t(sv.batch));
    }
    for (std::size_t s = 0; s < view.steps.size(); ++s) {
        const auto& sv = view.steps[s];
        if (sv.input) put_tensor_record(os, int(s), 0, TraceField::Act, *sv.input);
        for (std::size_t i = 0; i < sv.layers.size(); ++i) {
            const auto& lv = sv.layers[i];
            int l = int(i) + 1;
            if (lv.weights) put_tensor_record(os, int(s), l, TraceField::Weights, *lv.weights);
            if (lv.grad) put_tensor_record(os, int(s), l, TraceField::Grad, *lv.grad);
            if (lv.preact) put_tensor_record(os, int(s), l, TraceField::Preact, *lv.preact);
            if (lv.act) put_tensor_record(os, int(s), l, TraceField::Act, *lv.act);
            if (lv.delta) put_tensor_record(os, int(s), l, TraceField::Delta, *lv.delta);
        }
        for (const auto& bd : sv.boundary)
            put_tensor_record(os, int(s), bd.below_layer, TraceField::Boundary, bd.value);
    }
    put_u32(os, std::uint32_t(view.mask.size()));
    for (const MaskEntry& e : view.mask) {
        put_u32(os, std::uint32_t(e.step));
        put_u32(os, std::uint32_t(e.layer));
        put_u8(os, std::uint8_t(e.field));
    }
    if (!os) fail("write failed for '" + path + "'");
}

}  // namespace

void save_view(const AttackerView& view, const std::string& path) { save_view_impl(view, path); }

void save_trace(const RawTrace& trace, const std::string& path) {
    ProtectedSet nothing;  // full view, empty mask
    save_view_impl(redact(trace, nothing), path);
}

AttackerView load_view(const std::string& path) {
    std::ifstream is = open_in(path);
    const std::string what = "trace file '" + path + "'";
    check_magic(is, "GTRC1", what);
    AttackerView view;
    view.client_id = int(get_u32(is, what));
    view.cycle = int(get_u32(is, what));
    std::uint32_t layer_count = get_u32(is, what);
    std::uint32_t step_count = get_u32(is, what);
    std::uint32_t records = get_u32(is, what);
    if (layer_count > 1024 || step_count > (1u << 24)) fail(what + ": implausible header");
    view.steps.resize(step_count);
    for (auto& sv : view.steps) {
        sv.epoch = int(get_u32(is, what));
        sv.batch = int(get_u32(is, what));
        sv.layers.resize(layer_count);
    }
    for (std::uint32_t r = 0; r < records; ++r) {
        std::uint32_t step = get_u32(is, what);
        std::uint32_t layer = get_u32(is, what);
        std::uint8_t field = get_u8(is, what);
        std::uint8_t ndims = get_u8(is, what);
        if (step >= step_count || field > 5 || ndims > 8)
            fail(what + ": corrupt record " + std::to_string(r));
        std::vector<int> shape;
        for (std::uint8_t i = 0; i < ndims; ++i) shape.push_back(int(get_u32(is, what)));
        Tensor t(shape);
        get_f32_array(is, t.data.data(), t.size(), what);
        AttackerView::StepView& sv = view.steps[step];
        auto layer_slot = [&]() -> AttackerView::StepView::LayerView& {
            if (layer < 1 || layer > layer_count)
                fail(what + ": record " + std::to_string(r) + " has layer out of range");
            return sv.layers[layer - 1];
        };
        switch (TraceField(field)) {
            case TraceField::Weights: layer_slot().weights = std::move(t); break;
            case TraceField::Grad: layer_slot().grad = std::move(t); break;
            case TraceField::Preact: layer_slot().preact = std::move(t); break;
            case TraceField::Act:
                if (layer == 0)
                    sv.input = std::move(t);
                else
                    layer_slot().act = std::move(t);
                break;
            case TraceField::Delta: layer_slot().delta = std::move(t); break;
            case TraceField::Boundary:
                sv.boundary.push_back({int(layer), std::move(t)});
                break;
        }
    }
    std::uint32_t mask_count = get_u32(is, what);
    for (std::uint32_t i = 0; i < mask_count; ++i) {
        MaskEntry e;
        e.step = int(get_u32(is, what));
        e.layer = int(get_u32(is, what));
        std::uint8_t f = get_u8(is, what);
        if (f > 5) fail(what + ": corrupt mask entry");
        e.field = TraceField(f);
        view.mask.push_back(e);
    }
    return view;
}

}  // namespace gradsec
