#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gradsec/shield.hpp"
#include "gradsec/tensor.hpp"

namespace gradsec {

// Buffer kinds appearing in trace files; values are frozen on disk.
enum class TraceField : std::uint8_t {
    Weights = 0,     // W_l as used by the step (pre-update)
    Grad = 1,        // dW_l
    Preact = 2,      // Z_l
    Act = 3,         // A_j (j = 0 is the input batch)
    Delta = 4,       // dLoss/dZ_l
    Boundary = 5,    // dLoss/dA_{a-1} crossing the bottom of a protected slice
};

const char* to_string(TraceField f);

// Complete record of one local training step, before any shielding.
struct StepRecord {
    int epoch = 0;
    int batch = 0;
    Tensor input;  // A_0
    struct LayerRecord {
        Tensor weights;  // empty for pool layers
        Tensor grad;     // empty for pool layers
        Tensor preact;
        Tensor act;
        Tensor delta;
    };
    std::vector<LayerRecord> layers;
    // Values an enclave must emit so the host can continue backprop below a
    // protected slice: dLoss/dA_{below-1} for every protected slice whose
    // bottom layer `below` has an observable layer beneath it.
    struct BoundaryDelta {
        int below_layer = 0;  // the slice's bottom layer a; value is dLoss/dA_{a-1}
        Tensor value;
    };
    std::vector<BoundaryDelta> boundary;
};

struct RawTrace {
    int client_id = -1;
    int cycle = -1;
    std::vector<StepRecord> steps;
};

// One removed buffer. For Act entries `layer` is the activation index j
// (0 = input); for everything else it is the owning layer l.
struct MaskEntry {
    int step = 0;
    int layer = 0;
    TraceField field = TraceField::Weights;
};

// What leaves the enclave: the raw trace minus every buffer the protected
// set hides, plus the explicit mask of what was hidden.
struct AttackerView {
    int client_id = -1;
    int cycle = -1;
    struct StepView {
        int epoch = 0;
        int batch = 0;
        std::optional<Tensor> input;
        struct LayerView {
            std::optional<Tensor> weights, grad, preact, act, delta;
        };
        std::vector<LayerView> layers;
        std::vector<StepRecord::BoundaryDelta> boundary;
    };
    std::vector<StepView> steps;
    std::vector<MaskEntry> mask;
};

// Applies shielding semantics: for every protected layer l the enclave hides
// W_l, dW_l, Z_l and delta_l; the activation A_j disappears only when the
// layer above it is protected and it is not itself a boundary output the
// host needs (j == 0, or j protected too). Boundary deltas stay visible.
AttackerView redact(const RawTrace& trace, const ProtectedSet& pset);

// records the protected slice bottoms for a set over an n-layer model:
// each maximal run [a..b] of protected layers with a >= 2 contributes a
std::vector<int> slice_bottoms(const ProtectedSet& pset, int layer_count);

// Binary trace files (magic "GTRC1"; see docs/FORMATS.md). A redacted view
// simply omits the hidden records and lists them in the mask footer.
void save_trace(const RawTrace& trace, const std::string& path);
void save_view(const AttackerView& view, const std::string& path);
AttackerView load_view(const std::string& path);  // raw files load with an empty mask

}  // namespace gradsec
