#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gradsec/model.hpp"
#include "gradsec/rng.hpp"

namespace gradsec {

// Which layers sit inside the enclave. Layer indices are 1-based.
//   None    - everything observable
//   Static  - a fixed arbitrary subset for every cycle
//   Dynamic - a contiguous window of `window_size` layers whose bottom
//             location is redrawn each cycle from `window_probs`
struct ShieldPolicy {
    enum class Kind { None, Static, Dynamic };
    Kind kind = Kind::None;
    std::set<int> static_layers;
    int window_size = 0;
    std::vector<double> window_probs;

    static ShieldPolicy none();
    static ShieldPolicy fixed(std::set<int> layers);
    static ShieldPolicy moving(int window_size, std::vector<double> probs);

    // probs may be empty for moving policies until the layer count is known;
    // resolve_policy then uses the uniform distribution
    void validate(int layer_count) const;

    // "none" | "static:2,5" | "dynamic:2:0.2,0.1,0.6,0.1" | "dynamic:2"
    std::string to_string() const;
    static ShieldPolicy parse(const std::string& text);
};

// number of admissible bottom positions for a window of `window_size`
int window_locations(int layer_count, int window_size);

// Concrete per-cycle protection outcome.
struct ProtectedSet {
    int cycle = 0;
    std::set<int> layers;
    int window_location = 0;  // 1-based bottom of the drawn window; 0 if not dynamic

    bool contains(int layer) const { return layers.count(layer) != 0; }
    std::string layers_str() const;  // "2|5", or "-" when empty
};

// Draws/locks the protected set for one cycle. Dynamic draws consume exactly
// one uniform variate from `rng` per call.
ProtectedSet resolve_policy(const ShieldPolicy& policy, int layer_count, int cycle, Rng& rng);

// Enclave memory demand: 4 bytes per f32 element of every buffer the enclave
// must hold for the protected layers -- weights W_l and gradients dW_l (when
// the layer has weights), pre-activations Z_l, deltas, and the layer input
// A_{l-1}, all at batch size m.
struct MemoryFootprint {
    std::uint64_t bytes_total = 0;
    std::map<std::string, std::uint64_t> buffers;  // buffer id -> element count
};

MemoryFootprint memory_footprint(const Model& m, const ProtectedSet& pset, int batch_size);

}  // namespace gradsec
