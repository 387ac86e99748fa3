#include "gradsec/shield.hpp"

#include <cmath>
#include <sstream>

#include "gradsec/error.hpp"

namespace gradsec {

ShieldPolicy ShieldPolicy::none() { return ShieldPolicy{}; }

ShieldPolicy ShieldPolicy::fixed(std::set<int> layers) {
    ShieldPolicy p;
    p.kind = Kind::Static;
    p.static_layers = std::move(layers);
    return p;
}

ShieldPolicy ShieldPolicy::moving(int window_size, std::vector<double> probs) {
    ShieldPolicy p;
    p.kind = Kind::Dynamic;
    p.window_size = window_size;
    p.window_probs = std::move(probs);
    return p;
}

void ShieldPolicy::validate(int layer_count) const {
    switch (kind) {
        case Kind::None:
            return;
        case Kind::Static: {
            if (static_layers.empty()) fail("policy: static layer set must not be empty");
            for (int l : static_layers)
                if (l < 1 || l > layer_count)
                    fail("policy: layer " + std::to_string(l) + " outside 1.." +
                         std::to_string(layer_count));
            return;
        }
        case Kind::Dynamic: {
            int locations = window_locations(layer_count, window_size);
            if (!window_probs.empty()) {
                if (int(window_probs.size()) != locations)
                    fail("policy: window_probs has " + std::to_string(window_probs.size()) +
                         " entries but a size-" + std::to_string(window_size) + " window over " +
                         std::to_string(layer_count) + " layers admits " +
                         std::to_string(locations) + " locations");
                double sum = 0.0;
                for (double p : window_probs) {
                    if (p < 0.0) fail("policy: window_probs entries must be non-negative");
                    sum += p;
                }
                if (std::abs(sum - 1.0) > 1e-9) fail("policy: window_probs must sum to 1");
            }
            return;
        }
    }
}

int window_locations(int layer_count, int window_size) {
    if (layer_count < 1) fail("window_locations: layer count must be positive");
    if (window_size < 1 || window_size > layer_count)
        fail("window_locations: window size " + std::to_string(window_size) +
             " outside 1.." + std::to_string(layer_count));
    return layer_count - window_size + 1;
}

std::string ShieldPolicy::to_string() const {
    switch (kind) {
        case Kind::None:
            return "none";
        case Kind::Static: {
            std::string s = "static:";
            bool first = true;
            for (int l : static_layers) {
                if (!first) s += ",";
                s += std::to_string(l);
                first = false;
            }
            return s;
        }
        case Kind::Dynamic: {
            std::string s = "dynamic:" + std::to_string(window_size);
            if (!window_probs.empty()) {
                s += ":";
                for (std::size_t i = 0; i < window_probs.size(); ++i) {
                    if (i) s += ",";
                    std::ostringstream os;
                    os << window_probs[i];
                    s += os.str();
                }
            }
            return s;
        }
    }
    return "none";
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

int parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(what + ": '" + s + "' is not an integer");
    }
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(what + ": '" + s + "' is not a number");
    }
}

}  // namespace

ShieldPolicy ShieldPolicy::parse(const std::string& text) {
    if (text == "none" || text.empty()) return none();
    std::vector<std::string> parts = split(text, ':');
    if (parts[0] == "static") {
        if (parts.size() != 2 || parts[1].empty())
            fail("policy '" + text + "': expected static:<layer,layer,...>");
        std::set<int> layers;
        for (const std::string& tok : split(parts[1], ','))
            layers.insert(parse_int(tok, "policy '" + text + "'"));
        return fixed(std::move(layers));
    }
    if (parts[0] == "dynamic") {
        if (parts.size() < 2 || parts.size() > 3)
            fail("policy '" + text + "': expected dynamic:<size>[:p1,p2,...]");
        int size = parse_int(parts[1], "policy '" + text + "'");
        std::vector<double> probs;
        if (parts.size() == 3 && !parts[2].empty())
            for (const std::string& tok : split(parts[2], ','))
                probs.push_back(parse_double(tok, "policy '" + text + "'"));
        return moving(size, std::move(probs));
    }
    fail("policy '" + text + "': expected none | static:... | dynamic:...");
}

std::string ProtectedSet::layers_str() const {
    if (layers.empty()) return "-";
    std::string s;
    for (int l : layers) {
        if (!s.empty()) s += "|";
        s += std::to_string(l);
    }
    return s;
}

ProtectedSet resolve_policy(const ShieldPolicy& policy, int layer_count, int cycle, Rng& rng) {
    policy.validate(layer_count);
    ProtectedSet out;
    out.cycle = cycle;
    switch (policy.kind) {
        case ShieldPolicy::Kind::None:
            break;
        case ShieldPolicy::Kind::Static:
            out.layers = policy.static_layers;
            break;
        case ShieldPolicy::Kind::Dynamic: {
            int locations = window_locations(layer_count, policy.window_size);
            std::vector<double> probs = policy.window_probs;
            if (probs.empty())
                probs.assign(std::size_t(locations), 1.0 / double(locations));
            int loc = rng.categorical(probs) + 1;
            out.window_location = loc;
            for (int l = loc; l < loc + policy.window_size; ++l) out.layers.insert(l);
            break;
        }
    }
    return out;
}

MemoryFootprint memory_footprint(const Model& m, const ProtectedSet& pset, int batch_size) {
    if (batch_size < 1) fail("memory_footprint: batch size must be positive");
    auto act_elems = [&](int j) -> std::uint64_t {  // elements of A_j at batch m
        std::uint64_t per;
        if (j == 0) {
            per = std::uint64_t(m.input_shape[0]) * m.input_shape[1] * m.input_shape[2];
        } else {
            per = 1;
            for (int d : m.output_dims(j)) per *= std::uint64_t(d);
        }
        return per * std::uint64_t(batch_size);
    };
    MemoryFootprint fp;
    for (int l : pset.layers) {
        if (l < 1 || l > m.layer_count())
            fail("memory_footprint: layer " + std::to_string(l) + " outside 1.." +
             std::to_string(m.layer_count()));
        std::string tag = std::to_string(l);
        if (m.is_weighted(l)) {
            fp.buffers["W" + tag] = m.weight_count(l);
            fp.buffers["dW" + tag] = m.weight_count(l);
        }
        fp.buffers["Z" + tag] = act_elems(l);
        fp.buffers["delta" + tag] = act_elems(l);
        fp.buffers["A" + std::to_string(l - 1)] = act_elems(l - 1);
    }
    for (const auto& [id, elems] : fp.buffers) fp.bytes_total += 4 * elems;
    return fp;
}

}  // namespace gradsec
