#include "gradsec/rng.hpp"

#include <cmath>

#include "gradsec/error.hpp"

namespace gradsec {

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = 0x8f3a1c2d5b7e9f01ULL;
    for (std::uint64_t p : parts) {
        state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        splitmix64(state);
    }
    return splitmix64(state);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) fail("Rng::below: n must be positive");
    // rejection sampling to stay unbiased
    std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    // Box-Muller; u1 is nudged away from zero so log stays finite
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

int Rng::categorical(const std::vector<double>& probs) {
    if (probs.empty()) fail("Rng::categorical: empty probability vector");
    double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return int(i);
    }
    return int(probs.size()) - 1;
}

Rng derive_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t a, std::uint64_t b) {
    return Rng(mix_seed({seed, tag, a, b}));
}

}  // namespace gradsec
