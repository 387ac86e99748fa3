#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace gradsec {

// splitmix64 step; used to derive well-separated seeds from (seed, tag, index)
// tuples so every component draws from its own stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Folds a list of integers into one seed. Order-sensitive.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

// Stream tags for substream derivation. Values are arbitrary but frozen:
// changing them changes every downstream random draw.
enum : std::uint64_t {
    kStreamInit = 0x1a51,       // weight initialization
    kStreamShuffle = 0x2b62,    // per-epoch batch shuffles
    kStreamPolicy = 0x3c73,     // per-cycle window draws
    kStreamData = 0x4d84,       // synthetic data generation
    kStreamPartition = 0x5e95,  // dataset splits
    kStreamAttack = 0x6fa6,     // attacker-side randomness
    kStreamHarness = 0x7fb7,    // experiment orchestration
};

// Deterministic RNG wrapper. All uniform/normal draws go through explicit
// bit-twiddling rather than std distributions, so sequences are identical
// across standard libraries and platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1) with 53 random bits
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0, n)
    std::uint64_t below(std::uint64_t n);

    // inclusive range
    int uniform_int(int lo, int hi) { return lo + int(below(std::uint64_t(hi - lo) + 1)); }

    // standard normal via Box-Muller (no state carried between calls)
    double normal();

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    // Fisher-Yates using below(); deterministic for a given seed
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = std::size_t(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // index drawn from a discrete distribution given by non-negative weights
    // summing to ~1; the tail absorbs rounding.
    int categorical(const std::vector<double>& probs);

  private:
    std::mt19937_64 eng_;
};

// Child RNG for a named substream, e.g. derive_rng(seed, kStreamShuffle, cycle).
Rng derive_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0);

}  // namespace gradsec
