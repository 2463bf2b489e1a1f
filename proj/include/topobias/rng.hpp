#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace topobias {

// splitmix64 finalizer (Steele/Lea/Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Per-topology seed for slot (generator_index, topology_index) of a corpus.
// (lane + 1) * kGolden is injective mod 2^64 and mix64 is bijective, so seeds
// within one corpus are pairwise distinct.
constexpr std::uint64_t derive_topology_seed(std::uint64_t base_seed,
                                             std::uint64_t generator_index,
                                             std::uint64_t topology_index,
                                             std::uint64_t topologies_per_generator) noexcept {
    const std::uint64_t stream = mix64(base_seed + kGolden);
    const std::uint64_t lane = generator_index * topologies_per_generator + topology_index;
    return mix64(stream ^ ((lane + 1) * kGolden));
}

// mt19937_64 with hand-rolled draws. The engine output sequence is fixed by
// the standard and the draws below avoid std::*_distribution, whose results
// differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1]; safe as a log/pow argument
    double uniform01_positive() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // unbiased integer in [0, n) via bitmask rejection
    std::uint64_t bounded(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t mask = ~0ull >> std::countl_zero(n - 1);
        std::uint64_t v = next_u64() & mask;
        while (v >= n) v = next_u64() & mask;
        return v;
    }

    // Pareto with scale 1: inverse-CDF of u^(-1/shape), u in (0,1]
    double pareto(double shape) { return std::pow(uniform01_positive(), -1.0 / shape); }

private:
    std::mt19937_64 engine_;
};

// Fisher-Yates with Rng::bounded; same permutation on every platform.
template <typename T>
void shuffle_deterministic(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace topobias
