#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace confair {

// Seedable, portable RNG. std::mt19937_64 output is fully specified by the
// standard; the distribution helpers below avoid std::uniform_*_distribution,
// whose output is implementation-defined. Stream discipline: one Rng per
// logical stream, sub-streams derived with derive_seed(master, index).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, n), n >= 1, by rejection.
    std::size_t uniform_index(std::size_t n) {
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = engine_(); } while (x >= limit);
        return static_cast<std::size_t>(x % n);
    }

    // Uniform in [0, 1) with 53 bits.
    double uniform_real01() { return (engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform_real01() < p; }

    // Fisher-Yates, deterministic given the stream state.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer; mixes a master seed with a stream index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace confair
