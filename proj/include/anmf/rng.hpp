#pragma once

#include <cstdint>
#include <random>

namespace anmf {

/// Deterministic uniform generator used for every random draw in the library.
///
/// All draws are derived from the fully specified std::mt19937_64 stream, so a
/// seed identifies one bit-exact sequence on every platform. No ambient RNG is
/// used anywhere; seeds flow in explicitly.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw on the half-open-from-below interval (0, 1].
    /// Strictly positive so multiplicative updates never start at zero.
    double unit_positive() {
        const std::uint64_t k = engine_() >> 11; // top 53 bits
        return static_cast<double>(k + 1) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound), by rejection so the result only depends
    /// on the engine stream, not on any library's distribution internals.
    std::uint64_t index(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return draw % bound;
    }

private:
    std::mt19937_64 engine_;
};

/// Stream seed for sub-task `index` of a run seeded with `seed`.
///
/// Index 0 maps to the parent seed itself, which is what makes single-term
/// additive runs and single-point batches coincide bit for bit with their
/// plain counterparts. Higher indices are scrambled (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    if (index == 0) return seed;
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * index;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace anmf
