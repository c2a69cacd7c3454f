#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace lrnn {

std::uint64_t splitmix64(std::uint64_t& state);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Seed for an independent stream labelled by (master, label, index).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

/// xoshiro256++ seeded through splitmix64. Satisfies UniformRandomBitGenerator,
/// but the sampling helpers below are what the library uses so that draws are
/// identical across standard library implementations.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0);
    Rng(std::uint64_t master, std::string_view label, std::uint64_t index = 0)
        : Rng(derive_seed(master, label, index)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal via the Box-Muller transform.
    double normal();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace lrnn
