#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace vorcursor {

/// xoshiro256** seeded through splitmix64. Implemented here rather than
/// taken from <random> so that streams (including normal deviates) replay
/// bit-identically across standard library implementations.
class Rng {
public:
    static constexpr std::string_view kAlgorithm = "xoshiro256starstar-splitmix64-seed";

    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Fills `out` with the next out.size() words of the stream.
    void fill(std::span<std::uint64_t> out);

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    /// Standard normal deviate (Marsaglia polar method, no cached spare).
    double normal();

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

/// Derives an independent stream seed from a base seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace vorcursor
