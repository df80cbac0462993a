#pragma once

#include <cstdint>
#include <random>

namespace pgl {

/// 64-bit Mersenne Twister with distributions implemented here rather than
/// taken from <random>, whose distribution algorithms differ between
/// standard libraries. Same seed, same stream, on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Seed for an independent substream of `seed` labelled by `stream`.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double low, double high) { return low + (high - low) * uniform(); }
    bool bernoulli(double p) { return uniform() < p; }
    /// Standard normal via the Marsaglia polar method.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace pgl
