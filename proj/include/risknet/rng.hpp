#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace risknet {

/// One round of the splitmix64 mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Counter-based child seed: stream `index` of master seed `master`.
/// Independent of evaluation order, so trials can run in any order.
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

/// Seeded generator with platform-independent derived draws. The standard
/// distributions are implementation-defined, so they are not used here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double low, double high) { return low + (high - low) * uniform(); }

    /// Uniform integer in [0, n), unbiased by rejection.
    std::uint64_t below(std::uint64_t n);

    /// Index drawn with probability proportional to weights (non-negative,
    /// positive sum).
    std::size_t discrete(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
};

}  // namespace risknet
