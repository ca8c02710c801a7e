#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ils {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Counter-based stream: draw i is mix64(key + i * golden), so any
/// substream is fully determined by (seed, stream id) and never depends on
/// how other streams were scheduled. Gaussians use Box-Muller.
class RngStream {
public:
    static constexpr const char* kAlgorithm = "splitmix64-counter/box-muller";

    explicit RngStream(std::uint64_t seed) noexcept : seed_(seed), key_(mix64(seed)) {}

    /// Independent substream, e.g. one per run index.
    RngStream substream(std::uint64_t id) const noexcept { return RngStream(mix64(key_ ^ mix64(id + 1))); }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept { return mix64(key_ + (counter_++) * 0x9E3779B97F4A7C15ull); }

    /// Uniform in (0, 1): 53 random bits, never exactly 0.
    double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_ = rad * std::sin(ang);
        has_spare_ = true;
        return rad * std::cos(ang);
    }

private:
    std::uint64_t seed_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ils
