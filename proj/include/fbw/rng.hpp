#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace fbw {

/// splitmix64 finalizer; used for seeding and for deriving sub-stream seeds.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/**
 * Seedable random stream: xoshiro256** (Blackman & Vigna) with its 256-bit
 * state filled by four successive splitmix64 outputs of the seed.
 *
 * Uniform doubles take the top 53 bits of each 64-bit output. Normal draws
 * use the Marsaglia polar method and cache the second variate of each pair,
 * so the sequence of normals is fixed by the seed and the call order.
 *
 * Not thread-safe; give each thread its own stream (see derive()).
 */
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1).
    double uniform() noexcept;
    /// Uniform integer on [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) noexcept;
    /// Standard normal.
    double normal() noexcept;

    /// Independent stream keyed by (seed, stream_id); does not advance *this.
    RngStream derive(std::uint64_t stream_id) const noexcept;

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
    std::optional<double> spare_normal_;
};

}  // namespace fbw
