#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace sdelab {

/// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
/// numbers: as easy as 1, 2, 3"). Every output block is a pure function of
/// (key, counter), so any draw can be reproduced without replaying a stream.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Key key, Counter counter) noexcept;
};

/// Deterministic random draws keyed by (seed, stream_id, index).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    /// Two independent uniforms on (0, 1] for block `index`.
    std::array<double, 2> uniform_pair(std::uint64_t index) const noexcept;

    /// Standard normal number `index` of this stream (Box-Muller, two per block).
    double normal(std::uint64_t index) const noexcept;

    /// Fills out[i] = normal(first + i).
    void fill_normal(std::span<double> out, std::uint64_t first = 0) const noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }

private:
    Philox4x32::Counter raw(std::uint64_t block) const noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_;
};

}  // namespace sdelab
