#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace sdelab {

/// Largest finest level sample_tree accepts (2^24 cells).
inline constexpr int kMaxTreeLevel = 24;

/// Brownian increments over 2^level equal cells of [0, T], stored index-major
/// (cell k, coordinate j at k * m + j).
class IncrementGrid {
public:
    IncrementGrid(std::size_t m, int level, double horizon, std::vector<double> values);

    std::size_t noise_dim() const noexcept { return m_; }
    int level() const noexcept { return level_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t cells() const noexcept { return std::size_t{1} << level_; }
    double step() const noexcept { return horizon_ / static_cast<double>(cells()); }

    std::span<const double> at(std::size_t cell) const noexcept { return {values_.data() + cell * m_, m_}; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t m_;
    int level_;
    double horizon_;
    std::vector<double> values_;
};

/// An m-dimensional Brownian path held at its finest dyadic grid. Coarser
/// increments are pairwise sums of finer ones, so two Euler resolutions read
/// from the same tree are driven by the same Brownian motion.
class BrownianTree {
public:
    BrownianTree(std::size_t m, double horizon, int finest_level, std::uint64_t seed, std::uint64_t stream_id,
                 std::vector<double> finest_increments);

    std::size_t noise_dim() const noexcept { return finest_.noise_dim(); }
    double horizon() const noexcept { return finest_.horizon(); }
    int finest_level() const noexcept { return finest_.level(); }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }
    double finest_step() const noexcept { return finest_.step(); }

    const IncrementGrid& finest() const noexcept { return finest_; }

    /// B at grid point `cell` of the finest level (running sum of increments).
    std::vector<double> value_at(std::size_t cell) const;

    friend bool operator==(const BrownianTree& a, const BrownianTree& b) noexcept;

private:
    IncrementGrid finest_;
    std::uint64_t seed_;
    std::uint64_t stream_;
};

/// Draws a tree whose increments are N(0, h I), h = T 2^-L. Output is a pure
/// function of (m, T, L, seed, stream_id).
/// Throws ResourceError for L > kMaxTreeLevel, UsageError for T <= 0 or m == 0.
BrownianTree sample_tree(std::size_t m, double horizon, int finest_level, std::uint64_t seed,
                         std::uint64_t stream_id);

/// Increments at level `level` <= L. Cell k is the pairwise (binary-tree) sum
/// of its finest children, so level l is exactly the pairwise sum of level l+1.
IncrementGrid increments_at_level(const BrownianTree& tree, int level);

/// Binary dump: header of five little-endian 64-bit fields (m, T as IEEE bits,
/// L, seed, stream_id) then the increments as little-endian doubles,
/// coordinate-major.
void write_tree(const BrownianTree& tree, std::ostream& out);
BrownianTree read_tree(std::istream& in);

}  // namespace sdelab
