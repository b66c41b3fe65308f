#include "sdelab/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "sdelab/errors.hpp"
#include "sdelab/philox.hpp"

namespace sdelab {

IncrementGrid::IncrementGrid(std::size_t m, int level, double horizon, std::vector<double> values)
    : m_(m), level_(level), horizon_(horizon), values_(std::move(values))
{
    if (values_.size() != cells() * m_) throw InternalError("increment grid size mismatch");
}

BrownianTree::BrownianTree(std::size_t m, double horizon, int finest_level, std::uint64_t seed,
                           std::uint64_t stream_id, std::vector<double> finest_increments)
    : finest_(m, finest_level, horizon, std::move(finest_increments)), seed_(seed), stream_(stream_id)
{
}

std::vector<double> BrownianTree::value_at(std::size_t cell) const
{
    require(cell <= finest_.cells(), "grid index past the horizon");
    std::vector<double> b(noise_dim(), 0.0);
    for (std::size_t k = 0; k < cell; ++k) {
        const auto dB = finest_.at(k);
        for (std::size_t j = 0; j < b.size(); ++j) b[j] += dB[j];
    }
    return b;
}

bool operator==(const BrownianTree& a, const BrownianTree& b) noexcept
{
    const auto va = a.finest_.values();
    const auto vb = b.finest_.values();
    return a.noise_dim() == b.noise_dim() && a.horizon() == b.horizon() && a.finest_level() == b.finest_level() &&
           a.seed_ == b.seed_ && a.stream_ == b.stream_ && std::equal(va.begin(), va.end(), vb.begin(), vb.end());
}

BrownianTree sample_tree(std::size_t m, double horizon, int finest_level, std::uint64_t seed,
                         std::uint64_t stream_id)
{
    if (finest_level > kMaxTreeLevel)
        throw ResourceError("finest level " + std::to_string(finest_level) + " exceeds the guard of " +
                            std::to_string(kMaxTreeLevel));
    require(finest_level >= 0, "finest level must be nonnegative");
    require(m >= 1, "noise dimension must be positive");
    require(horizon > 0.0 && std::isfinite(horizon), "horizon must be positive and finite");

    const std::size_t n = (std::size_t{1} << finest_level) * m;
    std::vector<double> values(n);
    CounterRng(seed, stream_id).fill_normal(values);
    const double scale = std::sqrt(horizon / static_cast<double>(std::size_t{1} << finest_level));
    for (auto& v : values) v *= scale;
    return BrownianTree(m, horizon, finest_level, seed, stream_id, std::move(values));
}

IncrementGrid increments_at_level(const BrownianTree& tree, int level)
{
    require(level >= 0 && level <= tree.finest_level(),
            "level " + std::to_string(level) + " outside [0, " + std::to_string(tree.finest_level()) + "]");
    const std::size_t m = tree.noise_dim();
    const auto finest = tree.finest().values();
    std::vector<double> current(finest.begin(), finest.end());
    for (int l = tree.finest_level(); l > level; --l) {
        const std::size_t parents = std::size_t{1} << (l - 1);
        std::vector<double> next(parents * m);
        for (std::size_t k = 0; k < parents; ++k)
            for (std::size_t j = 0; j < m; ++j)
                next[k * m + j] = current[(2 * k) * m + j] + current[(2 * k + 1) * m + j];
        current = std::move(next);
    }
    return IncrementGrid(m, level, tree.horizon(), std::move(current));
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v)
{
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in)
{
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw UsageError("truncated Brownian tree dump");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

}  // namespace

void write_tree(const BrownianTree& tree, std::ostream& out)
{
    const std::size_t m = tree.noise_dim();
    put_u64(out, m);
    put_u64(out, std::bit_cast<std::uint64_t>(tree.horizon()));
    put_u64(out, static_cast<std::uint64_t>(tree.finest_level()));
    put_u64(out, tree.seed());
    put_u64(out, tree.stream_id());
    const auto& grid = tree.finest();
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < grid.cells(); ++k) put_u64(out, std::bit_cast<std::uint64_t>(grid.at(k)[j]));
}

BrownianTree read_tree(std::istream& in)
{
    const std::uint64_t m = get_u64(in);
    const double horizon = std::bit_cast<double>(get_u64(in));
    const std::uint64_t level = get_u64(in);
    const std::uint64_t seed = get_u64(in);
    const std::uint64_t stream = get_u64(in);
    if (level > static_cast<std::uint64_t>(kMaxTreeLevel)) throw ResourceError("tree dump level exceeds guard");
    require(m >= 1 && m < (1u << 16), "tree dump has an invalid noise dimension");
    require(horizon > 0.0 && std::isfinite(horizon), "tree dump has an invalid horizon");
    const std::size_t cells = std::size_t{1} << level;
    std::vector<double> values(cells * m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < cells; ++k) values[k * m + j] = std::bit_cast<double>(get_u64(in));
    return BrownianTree(m, horizon, static_cast<int>(level), seed, stream, std::move(values));
}

}  // namespace sdelab
