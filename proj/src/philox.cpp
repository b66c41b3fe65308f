#include "sdelab/philox.hpp"

#include <cmath>
#include <numbers>

namespace sdelab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

// 53 random bits mapped onto (0, 1]; never returns 0 so log() is safe.
inline double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept
{
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Key key, Counter ctr) noexcept
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_(stream_id)
{
}

Philox4x32::Counter CounterRng::raw(std::uint64_t block) const noexcept
{
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                                  static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    return Philox4x32::block(key, ctr);
}

std::array<double, 2> CounterRng::uniform_pair(std::uint64_t index) const noexcept
{
    const auto w = raw(index);
    return {to_unit(w[0], w[1]), to_unit(w[2], w[3])};
}

double CounterRng::normal(std::uint64_t index) const noexcept
{
    const auto [u1, u2] = uniform_pair(index >> 1);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (index & 1u) ? radius * std::sin(angle) : radius * std::cos(angle);
}

void CounterRng::fill_normal(std::span<double> out, std::uint64_t first) const noexcept
{
    std::size_t i = 0;
    std::uint64_t index = first;
    if ((index & 1u) && i < out.size()) out[i++] = normal(index++);
    for (; i + 1 < out.size(); i += 2, index += 2) {
        const auto [u1, u2] = uniform_pair(index >> 1);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        out[i] = radius * std::cos(angle);
        out[i + 1] = radius * std::sin(angle);
    }
    if (i < out.size()) out[i] = normal(index);
}

}  // namespace sdelab
