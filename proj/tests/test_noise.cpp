#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "sdelab/errors.hpp"
#include "sdelab/noise.hpp"
#include "sdelab/philox.hpp"

using namespace sdelab;

TEST(Philox, KnownAnswerZeroKeyZeroCounter)
{
    // Random123 known-answer vector for philox4x32-10.
    const auto out = Philox4x32::block({0u, 0u}, {0u, 0u, 0u, 0u});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes)
{
    const auto out = Philox4x32::block({0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out[0], 0x408f276du);
    EXPECT_EQ(out[1], 0x41c83b0eu);
    EXPECT_EQ(out[2], 0xa20bc7c6u);
    EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(CounterRng, FillMatchesPointwiseDraws)
{
    CounterRng rng(42, 7);
    std::vector<double> block(11);
    rng.fill_normal(block, 3);
    for (std::size_t i = 0; i < block.size(); ++i) EXPECT_EQ(block[i], rng.normal(3 + i));
}

TEST(SampleTree, DeterministicForFixedSeedAndStream)
{
    const auto a = sample_tree(2, 1.0, 8, 99, 5);
    const auto b = sample_tree(2, 1.0, 8, 99, 5);
    EXPECT_TRUE(a == b);
}

TEST(SampleTree, SubstreamsDiffer)
{
    const auto a = sample_tree(1, 1.0, 8, 99, 0);
    const auto b = sample_tree(1, 1.0, 8, 99, 1);
    EXPECT_FALSE(a == b);
    bool any_differs = false;
    for (std::size_t k = 0; k < a.finest().cells(); ++k) any_differs |= a.finest().at(k)[0] != b.finest().at(k)[0];
    EXPECT_TRUE(any_differs);
}

TEST(SampleTree, LevelZeroIsTerminalValue)
{
    const auto tree = sample_tree(1, 1.0, 2, 3, 0);
    const auto& f = tree.finest();
    ASSERT_EQ(f.cells(), 4u);
    const auto top = increments_at_level(tree, 0);
    ASSERT_EQ(top.cells(), 1u);
    EXPECT_EQ(top.at(0)[0], (f.at(0)[0] + f.at(1)[0]) + (f.at(2)[0] + f.at(3)[0]));
    EXPECT_NEAR(top.at(0)[0], tree.value_at(4)[0], 1e-15);
}

TEST(SampleTree, FinestLevelIsVerbatim)
{
    const auto tree = sample_tree(3, 2.0, 5, 1, 1);
    const auto same = increments_at_level(tree, 5);
    const auto a = tree.finest().values();
    const auto b = same.values();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(SampleTree, LevelGuards)
{
    EXPECT_THROW(sample_tree(1, 1.0, 25, 1, 0), ResourceError);
    EXPECT_THROW(sample_tree(1, 0.0, 4, 1, 0), UsageError);
    const auto tree = sample_tree(1, 1.0, 4, 1, 0);
    EXPECT_THROW(increments_at_level(tree, 5), UsageError);
    EXPECT_THROW(increments_at_level(tree, -1), UsageError);
}

// Refinement identity over random trees: every level is exactly the
// pairwise sum of the next finer level.
TEST(SampleTree, RefinementIdentityIsExact)
{
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const std::size_t m = 1 + seed % 3;
        const int L = 1 + static_cast<int>(seed % 9);
        const auto tree = sample_tree(m, 0.5 + static_cast<double>(seed), L, seed * 7919, seed);
        for (int l = 0; l < L; ++l) {
            const auto coarse = increments_at_level(tree, l);
            const auto fine = increments_at_level(tree, l + 1);
            for (std::size_t k = 0; k < coarse.cells(); ++k)
                for (std::size_t j = 0; j < m; ++j)
                    ASSERT_EQ(coarse.at(k)[j], fine.at(2 * k)[j] + fine.at(2 * k + 1)[j])
                        << "seed " << seed << " level " << l << " cell " << k;
        }
    }
}

TEST(SampleTree, IncrementVarianceAndMean)
{
    // 2^14 = 16384 draws per coordinate.
    const int L = 14;
    const double T = 2.0;
    const auto tree = sample_tree(2, T, L, 2024, 0);
    const double h = tree.finest_step();
    const auto n = static_cast<double>(tree.finest().cells());
    for (std::size_t j = 0; j < 2; ++j) {
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t k = 0; k < tree.finest().cells(); ++k) {
            const double v = tree.finest().at(k)[j];
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / n;
        const double var = sum_sq / n - mean * mean;
        EXPECT_LT(std::fabs(var - h) / h, 0.05) << "coordinate " << j;
        EXPECT_LT(std::fabs(mean), 4.0 * std::sqrt(h / n)) << "coordinate " << j;
    }
}

TEST(SampleTree, MeanAcrossPathsWithinFourSigma)
{
    const int L = 4;
    const std::size_t paths = 10000;
    double sum = 0.0;
    for (std::size_t p = 0; p < paths; ++p) sum += sample_tree(1, 1.0, L, 11, p).finest().at(3)[0];
    const double h = 1.0 / 16.0;
    EXPECT_LT(std::fabs(sum / paths), 4.0 * std::sqrt(h / paths));
}

TEST(TreeDump, RoundTripAndLayout)
{
    const auto tree = sample_tree(2, 1.5, 3, 77, 9);
    std::stringstream buf;
    write_tree(tree, buf);
    const std::string bytes = buf.str();
    ASSERT_EQ(bytes.size(), 5 * 8 + 8 * 2 * 8u);
    // First header field: m = 2, little-endian.
    EXPECT_EQ(static_cast<unsigned char>(bytes[0]), 2u);
    for (int i = 1; i < 8; ++i) EXPECT_EQ(bytes[i], 0);
    // Payload is coordinate-major: the second coordinate's first increment
    // follows all 8 increments of the first coordinate.
    double second_coord_first;
    std::memcpy(&second_coord_first, bytes.data() + 40 + 8 * 8, 8);
    EXPECT_EQ(second_coord_first, tree.finest().at(0)[1]);

    std::stringstream in(bytes);
    const auto back = read_tree(in);
    EXPECT_TRUE(back == tree);
}

TEST(TreeDump, TruncatedInputIsRejected)
{
    std::stringstream in(std::string(12, '\0'));
    EXPECT_THROW(read_tree(in), UsageError);
}
