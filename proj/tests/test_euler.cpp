#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <optional>

#include "sdelab/errors.hpp"
#include "sdelab/euler.hpp"
#include "sdelab/model.hpp"
#include "sdelab/noise.hpp"

using namespace sdelab;

namespace {

EulerConfig config_for(int level, double horizon, Vector x0, double r_stop = std::numeric_limits<double>::infinity())
{
    EulerConfig c;
    c.level = level;
    c.horizon = horizon;
    c.x0 = std::move(x0);
    c.r_stop = r_stop;
    return c;
}

}  // namespace

TEST(EulerPath, ZeroCoefficientsGiveConstantPath)
{
    const auto sys = make_zero(2, 3);
    const auto tree = sample_tree(3, 1.0, 8, 4, 0);
    const auto path = euler_path(sys, config_for(8, 1.0, {0.5, -2.0}), tree);
    ASSERT_EQ(path.size(), 257u);
    EXPECT_FALSE(path.exploded());
    for (std::size_t k = 0; k < path.size(); ++k) {
        EXPECT_EQ(path.state(k)[0], 0.5);
        EXPECT_EQ(path.state(k)[1], -2.0);
    }
}

TEST(EulerPath, LinearDecayIsExactGeometricRecursion)
{
    const auto sys = make_linear(1, -1.0, 0.0);
    const int level = 9;
    const auto tree = sample_tree(1, 1.0, level, 1, 0);
    const auto path = euler_path(sys, config_for(level, 1.0, {1.0}), tree);
    const double h = 1.0 / 512.0;
    double expected = 1.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        ASSERT_EQ(path.state(k)[0], expected) << k;
        EXPECT_EQ(path.times()[k], static_cast<double>(k) * h);
        expected = expected + (-expected) * h;
    }
    // (1 - h)^k in closed form agrees to rounding
    EXPECT_NEAR(path.final_state()[0], std::pow(1.0 - h, 512), 1e-14);
}

TEST(EulerPath, BlowupStopsByRadiusNearPiOverTwo)
{
    const auto sys = make_oracle(OracleKind::deterministic_blowup, {});
    const int level = 10;
    const double T = 3.0;
    const auto tree = sample_tree(1, T, level, 1, 0);
    const auto path = euler_path(sys, config_for(level, T, {0.0}, 1e6), tree);
    ASSERT_TRUE(path.stopped().has_value());
    EXPECT_EQ(path.stopped()->reason, StopReason::radius);
    const double t_exit = path.times()[path.stopped()->index];
    EXPECT_GE(t_exit, 1.4);
    EXPECT_LE(t_exit, 1.7);

    // independent recursion of the same scheme
    const double h = T / 1024.0;
    double x = 0.0;
    std::size_t k = 0;
    while (std::fabs(x) < 1e6) {
        x = x + (1.0 + x * x) * h;
        ++k;
    }
    EXPECT_EQ(path.stopped()->index, k);
    EXPECT_EQ(path.final_state()[0], x);
    EXPECT_GT(t_exit, std::numbers::pi / 2 - 0.05);
}

TEST(EulerPath, NonFiniteStateIsDistinguishedFromRadius)
{
    // finite coefficients whose Euler update overflows
    const auto sys = make_linear(1, 1.0, 0.0);
    const auto tree = sample_tree(1, 16.0, 4, 1, 0);
    const auto path = euler_path(sys, config_for(4, 16.0, {1e308}), tree);
    ASSERT_TRUE(path.stopped().has_value());
    EXPECT_EQ(path.stopped()->reason, StopReason::nonfinite);
    EXPECT_EQ(path.stopped()->index, 1u);
}

TEST(EulerPath, TruncationRecordsOnlyTheFinalStateOutside)
{
    const auto sys = make_oracle(OracleKind::gbm, {.mu = 1.0, .vol = 1.5});
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto tree = sample_tree(1, 2.0, 10, 3, s);
        const auto path = euler_path(sys, config_for(10, 2.0, {1.0}, 5.0), tree);
        for (std::size_t k = 0; k + 1 < path.size(); ++k) ASSERT_LT(std::fabs(path.state(k)[0]), 5.0);
        if (path.exploded()) {
            EXPECT_GE(std::fabs(path.final_state()[0]), 5.0);
            EXPECT_EQ(path.stopped()->index, path.size() - 1);
        }
    }
}

TEST(EulerPath, SupNormIsRunningMaximum)
{
    const auto sys = make_oracle(OracleKind::ou, {.theta = 1.0, .vol = 1.0});
    const auto tree = sample_tree(1, 1.0, 8, 9, 2);
    const auto path = euler_path(sys, config_for(8, 1.0, {0.3}), tree);
    double running = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        running = std::max(running, std::fabs(path.state(k)[0]));
        ASSERT_EQ(path.sup_norm_running()[k], running);
    }
}

TEST(EulerPath, ReplayReproducesEveryStep)
{
    const auto sys = make_cube_root(2);
    const auto tree = sample_tree(2, 1.0, 12, 21, 5);
    const int level = 9;
    const auto path = euler_path(sys, config_for(level, 1.0, {1.0, -0.5}), tree);
    const auto inc = increments_at_level(tree, level);
    const double h = 1.0 / 512.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const auto x = path.state(k);
        const auto b = drift_eval(sys, path.times()[k], x);
        const auto s = diffusion_eval(sys, path.times()[k], x);
        const auto dB = inc.at(k);
        for (std::size_t i = 0; i < 2; ++i) {
            double noise = 0.0;
            for (std::size_t j = 0; j < 2; ++j) noise += s(i, j) * dB[j];
            ASSERT_EQ(path.state(k + 1)[i], x[i] + b[i] * h + noise) << k;
        }
    }
}

TEST(EulerPath, ZeroNoiseEqualsExplicitEuler)
{
    const auto sys = make_linear(2, -0.7, 0.0);
    const auto tree = sample_tree(2, 2.0, 7, 1, 1);
    const auto path = euler_path(sys, config_for(7, 2.0, {1.0, 2.0}), tree);
    const double h = 2.0 / 128.0;
    double a = 1.0, b = 2.0;
    for (std::size_t k = 1; k < path.size(); ++k) {
        a = a + (-0.7 * a) * h;
        b = b + (-0.7 * b) * h;
        ASSERT_EQ(path.state(k)[0], a);
        ASSERT_EQ(path.state(k)[1], b);
    }
}

TEST(EulerPath, InputErrors)
{
    const auto sys = make_cube_root(2);
    const auto tree = sample_tree(2, 1.0, 6, 1, 0);
    EXPECT_THROW(euler_path(sys, config_for(6, 1.0, {1.0}), tree), UsageError);
    EXPECT_THROW(euler_path(sys, config_for(7, 1.0, {1.0, 1.0}), tree), UsageError);
    EXPECT_THROW(euler_path(sys, config_for(6, 2.0, {1.0, 1.0}), tree), UsageError);
    EXPECT_THROW(euler_path(sys, config_for(6, 1.0, {1.0, 1.0}, 1.0), tree), UsageError);
    const auto tree1 = sample_tree(1, 1.0, 6, 1, 0);
    EXPECT_THROW(euler_path(sys, config_for(6, 1.0, {1.0, 1.0}), tree1), UsageError);
}

TEST(EulerPath, NonFiniteCoefficientIsModelDomainError)
{
    SdeSystem sys = make_zero(1, 1);
    sys.drift = [](double, std::span<const double> x, std::span<double> out) { out[0] = std::log(x[0]); };
    const auto tree = sample_tree(1, 1.0, 4, 1, 0);
    EXPECT_THROW(euler_path(sys, config_for(4, 1.0, {-1.0}), tree), ModelDomainError);
}

// ---------------------------------------------------------------------------
// Coupled runs
// ---------------------------------------------------------------------------

TEST(Coupled, DegenerateResolutionIsRejected)
{
    const auto sys = make_cube_root(1);
    const auto tree = sample_tree(1, 1.0, 10, 1, 0);
    EXPECT_THROW(coupled_resolutions(sys, 8, 8, config_for(8, 1.0, {1.0}), tree), UsageError);
    EXPECT_THROW(coupled_resolutions(sys, 9, 8, config_for(8, 1.0, {1.0}), tree), UsageError);
    EXPECT_THROW(coupled_resolutions(sys, 8, 11, config_for(8, 1.0, {1.0}), tree), UsageError);
}

TEST(Coupled, ZeroSystemHasZeroXi)
{
    const auto sys = make_zero(2, 2);
    const auto tree = sample_tree(2, 1.0, 10, 1, 0);
    const auto rec = coupled_resolutions(sys, 5, 10, config_for(5, 1.0, {1.0, 1.0}), tree);
    ASSERT_EQ(rec.size(), 33u);
    for (double v : rec.xi) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(rec.min_distance, 0.0);
    EXPECT_FALSE(rec.tau.has_value());
    for (double v : rec.defect_norm) EXPECT_EQ(v, 0.0);
}

TEST(Coupled, ResolutionsMatchIndependentRunsBitwise)
{
    const auto sys = make_oracle(OracleKind::ou, {.theta = 1.0, .vol = 1.0});
    const auto tree = sample_tree(1, 1.0, 12, 77, 3);
    const int lc = 6, lf = 11;
    const auto rec = coupled_resolutions(sys, lc, lf, config_for(lc, 1.0, {1.0}), tree);
    const auto coarse = euler_path(sys, config_for(lc, 1.0, {1.0}), increments_at_level(tree, lc));
    const auto fine = euler_path(sys, config_for(lf, 1.0, {1.0}), increments_at_level(tree, lf));
    ASSERT_EQ(rec.first.size(), coarse.size());
    ASSERT_EQ(rec.size(), coarse.size());
    const std::size_t ratio = std::size_t{1} << (lf - lc);
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        ASSERT_EQ(rec.first.state(k)[0], coarse.state(k)[0]);
        ASSERT_EQ(rec.second.state(k)[0], fine.state(k * ratio)[0]);
        const double diff = coarse.state(k)[0] - fine.state(k * ratio)[0];
        ASSERT_EQ(rec.xi[k], diff * diff);
        ASSERT_GE(rec.xi[k], 0.0);
    }
    double min_xi = rec.xi[0];
    for (double v : rec.xi) min_xi = std::min(min_xi, v);
    EXPECT_EQ(rec.min_distance * rec.min_distance, min_xi);
}

TEST(Coupled, DefectIsLeftEndpointLag)
{
    // b = 0, sigma = 1: X^{(n)}(t) = x0 + B(kappa(t)) + (B(t) - B(kappa(t))), so the
    // defect p(t) = X(kappa(t)) - X(t) is minus the Brownian increment inside the
    // half-open cell, so the last finest child (which reaches the next node) is excluded.
    const auto sys = make_linear(1, 0.0, 1.0);
    const int lc = 4, lf = 8;
    const auto tree = sample_tree(1, 1.0, lf, 5, 0);
    const auto rec = coupled_resolutions(sys, lc, lf, config_for(lc, 1.0, {0.0}), tree);
    const auto fine = tree.finest();
    const std::size_t ratio = std::size_t{1} << (lf - lc);
    for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
        double partial = 0.0, worst = 0.0;
        for (std::size_t j = 0; j + 1 < ratio; ++j) {
            partial += fine.at(k * ratio + j)[0];
            worst = std::max(worst, std::fabs(partial));
        }
        EXPECT_NEAR(rec.defect_norm[k], worst, 1e-12) << k;
    }
}

TEST(Coupled, OuMaxXiShrinksWithCoarseLevel)
{
    const auto sys = make_oracle(OracleKind::ou, {.theta = 1.0, .vol = 1.0});
    double coarse6 = 0.0, coarse10 = 0.0;
    const std::size_t paths = 500;
    for (std::size_t i = 0; i < paths; ++i) {
        const auto tree = sample_tree(1, 1.0, 12, 2024, i);
        const auto a = coupled_resolutions(sys, 6, 12, config_for(6, 1.0, {1.0}), tree);
        const auto b = coupled_resolutions(sys, 10, 12, config_for(10, 1.0, {1.0}), tree);
        coarse6 += *std::max_element(a.xi.begin(), a.xi.end());
        coarse10 += *std::max_element(b.xi.begin(), b.xi.end());
    }
    EXPECT_GT(coarse6 / paths, coarse10 / paths);
}

TEST(Coupled, TauIsFirstXiAboveEps0)
{
    const auto sys = make_linear(1, 0.0, 1.0);
    const auto tree = sample_tree(1, 1.0, 12, 8, 0);
    auto cfg = config_for(2, 1.0, {0.0});
    cfg.eps0 = 1e-4;
    const auto rec = coupled_resolutions(sys, 2, 12, cfg, tree);
    // Brownian path is identical at grid points for b = 0, sigma = 1: xi = 0 up to rounding.
    for (double v : rec.xi) EXPECT_LE(v, 1e-28);
    EXPECT_FALSE(rec.tau.has_value());

    const auto gbm = make_oracle(OracleKind::gbm, {.mu = 0.0, .vol = 2.0});
    cfg.eps0 = 1e-3;
    cfg.x0 = {1.0};
    const auto rec2 = coupled_resolutions(gbm, 2, 12, cfg, tree);
    std::optional<double> expected;
    for (std::size_t k = 0; k < rec2.size(); ++k) {
        if (rec2.xi[k] >= cfg.eps0) {
            expected = rec2.first.times()[k];
            break;
        }
    }
    ASSERT_TRUE(expected.has_value());
    EXPECT_EQ(rec2.tau, expected);
}

TEST(CoupledStarts, IdenticalStartsAreRejected)
{
    const auto sys = make_cube_root(1);
    const auto tree = sample_tree(1, 1.0, 6, 1, 0);
    EXPECT_THROW(coupled_starts(sys, config_for(6, 1.0, {0.0}), Vector{0.5}, Vector{0.5}, tree), UsageError);
}

TEST(CoupledStarts, ZeroSystemKeepsDistance)
{
    const auto sys = make_zero(1, 1);
    const auto tree = sample_tree(1, 1.0, 6, 1, 0);
    const auto rec = coupled_starts(sys, config_for(6, 1.0, {0.0}), Vector{0.0}, Vector{1.0}, tree);
    EXPECT_EQ(rec.min_distance, 1.0);
    EXPECT_FALSE(first_passage_below(rec, 0.5).has_value());
}

TEST(CoupledStarts, LinearContractionMinDistance)
{
    const auto sys = make_linear(1, -1.0, 0.0);
    const int level = 10;
    const auto tree = sample_tree(1, 1.0, level, 1, 0);
    const auto rec = coupled_starts(sys, config_for(level, 1.0, {0.0}), Vector{0.0}, Vector{1.0}, tree);
    const double h = 1.0 / 1024.0;
    EXPECT_NEAR(rec.min_distance, std::pow(1.0 - h, 1024), 1e-14);
    EXPECT_NEAR(rec.min_distance, std::exp(-1.0), 1e-3);
    const auto hit = first_passage_below(rec, std::exp(-1.0) - 0.01);
    EXPECT_FALSE(hit.has_value());
    const auto hit2 = first_passage_below(rec, 0.5);
    ASSERT_TRUE(hit2.has_value());
    // first k with (1 - h)^k <= 0.5
    double v = 1.0;
    std::size_t k = 0;
    while (v > 0.5) {
        v = v + (-v) * h;
        ++k;
    }
    EXPECT_EQ(*hit2, static_cast<double>(k) * h);
}

TEST(CoupledStarts, SharedNoiseAcrossStarts)
{
    const auto sys = make_linear(1, 0.0, 1.0);
    const auto tree = sample_tree(1, 1.0, 8, 3, 3);
    const auto rec = coupled_starts(sys, config_for(8, 1.0, {0.0}), Vector{0.0}, Vector{0.25}, tree);
    for (double v : rec.xi) EXPECT_NEAR(v, 0.0625, 1e-14);
}

TEST(Restrict, KeepsOffGridStop)
{
    const auto sys = make_oracle(OracleKind::deterministic_blowup, {});
    const auto tree = sample_tree(1, 3.0, 10, 1, 0);
    const auto fine = euler_path(sys, config_for(10, 3.0, {0.0}, 1e6), tree);
    ASSERT_TRUE(fine.exploded());
    const auto coarse = restrict_to_coarse(fine, 8);
    ASSERT_TRUE(coarse.exploded());
    EXPECT_EQ(coarse.final_state()[0], fine.final_state()[0]);
    EXPECT_EQ(coarse.times()[coarse.size() - 1], fine.times()[fine.size() - 1]);
    for (std::size_t k = 0; k + 1 < coarse.size(); ++k) EXPECT_EQ(coarse.state(k)[0], fine.state(8 * k)[0]);
}
