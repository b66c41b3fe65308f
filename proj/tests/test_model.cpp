#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sdelab/control.hpp"
#include "sdelab/errors.hpp"
#include "sdelab/model.hpp"
#include "sdelab/philox.hpp"
#include "sdelab/quadrature.hpp"
#include "sdelab/registry.hpp"

using namespace sdelab;

TEST(CubeRoot, DriftExamples)
{
    const auto sys = make_cube_root(1);
    EXPECT_EQ(drift_eval(sys, 0.0, Vector{1.0})[0], -1.0);
    EXPECT_EQ(drift_eval(sys, 0.0, Vector{0.0})[0], 0.0);
    EXPECT_DOUBLE_EQ(drift_eval(sys, 0.0, Vector{-27.0})[0], 3.0);
}

TEST(CubeRoot, DiffusionUsesRealRoot)
{
    const auto sys = make_cube_root(1);
    EXPECT_DOUBLE_EQ(diffusion_eval(sys, 0.0, Vector{-8.0})(0, 0), 4.0);
}

TEST(CubeRoot, TwoDimensionalShape)
{
    const auto sys = make_cube_root(2);
    EXPECT_EQ(sys.m, 2u);
    const Vector x{8.0, -1.0};
    const auto s = diffusion_eval(sys, 0.0, x);
    ASSERT_EQ(s.rows, 2u);
    ASSERT_EQ(s.cols, 2u);
    EXPECT_DOUBLE_EQ(s(0, 0), 4.0);
    EXPECT_DOUBLE_EQ(s(1, 1), 1.0);
    EXPECT_EQ(s(0, 1), 0.0);
    EXPECT_EQ(s(1, 0), 0.0);
    const auto b = drift_eval(sys, 0.0, x);
    EXPECT_DOUBLE_EQ(b[0], -2.0);
    EXPECT_DOUBLE_EQ(b[1], 1.0);
}

TEST(CubeRoot, SignedRootSymmetryIsExact)
{
    const auto sys = make_cube_root(3);
    CounterRng rng(5, 0);
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const Vector x{10 * rng.normal(3 * i), 1e-6 * rng.normal(3 * i + 1), 1e4 * rng.normal(3 * i + 2)};
        const Vector neg{-x[0], -x[1], -x[2]};
        const auto bx = drift_eval(sys, 0.0, x);
        const auto bn = drift_eval(sys, 0.0, neg);
        const auto sx = diffusion_eval(sys, 0.0, x);
        const auto sn = diffusion_eval(sys, 0.0, neg);
        for (std::size_t j = 0; j < 3; ++j) {
            ASSERT_EQ(bn[j], -bx[j]);
            ASSERT_EQ(sn(j, j), sx(j, j));
        }
    }
}

TEST(Rotation, Examples)
{
    const auto sys = make_rotation(1.0);
    const Vector x{1.0, 0.0};
    const auto b = drift_eval(sys, 0.0, x);
    EXPECT_EQ(b[0], -1.0);
    EXPECT_EQ(b[1], 0.0);
    const auto s = diffusion_eval(sys, 0.0, x);
    ASSERT_EQ(s.rows, 2u);
    ASSERT_EQ(s.cols, 1u);
    EXPECT_EQ(s(0, 0), 0.0);
    EXPECT_EQ(s(1, 0), 1.0);
    // |sigma|^2 + 2 <x, b> = 1 - 2 at |x| = 1
    EXPECT_EQ(s(0, 0) * s(0, 0) + s(1, 0) * s(1, 0) + 2.0 * (x[0] * b[0] + x[1] * b[1]), -1.0);

    const auto b0 = drift_eval(sys, 0.0, Vector{0.0, 0.0});
    const auto s0 = diffusion_eval(sys, 0.0, Vector{0.0, 0.0});
    EXPECT_EQ(b0[0], 0.0);
    EXPECT_EQ(b0[1], 0.0);
    EXPECT_EQ(s0(0, 0), 0.0);
    EXPECT_EQ(s0(1, 0), 0.0);
}

TEST(Rotation, DiffusionOrthogonalToState)
{
    for (double r : {0.5, 1.0, 2.5}) {
        const auto sys = make_rotation(r);
        CounterRng rng(17, static_cast<std::uint64_t>(r * 10));
        for (std::uint64_t i = 0; i < 1000; ++i) {
            const Vector x{3 * rng.normal(2 * i), 3 * rng.normal(2 * i + 1)};
            const auto s = diffusion_eval(sys, 0.0, x);
            const double scale = std::hypot(s(0, 0), s(1, 0)) * norm(x);
            EXPECT_LE(std::fabs(s(0, 0) * x[0] + s(1, 0) * x[1]), 4e-16 * scale);
        }
    }
}

TEST(Oracle, NoiselessOuDecay)
{
    const auto sys = make_oracle(OracleKind::ou, {.theta = 1.0, .vol = 0.0});
    const auto tree = sample_tree(1, 1.0, 6, 1, 0);
    EXPECT_NEAR(sys.exact_solution(1.0, Vector{1.0}, tree)[0], std::exp(-1.0), 1e-15);
    // drift equals -theta x exactly
    EXPECT_EQ(drift_eval(sys, 0.0, Vector{0.3})[0], -0.3);
    const auto ou2 = make_oracle(OracleKind::ou, {.theta = 2.5, .vol = 0.0});
    EXPECT_EQ(drift_eval(ou2, 0.0, Vector{0.3})[0], -2.5 * 0.3);
}

TEST(Oracle, ConstantGbm)
{
    const auto sys = make_oracle(OracleKind::gbm, {.mu = 0.0, .vol = 0.0});
    const auto tree = sample_tree(1, 3.0, 5, 1, 0);
    EXPECT_EQ(sys.exact_solution(3.0, Vector{2.0}, tree)[0], 2.0);
    EXPECT_EQ(sys.exact_solution(1.5, Vector{2.0}, tree)[0], 2.0);
}

TEST(Oracle, BlowupTime)
{
    const auto sys = make_oracle(OracleKind::deterministic_blowup, {});
    const auto tree = sample_tree(1, 3.0, 2, 1, 0);
    EXPECT_NEAR(sys.exact_solution(1.0, Vector{0.0}, tree)[0], std::tan(1.0), 1e-14);
    EXPECT_TRUE(std::isinf(sys.exact_solution(std::numbers::pi / 2 + 1e-9, Vector{0.0}, tree)[0]));
    EXPECT_TRUE(std::isfinite(sys.exact_solution(std::numbers::pi / 2 - 1e-6, Vector{0.0}, tree)[0]));
}

TEST(Oracle, InvalidParameters)
{
    EXPECT_THROW(make_oracle(OracleKind::ou, {.theta = 0.0, .vol = 1.0}), UsageError);
    EXPECT_THROW(make_oracle(OracleKind::ou, {.theta = 1.0, .vol = -1.0}), UsageError);
    EXPECT_THROW(make_oracle(OracleKind::gbm, {.mu = 0.0, .vol = -0.1}), UsageError);
    EXPECT_THROW(make_rotation(0.0), UsageError);
    EXPECT_THROW(make_cube_root(0), UsageError);
}

TEST(ModelEval, ZeroDiffusionGivesZeroMatrix)
{
    const auto sys = make_zero(3, 2);
    const auto s = diffusion_eval(sys, 0.0, Vector{1.0, -2.0, 3.0});
    ASSERT_EQ(s.data.size(), 6u);
    for (double v : s.data) EXPECT_EQ(v, 0.0);
}

TEST(ModelEval, DimensionMismatchIsUsageError)
{
    const auto sys = make_cube_root(2);
    EXPECT_THROW(drift_eval(sys, 0.0, Vector{1.0}), UsageError);
    EXPECT_THROW(diffusion_eval(sys, 0.0, Vector{1.0, 2.0, 3.0}), UsageError);
    EXPECT_THROW(drift_eval(sys, -1.0, Vector{1.0, 2.0}), UsageError);
}

TEST(ModelEval, NonFiniteOutputNamesCoordinate)
{
    SdeSystem sys = make_zero(2, 1);
    sys.label = "bad";
    sys.drift = [](double, std::span<const double> x, std::span<double> out) {
        out[0] = x[0];
        out[1] = 1.0 / x[1];
    };
    try {
        drift_eval(sys, 0.0, Vector{1.0, 0.0});
        FAIL() << "expected ModelDomainError";
    } catch (const ModelDomainError& e) {
        EXPECT_NE(std::string(e.what()).find("coordinate 2"), std::string::npos) << e.what();
    }
}

TEST(Registry, BuildsEveryBuiltin)
{
    for (const auto& name : builtin_models()) {
        const auto sys = make_model({name, {}});
        EXPECT_GE(sys.d, 1u) << name;
    }
    EXPECT_EQ(make_model({"cube-root", {{"d", 3}}}).d, 3u);
    EXPECT_THROW(make_model({"nope", {}}), UsageError);
    EXPECT_THROW(make_model({"rotation", {{"q", 1}}}), UsageError);
    EXPECT_THROW(make_model({"cube-root", {{"d", 1.5}}}), UsageError);
}

// ---------------------------------------------------------------------------
// Control functions
// ---------------------------------------------------------------------------

TEST(Control, XlogAtInverseE)
{
    const auto eta = make_xlog_control(ControlKind::eta, {.R = 1.0});
    EXPECT_NEAR(control_eval(eta, std::exp(-1.0)), std::exp(-1.0), 1e-16);
    EXPECT_EQ(control_eval(eta, 0.0), 0.0);
}

TEST(Control, IdentityGamma)
{
    const auto gamma = make_linear_control(ControlKind::gamma, 1.0);
    EXPECT_EQ(control_eval(gamma, 3.0), 3.0);
}

TEST(Control, DomainIsEnforced)
{
    const auto eta = make_xlog_control(ControlKind::eta);
    EXPECT_THROW(control_eval(eta, -0.1), UsageError);
    EXPECT_THROW(control_eval(eta, 1.0), UsageError);
    EXPECT_THROW(make_xlog_control(ControlKind::eta, {.c0 = 0.5, .eps0 = 0.6}), UsageError);
    EXPECT_THROW(make_xlog_control(ControlKind::eta, {.c0 = 1.0}), UsageError);
}

TEST(Control, DefaultsAreExplicit)
{
    const ControlParams p;
    EXPECT_EQ(p.c0, 0.5);
    EXPECT_EQ(p.eps0, p.c0);
    EXPECT_EQ(p.R, 10.0);
}

TEST(Control, BuiltinsAreNondecreasingAndVanishAtZero)
{
    const std::vector<ControlFunction> controls{
        make_xlog_control(ControlKind::eta), make_xlog_control(ControlKind::gamma_r, {.R = 2.0}),
        make_linear_control(ControlKind::gamma_r, 3.0), make_zero_control(ControlKind::eta)};
    for (const auto& c : controls) {
        EXPECT_EQ(c(0.0), 0.0) << c.name();
        const double top = std::min(c.domain_max(), 0.99);
        double prev = c(0.0);
        for (int i = 1; i <= 5000; ++i) {
            const double x = top * i / 5000.0;
            const double v = c(x);
            ASSERT_GE(v, prev) << c.name() << " at " << x;
            prev = v;
        }
    }
}

TEST(Control, XlogDerivativeMatchesFiniteDifference)
{
    const auto g = make_xlog_control(ControlKind::gamma_r, {.R = 3.0});
    for (double x : {1e-6, 1e-3, 0.01, 0.2, 0.3}) {
        const double h = 1e-6 * x;
        const double fd = (g(x + h) - g(x - h)) / (2 * h);
        EXPECT_NEAR(g.derivative(x), fd, 1e-5 * std::fabs(fd) + 1e-9) << x;
    }
}

namespace {

// int_x^{eps0} ds / c(s), integrated in u = log s so the 1/s-type
// singularity becomes a smooth integrand.
double reciprocal_integral(const ControlFunction& c, double x, double eps0)
{
    return adaptive_simpson(
               [&](double u) {
                   const double s = std::exp(u);
                   return s / c(s);
               },
               std::log(x), std::log(eps0), {.rel_tol = 1e-10})
        .value;
}

}  // namespace

TEST(Control, LinearGammaRReciprocalIntegralDiverges)
{
    const auto g = make_linear_control(ControlKind::gamma_r, 1.0);
    const double eps0 = g.params().eps0;
    const double near = reciprocal_integral(g, 1e-12, eps0);
    const double far = reciprocal_integral(g, 1e-4, eps0);
    EXPECT_GT(near - far, 10.0);
    EXPECT_NEAR(near, std::log(eps0 / 1e-12), 1e-8);
}

// The x log(1/x) family diverges like log log(1/x): unbounded, but only by
// about 1.1 / R between 1e-4 and 1e-12. The check therefore follows the
// closed form down to 1e-300 and requires strict growth at every decade.
TEST(Control, XlogReciprocalIntegralFollowsLogLogDivergence)
{
    for (double R : {1.0, 10.0}) {
        const auto eta = make_xlog_control(ControlKind::eta, {.R = R});
        const double eps0 = eta.params().eps0;
        // Closed form on (0, 1/e]: log log(1/x) / R, plus the flat piece on (1/e, eps0].
        const double knee = std::exp(-1.0);
        auto closed = [&](double x) { return (std::log(std::log(1.0 / x)) - std::log(1.0)) / R + (eps0 - knee) / (R * knee); };
        double prev = -1.0;
        for (int e = 2; e <= 300; e += 2) {
            const double x = std::pow(10.0, -e);
            const double v = reciprocal_integral(eta, x, eps0);
            EXPECT_NEAR(v, closed(x), 1e-7 * closed(x)) << "R=" << R << " x=1e-" << e;
            EXPECT_GT(v, prev);
            prev = v;
        }
        EXPECT_GT(prev, std::log(std::log(1e300)) / R);
    }
}
