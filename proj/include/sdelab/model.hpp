#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sdelab/noise.hpp"

namespace sdelab {

using Vector = std::vector<double>;

/// Dense row-major matrix; used for the d x m diffusion coefficient.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// b(t, x) written into `out` (size d).
using DriftFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;
/// sigma(t, x) written row-major into `out` (size d * m).
using DiffusionFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;
/// Closed-form X_t given x0 and the Brownian path stored in a tree.
using ExactSolutionFn = std::function<Vector(double t, std::span<const double> x0, const BrownianTree& tree)>;

/// dX = b(t, X) dt + sigma(t, X) dB with deterministic coefficients.
/// Immutable after construction; safe to share between threads.
struct SdeSystem {
    std::size_t d = 1;
    std::size_t m = 1;
    DriftFn drift;
    DiffusionFn diffusion;
    std::string label;
    ExactSolutionFn exact_solution;

    bool has_exact_solution() const noexcept { return static_cast<bool>(exact_solution); }
};

/// Evaluates b(t, x). Throws UsageError on a dimension mismatch or t < 0 and
/// ModelDomainError naming the coordinate when the result is not finite.
Vector drift_eval(const SdeSystem& system, double t, std::span<const double> x);
Matrix diffusion_eval(const SdeSystem& system, double t, std::span<const double> x);

/// Cube-root example: m = d, sigma = diag(x_i^{2/3}), b_i = -x_i^{1/3}, with
/// the real cube root for negative arguments.
SdeSystem make_cube_root(std::size_t d);

/// d = 2, m = 1: sigma(x) = |x|^r (-x2, x1)^T, b(x) = -|x|^{2r} x.
SdeSystem make_rotation(double r);

enum class OracleKind { ou, gbm, deterministic_blowup };

struct OracleParams {
    double theta = 1.0;  // OU mean reversion rate
    double mu = 0.0;     // GBM drift
    double vol = 0.0;    // OU / GBM volatility
};

/// One-dimensional reference models with known solutions:
///   ou:                   dX = -theta X dt + vol dB
///   gbm:                  dX = mu X dt + vol X dB
///   deterministic_blowup: dX = (1 + X^2) dt, blows up at pi/2 - atan(x0)
SdeSystem make_oracle(OracleKind kind, const OracleParams& params);

/// b(x) = a x, sigma = s I (d x d). With s = 0 this is a linear ODE.
SdeSystem make_linear(std::size_t d, double a, double s);

/// One-dimensional sigma(x) = sin x, b(x) = -x.
SdeSystem make_sine_diffusion();

/// b = 0, sigma = 0.
SdeSystem make_zero(std::size_t d, std::size_t m);

/// Real cube root and the matching |x|^{2/3}.
double signed_cbrt(double x) noexcept;
double abs_pow_two_thirds(double x) noexcept;

double norm(std::span<const double> x) noexcept;
double squared_norm(std::span<const double> x) noexcept;

}  // namespace sdelab
