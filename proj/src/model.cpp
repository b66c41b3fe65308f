#include "sdelab/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <algorithm>
#include <string>

#include "sdelab/errors.hpp"

namespace sdelab {

double signed_cbrt(double x) noexcept { return std::cbrt(x); }

double abs_pow_two_thirds(double x) noexcept
{
    const double u = std::cbrt(std::fabs(x));
    return u * u;
}

double squared_norm(std::span<const double> x) noexcept
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double norm(std::span<const double> x) noexcept
{
    const double sq = squared_norm(x);
    if (std::isfinite(sq)) return std::sqrt(sq);
    // rescale so large finite states do not report an infinite norm
    double big = 0.0;
    for (double v : x) big = std::max(big, std::fabs(v));
    if (!std::isfinite(big)) return big;
    double acc = 0.0;
    for (double v : x) acc += (v / big) * (v / big);
    return big * std::sqrt(acc);
}

namespace {

void check_input(const SdeSystem& system, double t, std::span<const double> x)
{
    require(x.size() == system.d, "state has dimension " + std::to_string(x.size()) + ", system '" +
                                      system.label + "' expects " + std::to_string(system.d));
    require(t >= 0.0, "time must be nonnegative");
    for (std::size_t i = 0; i < x.size(); ++i)
        require(std::isfinite(x[i]), "state coordinate " + std::to_string(i + 1) + " is not finite");
}

}  // namespace

Vector drift_eval(const SdeSystem& system, double t, std::span<const double> x)
{
    check_input(system, t, x);
    Vector out(system.d, 0.0);
    system.drift(t, x, out);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!std::isfinite(out[i]))
            throw ModelDomainError("drift of '" + system.label + "' is not finite in coordinate " +
                                   std::to_string(i + 1));
    return out;
}

Matrix diffusion_eval(const SdeSystem& system, double t, std::span<const double> x)
{
    check_input(system, t, x);
    Matrix out(system.d, system.m);
    system.diffusion(t, x, out.data);
    for (std::size_t i = 0; i < out.rows; ++i)
        for (std::size_t j = 0; j < out.cols; ++j)
            if (!std::isfinite(out(i, j)))
                throw ModelDomainError("diffusion of '" + system.label + "' is not finite at entry (" +
                                       std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    return out;
}

SdeSystem make_cube_root(std::size_t d)
{
    require(d >= 1, "cube-root model needs d >= 1");
    SdeSystem s;
    s.d = d;
    s.m = d;
    s.label = "cube-root";
    s.drift = [](double, std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -signed_cbrt(x[i]);
    };
    s.diffusion = [d](double, std::span<const double> x, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < d; ++i) out[i * d + i] = abs_pow_two_thirds(x[i]);
    };
    return s;
}

SdeSystem make_rotation(double r)
{
    require(r > 0.0 && std::isfinite(r), "rotation model needs r > 0");
    SdeSystem s;
    s.d = 2;
    s.m = 1;
    s.label = "rotation";
    s.drift = [r](double, std::span<const double> x, std::span<double> out) {
        const double scale = std::pow(squared_norm(x), r);  // |x|^{2r}
        out[0] = -scale * x[0];
        out[1] = -scale * x[1];
    };
    s.diffusion = [r](double, std::span<const double> x, std::span<double> out) {
        const double scale = std::pow(squared_norm(x), 0.5 * r);  // |x|^r
        out[0] = -scale * x[1];
        out[1] = scale * x[0];
    };
    return s;
}

SdeSystem make_oracle(OracleKind kind, const OracleParams& params)
{
    SdeSystem s;
    s.d = 1;
    s.m = 1;
    switch (kind) {
    case OracleKind::ou: {
        require(params.theta > 0.0 && std::isfinite(params.theta), "OU needs theta > 0");
        require(params.vol >= 0.0 && std::isfinite(params.vol), "OU needs vol >= 0");
        const double theta = params.theta;
        const double vol = params.vol;
        s.label = "ou";
        s.drift = [theta](double, std::span<const double> x, std::span<double> out) { out[0] = -theta * x[0]; };
        s.diffusion = [vol](double, std::span<const double>, std::span<double> out) { out[0] = vol; };
        // Stochastic convolution on the finest grid; each cell uses the exact
        // cell average of its exponential kernel.
        s.exact_solution = [theta, vol](double t, std::span<const double> x0, const BrownianTree& tree) {
            const double h = tree.finest_step();
            const auto n = static_cast<std::size_t>(std::llround(t / h));
            require(n <= tree.finest().cells() && std::fabs(n * h - t) <= 1e-9 * (1.0 + t),
                    "OU exact solution needs t on the finest grid of the tree");
            const double weight = -std::expm1(-theta * h) / (theta * h);
            double conv = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                conv += std::exp(-theta * (t - static_cast<double>(k + 1) * h)) * weight * tree.finest().at(k)[0];
            return Vector{x0[0] * std::exp(-theta * t) + vol * conv};
        };
        break;
    }
    case OracleKind::gbm: {
        require(std::isfinite(params.mu), "GBM needs finite mu");
        require(params.vol >= 0.0 && std::isfinite(params.vol), "GBM needs vol >= 0");
        const double mu = params.mu;
        const double vol = params.vol;
        s.label = "gbm";
        s.drift = [mu](double, std::span<const double> x, std::span<double> out) { out[0] = mu * x[0]; };
        s.diffusion = [vol](double, std::span<const double> x, std::span<double> out) { out[0] = vol * x[0]; };
        s.exact_solution = [mu, vol](double t, std::span<const double> x0, const BrownianTree& tree) {
            const double h = tree.finest_step();
            const auto n = static_cast<std::size_t>(std::llround(t / h));
            require(n <= tree.finest().cells() && std::fabs(n * h - t) <= 1e-9 * (1.0 + t),
                    "GBM exact solution needs t on the finest grid of the tree");
            const double b_t = tree.value_at(n)[0];
            return Vector{x0[0] * std::exp((mu - 0.5 * vol * vol) * t + vol * b_t)};
        };
        break;
    }
    case OracleKind::deterministic_blowup: {
        s.label = "blowup";
        s.drift = [](double, std::span<const double> x, std::span<double> out) { out[0] = 1.0 + x[0] * x[0]; };
        s.diffusion = [](double, std::span<const double>, std::span<double> out) { out[0] = 0.0; };
        s.exact_solution = [](double t, std::span<const double> x0, const BrownianTree&) {
            const double shifted = t + std::atan(x0[0]);
            if (shifted >= 0.5 * std::numbers::pi) return Vector{std::numeric_limits<double>::infinity()};
            return Vector{std::tan(shifted)};
        };
        break;
    }
    }
    return s;
}

SdeSystem make_linear(std::size_t d, double a, double s_vol)
{
    require(d >= 1, "linear model needs d >= 1");
    require(std::isfinite(a) && std::isfinite(s_vol), "linear model needs finite coefficients");
    SdeSystem s;
    s.d = d;
    s.m = d;
    s.label = "linear";
    s.drift = [a](double, std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
    };
    s.diffusion = [d, s_vol](double, std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < d; ++i) out[i * d + i] = s_vol;
    };
    return s;
}

SdeSystem make_sine_diffusion()
{
    SdeSystem s;
    s.d = 1;
    s.m = 1;
    s.label = "sine";
    s.drift = [](double, std::span<const double> x, std::span<double> out) { out[0] = -x[0]; };
    s.diffusion = [](double, std::span<const double> x, std::span<double> out) { out[0] = std::sin(x[0]); };
    return s;
}

SdeSystem make_zero(std::size_t d, std::size_t m)
{
    require(d >= 1 && m >= 1, "zero model needs positive dimensions");
    SdeSystem s;
    s.d = d;
    s.m = m;
    s.label = "zero";
    s.drift = [](double, std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
    s.diffusion = [](double, std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    return s;
}

}  // namespace sdelab
