#include "sdelab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdelab/errors.hpp"
#include "sdelab/philox.hpp"

namespace sdelab {

const char* to_string(ConditionId id) noexcept
{
    switch (id) {
    case ConditionId::monotonicity: return "monotonicity";
    case ConditionId::coercivity: return "coercivity";
    case ConditionId::moment: return "moment";
    case ConditionId::confluence: return "confluence";
    case ConditionId::k_ratio: return "k_ratio";
    }
    return "unknown";
}

const char* to_string(Verdict verdict) noexcept
{
    return verdict == Verdict::violated ? "violated" : "no_violation_found";
}

double Margin::tolerance() const noexcept { return 1e-9 * (1.0 + std::fabs(scale)); }

namespace {

// Uniform and normal draws for one sample index, on disjoint substreams.
class SampleRng {
public:
    SampleRng(std::uint64_t seed, std::size_t index) : uniform_(seed, 2 * index), normal_(seed, 2 * index + 1) {}

    double uniform() { return uniform_.uniform_pair(next_u_++)[0]; }
    double log_uniform(double lo, double hi)
    {
        if (!(lo < hi)) return hi;
        return std::exp(std::log(lo) + uniform() * (std::log(hi) - std::log(lo)));
    }
    Vector direction(std::size_t d)
    {
        Vector v(d);
        double n = 0.0;
        do {
            for (auto& c : v) c = normal_.normal(next_n_++);
            n = norm(v);
        } while (n == 0.0);
        for (auto& c : v) c /= n;
        return v;
    }

private:
    CounterRng uniform_;
    CounterRng normal_;
    std::uint64_t next_u_ = 0;
    std::uint64_t next_n_ = 0;
};

Vector scaled(const Vector& v, double s)
{
    Vector out(v);
    for (auto& c : out) c *= s;
    return out;
}

Vector offset(const Vector& x, const Vector& dir, double s)
{
    Vector out(x);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * dir[i];
    return out;
}

double distance(std::span<const double> x, std::span<const double> y)
{
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sq += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(sq);
}

double hs_norm_sq(const Matrix& m)
{
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return s;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct Difference {
    double sigma_sq;      // ||sigma(x) - sigma(y)||^2
    double inner;         // <x - y, b(x) - b(y)>
    double sep_sq;        // |x - y|^2
    double sigma_scale;   // (||sigma(x)|| + ||sigma(y)||)^2
    double drift_scale;   // |x - y| (|b(x)| + |b(y)|)
};

Difference pair_difference(const SdeSystem& system, std::span<const double> x, std::span<const double> y, double t)
{
    const auto bx = drift_eval(system, t, x);
    const auto by = drift_eval(system, t, y);
    const auto sx = diffusion_eval(system, t, x);
    const auto sy = diffusion_eval(system, t, y);
    Difference diff{};
    for (std::size_t i = 0; i < sx.data.size(); ++i) {
        const double delta = sx.data[i] - sy.data[i];
        diff.sigma_sq += delta * delta;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - y[i];
        diff.inner += dx * (bx[i] - by[i]);
        diff.sep_sq += dx * dx;
    }
    const double sn = std::sqrt(hs_norm_sq(sx)) + std::sqrt(hs_norm_sq(sy));
    diff.sigma_scale = sn * sn;
    diff.drift_scale = std::sqrt(diff.sep_sq) * (norm(bx) + norm(by));
    return diff;
}

void check_pair_region(const PairSample& s, const SamplingSpec& spec)
{
    const double slack = 1.0 + 1e-12;
    if (norm(s.x) > spec.radius * slack || norm(s.y) > spec.radius * slack ||
        distance(s.x, s.y) > spec.max_separation * slack ||
        distance(s.x, s.y) < std::min(spec.min_separation, spec.max_separation) * (1.0 - 1e-9))
        throw InternalError("pair sampler produced a pair outside its region");
}

void check_point_region(const PointSample& s, const SamplingSpec& spec)
{
    const double r = norm(s.x);
    if (r > spec.radius * (1.0 + 1e-12) || r < spec.min_radius * (1.0 - 1e-12))
        throw InternalError("point sampler produced a point outside its region");
}

// Worst sample by excess over tolerance; ties resolve to the lowest index.
template <class Describe>
ConditionReport reduce(ConditionId id, const std::vector<Margin>& margins, const SamplingSpec& spec,
                       Describe&& describe)
{
    ConditionReport report;
    report.condition_id = id;
    report.samples_evaluated = margins.size();
    report.sampling_spec = spec;
    if (margins.empty()) return report;
    std::size_t worst = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < margins.size(); ++i) {
        const double excess = margins[i].value - margins[i].tolerance();
        if (excess > worst_excess || (std::isnan(excess) && !std::isnan(worst_excess))) {
            worst_excess = excess;
            worst = i;
        }
    }
    report.worst_margin = margins[worst].value;
    report.tolerance = margins[worst].tolerance();
    report.worst_point = describe(worst);
    report.verdict = report.worst_margin > report.tolerance || std::isnan(report.worst_margin)
                         ? Verdict::violated
                         : Verdict::no_violation_found;
    return report;
}

void validate_spec(const SamplingSpec& spec)
{
    require(spec.count >= 1, "sample count must be positive");
    require(spec.radius > 0.0 && std::isfinite(spec.radius), "sampling radius must be positive and finite");
    require(spec.min_radius >= 0.0 && spec.min_radius <= spec.radius, "need 0 <= min radius <= radius");
    require(spec.max_separation > 0.0 && spec.min_separation > 0.0, "separations must be positive");
    require(spec.t_max >= 0.0, "t_max must be nonnegative");
}

}  // namespace

PairSample sample_pair(const SamplingSpec& spec, std::size_t d, std::size_t index)
{
    SampleRng rng(spec.seed, index);
    const double smax = std::min(spec.max_separation, spec.radius);
    const double smin = std::min(spec.min_separation, smax);
    PairSample s;
    switch (index % 4) {
    case 0: {  // uniform in the ball, log-spaced separation
        const double sep = rng.log_uniform(smin, smax);
        const auto dir = rng.direction(d);
        const double rho = (spec.radius - sep) * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
        s.x = scaled(rng.direction(d), rho);
        s.y = offset(s.x, dir, sep);
        break;
    }
    case 1: {  // both points on one coordinate axis, possibly straddling 0
        const double sep = rng.log_uniform(smin, smax);
        const auto axis = std::min(d - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(d)));
        const double reach = spec.radius - sep;
        const double a = reach * (2.0 * rng.uniform() - 1.0);
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        s.x.assign(d, 0.0);
        s.y.assign(d, 0.0);
        s.x[axis] = a;
        s.y[axis] = a + sign * sep;
        if (std::fabs(s.y[axis]) > spec.radius) s.y[axis] = a - sign * sep;
        break;
    }
    case 2: {  // near the origin, half the time paired with the origin itself
        const double rho_max = std::min({1e-2, spec.radius / 3.0, smax});
        const double rho = rng.log_uniform(std::min(smin, rho_max), rho_max);
        s.x = scaled(rng.direction(d), rho);
        if (rng.uniform() < 0.5) {
            s.y.assign(d, 0.0);
        } else {
            const double sep = std::clamp(2.0 * rho * rng.uniform(), smin, smax);
            s.y = offset(s.x, rng.direction(d), sep);
        }
        if (rng.uniform() < 0.5) std::swap(s.x, s.y);
        break;
    }
    default: {  // every length scale from 1e-6 R to R
        const double sep = rng.log_uniform(smin, smax);
        double rho = rng.log_uniform(1e-6 * spec.radius, spec.radius);
        rho = std::min(rho, spec.radius - sep);
        s.x = scaled(rng.direction(d), rho);
        s.y = offset(s.x, rng.direction(d), sep);
        break;
    }
    }
    s.t = spec.t_max * rng.uniform();
    check_pair_region(s, spec);
    return s;
}

PointSample sample_point(const SamplingSpec& spec, std::size_t d, std::size_t index)
{
    SampleRng rng(spec.seed, index);
    const double lo = spec.min_radius > 0.0 ? spec.min_radius : 1e-8 * spec.radius;
    const double hi = spec.radius;
    PointSample s;
    if (index == 0) {
        s.x.assign(d, 0.0);
        s.x[0] = spec.min_radius;
        return s;
    }
    switch (index % 4) {
    case 0: s.x = scaled(rng.direction(d), rng.log_uniform(lo, hi)); break;
    case 1: {
        const auto axis = std::min(d - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(d)));
        s.x.assign(d, 0.0);
        s.x[axis] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.log_uniform(lo, hi);
        break;
    }
    case 2: {
        const double dd = static_cast<double>(d);
        const double lo_v = std::pow(spec.min_radius, dd);
        const double hi_v = std::pow(hi, dd);
        const double r = std::clamp(std::pow(lo_v + rng.uniform() * (hi_v - lo_v), 1.0 / dd), spec.min_radius, hi);
        s.x = scaled(rng.direction(d), r);
        break;
    }
    default: s.x = scaled(rng.direction(d), rng.uniform() < 0.5 ? std::max(spec.min_radius, lo) : hi); break;
    }
    s.t = spec.t_max * rng.uniform();
    check_point_region(s, spec);
    return s;
}

Margin monotonicity_margin(const SdeSystem& system, const ControlFunction& eta, const ScalarFunction& g,
                           std::span<const double> x, std::span<const double> y, double t)
{
    const auto diff = pair_difference(system, x, y, t);
    const double control = g(t) * eta(diff.sep_sq);
    return {diff.sigma_sq + 2.0 * diff.inner - control,
            diff.sigma_scale + 2.0 * diff.drift_scale + std::fabs(control)};
}

Margin coercivity_margin(const SdeSystem& system, const ControlFunction& gamma, const ScalarFunction& f,
                         std::span<const double> x, double t)
{
    const auto b = drift_eval(system, t, x);
    const double sigma_sq = hs_norm_sq(diffusion_eval(system, t, x));
    const double control = f(t) * (gamma(squared_norm(x)) + 1.0);
    return {sigma_sq + 2.0 * dot(x, b) - control, sigma_sq + 2.0 * norm(x) * norm(b) + std::fabs(control)};
}

namespace {

struct MomentTerms {
    double lhs;
    double scale;
};

MomentTerms moment_terms(const SdeSystem& system, std::span<const double> x, double t)
{
    const auto b = drift_eval(system, t, x);
    const auto sigma = diffusion_eval(system, t, x);
    const double sigma_sq = hs_norm_sq(sigma);
    double proj_sq = 0.0;  // |sigma^T x|^2
    for (std::size_t j = 0; j < sigma.cols; ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i < sigma.rows; ++i) c += sigma(i, j) * x[i];
        proj_sq += c * c;
    }
    const double first = sigma_sq + 2.0 * dot(x, b);
    const double xn = norm(x);
    return {std::max(first, proj_sq), sigma_sq + 2.0 * xn * norm(b) + sigma_sq * xn * xn};
}

}  // namespace

Margin moment_margin(const SdeSystem& system, const ScalarFunction& f, std::span<const double> x, double t)
{
    const auto terms = moment_terms(system, x, t);
    const double control = f(t) * (squared_norm(x) + 1.0);
    return {terms.lhs - control, terms.scale + std::fabs(control)};
}

double moment_ratio(const SdeSystem& system, std::span<const double> x, double t)
{
    return moment_terms(system, x, t).lhs / (squared_norm(x) + 1.0);
}

Margin confluence_margin(const SdeSystem& system, const ControlFunction& gamma_r, double K,
                         std::span<const double> x, std::span<const double> y)
{
    require(K > 0.5, "non-confluence needs K > 1/2");
    const auto diff = pair_difference(system, x, y, 0.0);
    const double weight = 2.0 / (2.0 * K - 1.0);
    const double control = gamma_r(diff.sep_sq);
    return {diff.sigma_sq - weight * diff.inner - control,
            diff.sigma_scale + weight * diff.drift_scale + std::fabs(control)};
}

ConditionReport check_monotonicity(const SdeSystem& system, const ControlFunction& eta, const ScalarFunction& g,
                                   double R, double c0, SamplingSpec spec, const Execution& exec)
{
    require(c0 > 0.0 && c0 < 1.0, "c0 must lie in (0, 1)");
    spec.radius = R;
    spec.max_separation = c0;
    validate_spec(spec);
    const auto margins = map_indices<Margin>(spec.count, exec, [&](std::size_t i) {
        const auto s = sample_pair(spec, system.d, i);
        return monotonicity_margin(system, eta, g, s.x, s.y, s.t);
    });
    return reduce(ConditionId::monotonicity, margins, spec, [&](std::size_t i) {
        auto s = sample_pair(spec, system.d, i);
        return WorstPoint{std::move(s.x), std::move(s.y), s.t};
    });
}

ConditionReport check_coercivity(const SdeSystem& system, const ControlFunction& gamma, const ScalarFunction& f,
                                 double k_radius, SamplingSpec spec, const Execution& exec)
{
    require(k_radius >= 0.0, "coercivity radius must be nonnegative");
    spec.min_radius = k_radius;
    if (spec.radius < k_radius) spec.radius = k_radius;
    validate_spec(spec);
    const auto margins = map_indices<Margin>(spec.count, exec, [&](std::size_t i) {
        const auto s = sample_point(spec, system.d, i);
        return coercivity_margin(system, gamma, f, s.x, s.t);
    });
    return reduce(ConditionId::coercivity, margins, spec, [&](std::size_t i) {
        auto s = sample_point(spec, system.d, i);
        return WorstPoint{std::move(s.x), std::nullopt, s.t};
    });
}

ConditionReport check_moment_condition(const SdeSystem& system, const ScalarFunction& f, SamplingSpec spec,
                                       const Execution& exec)
{
    validate_spec(spec);
    const auto margins = map_indices<Margin>(spec.count, exec, [&](std::size_t i) {
        const auto s = sample_point(spec, system.d, i);
        return moment_margin(system, f, s.x, s.t);
    });
    return reduce(ConditionId::moment, margins, spec, [&](std::size_t i) {
        auto s = sample_point(spec, system.d, i);
        return WorstPoint{std::move(s.x), std::nullopt, s.t};
    });
}

ConditionReport check_confluence_condition(const SdeSystem& system, const ControlFunction& gamma_r, double K,
                                           double R, double c0, SamplingSpec spec, const Execution& exec)
{
    require(K > 0.5, "non-confluence needs K > 1/2, got " + std::to_string(K));
    require(c0 > 0.0 && c0 < 1.0, "c0 must lie in (0, 1)");
    spec.radius = R;
    spec.max_separation = c0;
    validate_spec(spec);
    const auto margins = map_indices<Margin>(spec.count, exec, [&](std::size_t i) {
        const auto s = sample_pair(spec, system.d, i);
        return confluence_margin(system, gamma_r, K, s.x, s.y);
    });
    return reduce(ConditionId::confluence, margins, spec, [&](std::size_t i) {
        auto s = sample_pair(spec, system.d, i);
        return WorstPoint{std::move(s.x), std::move(s.y), 0.0};
    });
}

ConditionReport check_k_ratio(const ControlFunction& gamma_r, double K, double c0, SamplingSpec spec)
{
    require(K > 0.5, "the K-ratio constraint needs K > 1/2, got " + std::to_string(K));
    require(c0 > 0.0 && c0 < 1.0, "c0 must lie in (0, 1)");
    require(spec.count >= 2, "k-ratio grid needs at least two points");
    const double lo = std::min(spec.min_separation, c0);
    spec.radius = c0;
    std::vector<Margin> margins(spec.count);
    std::vector<double> grid(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        const double w = static_cast<double>(i) / static_cast<double>(spec.count - 1);
        grid[i] = i + 1 == spec.count ? c0 : std::exp(std::log(lo) + w * (std::log(c0) - std::log(lo)));
        const double value = gamma_r(grid[i]);
        const double ratio = grid[i] * (gamma_r.derivative(grid[i]) + 1.0) / value;
        margins[i] = {std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio - K, K};
    }
    return reduce(ConditionId::k_ratio, margins, spec,
                  [&](std::size_t i) { return WorstPoint{Vector{grid[i]}, std::nullopt, 0.0}; });
}

double max_moment_ratio(const SdeSystem& system, SamplingSpec spec, const Execution& exec)
{
    validate_spec(spec);
    const auto ratios = map_indices<double>(spec.count, exec, [&](std::size_t i) {
        const auto s = sample_point(spec, system.d, i);
        return moment_ratio(system, s.x, s.t);
    });
    return *std::max_element(ratios.begin(), ratios.end());
}

}  // namespace sdelab
