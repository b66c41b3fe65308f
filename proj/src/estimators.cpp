#include "sdelab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdelab/errors.hpp"
#include "sdelab/quadrature.hpp"

namespace sdelab {

namespace {

constexpr double kZ95 = 1.959963984540054;

struct Summary {
    double mean = 0.0;
    double ci_halfwidth = 0.0;
};

// Mean and 95% half-width. Values are shifted by the first sample so a
// constant sample gives exactly that constant and exactly zero width.
Summary summarize(const std::vector<double>& values)
{
    Summary s;
    if (values.empty()) return s;
    const double shift = values.front();
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : values) {
        sum += v - shift;
        sum_sq += (v - shift) * (v - shift);
    }
    const auto n = static_cast<double>(values.size());
    s.mean = shift + sum / n;
    if (values.size() > 1) {
        const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
        s.ci_halfwidth = kZ95 * std::sqrt(var / n);
    }
    return s;
}

void validate_mc(const SdeSystem& system, const MonteCarloConfig& mc)
{
    require(mc.paths >= 1, "need at least one path");
    require(mc.x0.size() == system.d, "x0 has the wrong dimension for '" + system.label + "'");
    require(mc.horizon > 0.0 && std::isfinite(mc.horizon), "horizon must be positive and finite");
    require(mc.level >= 0, "level must be nonnegative");
}

EulerConfig euler_config(const MonteCarloConfig& mc, int level)
{
    EulerConfig cfg;
    cfg.level = level;
    cfg.horizon = mc.horizon;
    cfg.r_stop = mc.r_stop;
    cfg.x0 = mc.x0;
    return cfg;
}

BrownianTree path_tree(const SdeSystem& system, const MonteCarloConfig& mc, int level, std::size_t path)
{
    return sample_tree(system.m, mc.horizon, level, mc.seed, path);
}

int tree_level_or(const MonteCarloConfig& mc, int needed)
{
    if (mc.tree_level < 0) return needed;
    require(mc.tree_level >= needed, "tree level is coarser than the simulation level");
    return mc.tree_level;
}

double integrate(const ScalarFunction& f, double t, double power)
{
    if (t == 0.0) return 0.0;
    return adaptive_simpson(
               [&](double s) {
                   const double v = f(s);
                   if (v < 0.0) throw UsageError("f must be nonnegative, f(" + std::to_string(s) + ") < 0");
                   return std::pow(v, power);
               },
               0.0, t)
        .value;
}

}  // namespace

MomentConstants MomentConstants::defaults(double p)
{
    require(p > 2.0, "moment order must exceed 2");
    const double half = 0.5 * p;
    return {std::pow(3.0, half - 1.0), std::pow(2.0 * half, half), std::pow(2.0, half - 1.0)};
}

const char* to_string(BoundBranch branch) noexcept { return branch == BoundBranch::i ? "i" : "ii"; }

MomentBound moment_bound(const ScalarFunction& f, double p, double t, double x0_norm,
                         const MomentConstants& k, BoundBranch branch)
{
    require(p > 2.0, "moment order must exceed 2, got " + std::to_string(p));
    require(t >= 0.0 && std::isfinite(t), "horizon must be nonnegative");
    require(x0_norm >= 0.0, "|x0| must be nonnegative");
    require(k.c_p > 0.0 && k.c_p_prime > 0.0 && k.c_p_double_prime > 0.0, "moment constants must be positive");

    const double half = 0.5 * p;
    const double big_c = k.c_p * k.c_p * k.c_p_prime * k.c_p_prime * k.c_p_double_prime * k.c_p_double_prime;
    const double b = 2.0 * k.c_p * k.c_p_double_prime;
    const double a = 1.0 + 2.0 * k.c_p * std::pow(x0_norm, p) +
                     2.0 * k.c_p * k.c_p_double_prime * std::pow(integrate(f, t, 1.0), half) +
                     big_c * std::pow(integrate(f, t, 2.0), half);

    MomentBound out;
    out.branch = branch;
    out.A = a;
    out.B = b;
    if (branch == BoundBranch::i) {
        out.C = big_c;
        out.log_value = std::log(a) + b * integrate(f, t, half) + big_c * integrate(f, t, p);
    } else {
        const double q = (p - 2.0) / p;
        out.A1 = a;
        out.B1 = b * std::pow(integrate(f, t, p / (p - 2.0)), q) +
                 big_c * std::pow(integrate(f, t, 2.0 * p / (p - 2.0)), q);
        out.log_value = std::log(a) + out.B1 * t;
    }
    out.value = std::exp(out.log_value);
    return out;
}

MomentReport estimate_sup_moment(const SdeSystem& system, double p, const MonteCarloConfig& mc,
                                 const Execution& exec)
{
    require(p > 2.0, "moment order must exceed 2, got " + std::to_string(p));
    validate_mc(system, mc);
    const int tree_level = tree_level_or(mc, mc.level);
    const auto cfg = euler_config(mc, mc.level);

    struct PathMoment {
        double value = 0.0;
        bool exploded = false;
    };
    const auto per_path = map_indices<PathMoment>(mc.paths, exec, [&](std::size_t i) {
        const auto path = euler_path(system, cfg, path_tree(system, mc, tree_level, i));
        if (path.exploded()) return PathMoment{0.0, true};
        return PathMoment{std::pow(path.sup_norm_running().back(), p), false};
    });

    MomentReport report;
    report.p = p;
    report.t = mc.horizon;
    report.paths = mc.paths;
    report.level = mc.level;
    report.constants = MomentConstants::defaults(p);
    std::vector<double> kept;
    kept.reserve(per_path.size());
    for (const auto& r : per_path) {
        if (r.exploded)
            ++report.exploded;
        else
            kept.push_back(r.value);
    }
    if (kept.empty())
        throw EstimationError("every path exploded (explosion fraction 1); no moment estimate is possible");
    const auto s = summarize(kept);
    report.estimate = s.mean;
    report.ci_halfwidth = s.ci_halfwidth;
    return report;
}

void attach_bounds(MomentReport& report, const ScalarFunction& f, double x0_norm, const MomentConstants& constants,
                   bool branch_i, bool branch_ii)
{
    report.constants = constants;
    report.f_description = f.description();
    if (branch_i) report.bound_i = moment_bound(f, report.p, report.t, x0_norm, constants, BoundBranch::i);
    if (branch_ii) report.bound_ii = moment_bound(f, report.p, report.t, x0_norm, constants, BoundBranch::ii);
}

ExplosionStats explosion_stats(const SdeSystem& system, const MonteCarloConfig& mc, std::size_t bins,
                               const Execution& exec)
{
    validate_mc(system, mc);
    require(bins >= 1, "histogram needs at least one bin");
    const int tree_level = tree_level_or(mc, mc.level);
    const auto cfg = euler_config(mc, mc.level);

    struct Exit {
        bool exploded = false;
        StopReason reason = StopReason::radius;
        double time = 0.0;
    };
    const auto exits = map_indices<Exit>(mc.paths, exec, [&](std::size_t i) {
        const auto path = euler_path(system, cfg, path_tree(system, mc, tree_level, i));
        if (!path.exploded()) return Exit{};
        return Exit{true, path.stopped()->reason, path.times()[path.stopped()->index]};
    });

    ExplosionStats stats;
    stats.paths = mc.paths;
    stats.histogram.assign(bins, 0);
    for (const auto& e : exits) {
        if (!e.exploded) continue;
        ++stats.exploded;
        ++(e.reason == StopReason::radius ? stats.radius_exits : stats.nonfinite_exits);
        stats.exit_times.push_back(e.time);
        const auto bin = static_cast<std::size_t>(e.time / mc.horizon * static_cast<double>(bins));
        ++stats.histogram[std::min(bin, bins - 1)];
    }
    stats.frequency = static_cast<double>(stats.exploded) / static_cast<double>(stats.paths);
    return stats;
}

ConfluenceStats confluence_stats(const SdeSystem& system, const Vector& y0, const std::vector<double>& eps_list,
                                 const MonteCarloConfig& mc, const Execution& exec)
{
    validate_mc(system, mc);
    require(y0.size() == system.d, "y0 has the wrong dimension");
    require(!eps_list.empty(), "need at least one eps");
    for (double e : eps_list) require(e > 0.0, "eps must be positive");
    const int tree_level = tree_level_or(mc, mc.level);
    const auto cfg = euler_config(mc, mc.level);
    require(cfg.r_stop > norm(y0), "stopping radius must exceed |y0|");

    struct PathResult {
        double min_distance = 0.0;
        bool exploded = false;
        std::vector<char> hit;
    };
    const auto results = map_indices<PathResult>(mc.paths, exec, [&](std::size_t i) {
        const auto rec = coupled_starts(system, cfg, mc.x0, y0, path_tree(system, mc, tree_level, i));
        PathResult r;
        r.min_distance = rec.min_distance;
        r.exploded = rec.first.exploded() || rec.second.exploded();
        r.hit.reserve(eps_list.size());
        for (double e : eps_list) r.hit.push_back(first_passage_below(rec, e).has_value());
        return r;
    });

    ConfluenceStats stats;
    stats.eps = eps_list;
    stats.paths = mc.paths;
    stats.hits.assign(eps_list.size(), 0);
    for (const auto& r : results) {
        stats.min_distance.push_back(r.min_distance);
        if (r.exploded) ++stats.exploded;
        for (std::size_t j = 0; j < eps_list.size(); ++j) stats.hits[j] += r.hit[j] ? 1 : 0;
    }
    for (auto h : stats.hits) stats.frequency.push_back(static_cast<double>(h) / static_cast<double>(mc.paths));

    auto sorted = stats.min_distance;
    std::sort(sorted.begin(), sorted.end());
    stats.quantile_levels = {0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0};
    for (double q : stats.quantile_levels) {
        // Linear interpolation between order statistics.
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, sorted.size() - 1);
        stats.quantiles.push_back(sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]));
    }
    return stats;
}

MonotoneStats monotonicity_stats(const SdeSystem& system, double y0, const MonteCarloConfig& mc,
                                 const Execution& exec)
{
    require(system.d == 1 && system.m == 1, "stochastic monotonicity needs d = m = 1");
    validate_mc(system, mc);
    require(mc.x0[0] < y0, "monotonicity needs x0 < y0");
    const int tree_level = tree_level_or(mc, mc.level);
    const auto cfg = euler_config(mc, mc.level);
    const Vector y{y0};

    const auto violated = map_indices<char>(mc.paths, exec, [&](std::size_t i) -> char {
        const auto rec = coupled_starts(system, cfg, mc.x0, y, path_tree(system, mc, tree_level, i));
        for (std::size_t k = 0; k < rec.size(); ++k)
            if (rec.first.state(k)[0] > rec.second.state(k)[0]) return 1;
        return 0;
    });

    MonotoneStats stats;
    stats.paths = mc.paths;
    stats.violated = static_cast<std::size_t>(std::count(violated.begin(), violated.end(), 1));
    stats.fraction = static_cast<double>(stats.violated) / static_cast<double>(stats.paths);
    return stats;
}

std::vector<LevelValue> convergence_diagnostic(const SdeSystem& system, const std::vector<int>& levels,
                                               int ref_level, const MonteCarloConfig& mc, const Execution& exec)
{
    validate_mc(system, mc);
    require(!levels.empty(), "need at least one level");
    require(ref_level >= 0, "reference level must be nonnegative");
    for (int l : levels)
        require(l >= 0 && l <= ref_level, "level " + std::to_string(l) + " must lie in [0, reference level]");
    const int tree_level = tree_level_or(mc, ref_level);
    const auto ref_cfg = euler_config(mc, ref_level);

    // Per path: one entry per level, NaN when either path was stopped.
    const auto per_path = map_indices<std::vector<double>>(mc.paths, exec, [&](std::size_t i) {
        const auto tree = path_tree(system, mc, tree_level, i);
        const auto ref = euler_path(system, ref_cfg, tree);
        std::vector<double> out;
        out.reserve(levels.size());
        for (int l : levels) {
            if (ref.exploded()) {
                out.push_back(std::nan(""));
                continue;
            }
            if (l == ref_level) {
                out.push_back(0.0);
                continue;
            }
            const auto coarse = euler_path(system, euler_config(mc, l), tree);
            if (coarse.exploded()) {
                out.push_back(std::nan(""));
                continue;
            }
            const std::size_t ratio = std::size_t{1} << (ref_level - l);
            double worst = 0.0;
            for (std::size_t k = 0; k < coarse.size(); ++k) {
                const auto a = coarse.state(k);
                const auto b = ref.state(k * ratio);
                double sq = 0.0;
                for (std::size_t j = 0; j < a.size(); ++j) sq += (a[j] - b[j]) * (a[j] - b[j]);
                worst = std::max(worst, sq);
            }
            out.push_back(worst);
        }
        return out;
    });

    std::vector<LevelValue> result;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        std::vector<double> kept;
        for (const auto& row : per_path)
            if (!std::isnan(row[j])) kept.push_back(row[j]);
        if (kept.empty()) throw EstimationError("every path exploded at level " + std::to_string(levels[j]));
        const auto s = summarize(kept);
        result.push_back({levels[j], s.mean, s.ci_halfwidth, kept.size()});
    }
    return result;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size() && x.size() >= 2, "slope fit needs at least two points");
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    require(sxx > 0.0, "slope fit needs distinct abscissae");
    return sxy / sxx;
}

StrongErrorResult strong_error_vs_oracle(const SdeSystem& system, const std::vector<int>& levels,
                                         const MonteCarloConfig& mc, const Execution& exec)
{
    validate_mc(system, mc);
    require(system.has_exact_solution(), "system '" + system.label + "' has no exact solution");
    require(!levels.empty(), "need at least one level");
    const int finest = *std::max_element(levels.begin(), levels.end());
    for (int l : levels) require(l >= 0, "levels must be nonnegative");
    const int tree_level = mc.tree_level >= 0 ? tree_level_or(mc, finest) : std::min(finest + 4, kMaxTreeLevel);
    require(finest <= tree_level, "level exceeds the tree guard");

    // Per path: squared endpoint error per level, NaN for stopped paths.
    const auto per_path = map_indices<std::vector<double>>(mc.paths, exec, [&](std::size_t i) {
        const auto tree = path_tree(system, mc, tree_level, i);
        const auto exact = system.exact_solution(mc.horizon, mc.x0, tree);
        std::vector<double> out;
        out.reserve(levels.size());
        for (int l : levels) {
            const auto path = euler_path(system, euler_config(mc, l), tree);
            if (path.exploded()) {
                out.push_back(std::nan(""));
                continue;
            }
            const auto end = path.final_state();
            double sq = 0.0;
            for (std::size_t j = 0; j < end.size(); ++j) sq += (end[j] - exact[j]) * (end[j] - exact[j]);
            out.push_back(sq);
        }
        return out;
    });

    StrongErrorResult result;
    std::vector<double> log_h, log_err;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        std::vector<double> kept;
        for (const auto& row : per_path)
            if (!std::isnan(row[j])) kept.push_back(row[j]);
        if (kept.empty()) throw EstimationError("every path exploded at level " + std::to_string(levels[j]));
        const auto s = summarize(kept);
        const double rms = std::sqrt(s.mean);
        // Delta method: d sqrt(m) = dm / (2 sqrt(m)).
        const double ci = rms > 0.0 ? s.ci_halfwidth / (2.0 * rms) : 0.0;
        result.errors.push_back({levels[j], rms, ci, kept.size()});
        if (rms > 0.0) {
            log_h.push_back(std::log(mc.horizon) - levels[j] * std::log(2.0));
            log_err.push_back(std::log(rms));
        }
    }
    result.slope = log_h.size() >= 2 ? fit_slope(log_h, log_err) : std::nan("");
    return result;
}

const char* to_string(TestFunctionKind kind) noexcept
{
    switch (kind) {
    case TestFunctionKind::phi_delta: return "phi_delta";
    case TestFunctionKind::varphi: return "varphi";
    case TestFunctionKind::Phi_delta: return "Phi_delta";
    }
    return "unknown";
}

TestFunctionEval eval_test_function(TestFunctionKind kind, const ControlFunction& control, double delta, double x,
                                    double c0)
{
    require(std::isfinite(x) && x >= 0.0, "test functions need x >= 0");
    TestFunctionEval out;
    out.kind = kind;
    out.control = control.name();
    out.delta = delta;
    out.x = x;

    if (kind == TestFunctionKind::varphi) {
        require(x <= control.domain_max(), "x lies outside the control's domain");
        const auto r = adaptive_simpson([&](double s) { return 1.0 / (control(s) + 1.0); }, 0.0, x);
        out.value = r.value;
        out.error_estimate = r.error_estimate;
        return out;
    }

    require(delta >= 0.0 && std::isfinite(delta), "delta must be nonnegative");
    if (delta == 0.0 && control(0.0) == 0.0)
        throw UsageError(std::string(to_string(kind)) + " with delta = 0 diverges because the control vanishes at 0");

    if (kind == TestFunctionKind::phi_delta) {
        require(x <= control.domain_max(), "x lies outside the control's domain");
        const auto r = adaptive_simpson([&](double s) { return 1.0 / (control(s) + delta); }, 0.0, x);
        out.value = r.value;
        out.error_estimate = r.error_estimate;
        return out;
    }

    require(c0 > 0.0 && c0 < 1.0, "c0 must lie in (0, 1)");
    require(x <= c0, "Phi_delta needs 0 <= x <= c0");
    require(c0 <= control.domain_max(), "c0 lies outside the control's domain");
    const auto r = adaptive_simpson([&](double s) { return 1.0 / (control(s) + delta); }, x, c0);
    out.value = std::exp(r.value);
    out.error_estimate = out.value * r.error_estimate;
    return out;
}

}  // namespace sdelab
