#include "sdelab/euler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdelab/errors.hpp"

namespace sdelab {

const char* to_string(StopReason reason) noexcept
{
    return reason == StopReason::radius ? "radius" : "nonfinite";
}

void PathRecord::reserve(std::size_t n)
{
    times_.reserve(n);
    states_.reserve(n * d_);
    sup_norm_.reserve(n);
}

void PathRecord::push(double t, std::span<const double> x)
{
    if (stopped_) throw InternalError("push onto a stopped path record");
    if (x.size() != d_) throw InternalError("state dimension mismatch in path record");
    times_.push_back(t);
    states_.insert(states_.end(), x.begin(), x.end());
    const double r = norm(x);
    const double prev = sup_norm_.empty() ? r : sup_norm_.back();
    // NaN states keep the previous running maximum so the series stays monotone.
    sup_norm_.push_back(std::isnan(r) ? prev : std::max(prev, r));
}

void PathRecord::stop(StopReason reason)
{
    if (times_.empty()) throw InternalError("stop on an empty path record");
    stopped_ = StopInfo{times_.size() - 1, reason};
}

namespace {

bool horizons_match(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a)); }

void validate(const SdeSystem& system, const EulerConfig& config, std::size_t noise_dim)
{
    require(config.level >= 0, "Euler level must be nonnegative");
    require(config.horizon > 0.0 && std::isfinite(config.horizon), "horizon must be positive and finite");
    require(config.x0.size() == system.d, "x0 has dimension " + std::to_string(config.x0.size()) +
                                              ", system '" + system.label + "' expects " +
                                              std::to_string(system.d));
    require(noise_dim == system.m, "Brownian path has dimension " + std::to_string(noise_dim) + ", system '" +
                                       system.label + "' expects " + std::to_string(system.m));
    for (double v : config.x0) require(std::isfinite(v), "x0 must be finite");
    require(config.r_stop > norm(config.x0), "stopping radius must exceed |x0|");
}

void check_finite(std::span<const double> values, const char* what, const SdeSystem& system, double t)
{
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw ModelDomainError(std::string(what) + " of '" + system.label + "' is not finite at t=" +
                                   std::to_string(t) + " (component " + std::to_string(i + 1) + ")");
}

// Largest |p(s)| over the finest sub-grid of each coarse cell, where
// p(s) = X(kappa(s)) - X(s) for the continuous Euler interpolant.
void fill_defect(const SdeSystem& system, const PathRecord& path, int level, const BrownianTree& tree,
                 std::vector<double>& defect, std::vector<double>& defect_norm, std::size_t length)
{
    const std::size_t d = system.d;
    const std::size_t m = system.m;
    defect.assign(length * d, 0.0);
    defect_norm.assign(length, 0.0);
    const std::size_t ratio = std::size_t{1} << (tree.finest_level() - level);
    if (ratio == 1) return;
    const double hf = tree.finest_step();
    const auto& finest = tree.finest();
    std::vector<double> b(d), sigma(d * m), partial(m), p(d);
    const std::size_t cells = std::min(length, path.size() - 1);
    for (std::size_t k = 0; k < cells; ++k) {
        const double t = path.times()[k];
        const auto x = path.state(k);
        system.drift(t, x, b);
        system.diffusion(t, x, sigma);
        std::fill(partial.begin(), partial.end(), 0.0);
        double best = 0.0;
        for (std::size_t i = 1; i < ratio; ++i) {
            const auto dB = finest.at(k * ratio + i - 1);
            for (std::size_t j = 0; j < m; ++j) partial[j] += dB[j];
            double sq = 0.0;
            for (std::size_t r = 0; r < d; ++r) {
                double acc = 0.0;
                for (std::size_t j = 0; j < m; ++j) acc += sigma[r * m + j] * partial[j];
                p[r] = -(b[r] * (static_cast<double>(i) * hf) + acc);
                sq += p[r] * p[r];
            }
            if (sq > best * best) {
                best = std::sqrt(sq);
                std::copy(p.begin(), p.end(), defect.begin() + static_cast<std::ptrdiff_t>(k * d));
            }
        }
        defect_norm[k] = best;
    }
}

void fill_xi(CoupledRecord& rec, double eps0, std::size_t length)
{
    rec.xi.resize(length);
    double min_sq = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < length; ++k) {
        const auto a = rec.first.state(k);
        const auto b = rec.second.state(k);
        double sq = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
        rec.xi[k] = sq;
        min_sq = std::min(min_sq, sq);
        if (!rec.tau && sq >= eps0) rec.tau = rec.first.times()[k];
    }
    rec.min_distance = std::sqrt(min_sq);
}

// Number of leading entries of `path` that sit on its regular grid.
std::size_t grid_prefix(const PathRecord& path, std::size_t expected_cells)
{
    return std::min(path.size(), expected_cells + 1);
}

}  // namespace

PathRecord euler_path(const SdeSystem& system, const EulerConfig& config, const IncrementGrid& increments)
{
    validate(system, config, increments.noise_dim());
    require(increments.level() == config.level, "increment grid level differs from the Euler level");
    require(horizons_match(increments.horizon(), config.horizon), "increment grid horizon differs from config");

    const std::size_t d = system.d;
    const std::size_t m = system.m;
    const std::size_t n = config.steps();
    const double h = config.step();

    PathRecord record(d);
    record.reserve(n + 1);
    std::vector<double> x(config.x0), next(d), b(d), sigma(d * m);
    record.push(0.0, x);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * h;
        system.drift(t, x, b);
        check_finite(b, "drift", system, t);
        system.diffusion(t, x, sigma);
        check_finite(sigma, "diffusion", system, t);
        const auto dB = increments.at(k);
        for (std::size_t i = 0; i < d; ++i) {
            double noise = 0.0;
            for (std::size_t j = 0; j < m; ++j) noise += sigma[i * m + j] * dB[j];
            next[i] = x[i] + b[i] * h + noise;
        }
        record.push(static_cast<double>(k + 1) * h, next);
        if (!std::all_of(next.begin(), next.end(), [](double v) { return std::isfinite(v); })) {
            record.stop(StopReason::nonfinite);
            break;
        }
        if (norm(next) >= config.r_stop) {
            record.stop(StopReason::radius);
            break;
        }
        x.swap(next);
    }
    return record;
}

PathRecord euler_path(const SdeSystem& system, const EulerConfig& config, const BrownianTree& tree)
{
    require(horizons_match(tree.horizon(), config.horizon), "tree horizon differs from config horizon");
    require(config.level >= 0 && config.level <= tree.finest_level(),
            "Euler level " + std::to_string(config.level) + " is finer than the tree (" +
                std::to_string(tree.finest_level()) + ")");
    return euler_path(system, config, increments_at_level(tree, config.level));
}

PathRecord restrict_to_coarse(const PathRecord& fine, std::size_t ratio)
{
    require(ratio >= 1 && (ratio & (ratio - 1)) == 0, "restriction ratio must be a power of two");
    PathRecord coarse(fine.dim());
    const auto& stop = fine.stopped();
    for (std::size_t k = 0; k * ratio < fine.size(); ++k) coarse.push(fine.times()[k * ratio], fine.state(k * ratio));
    if (stop) {
        if (stop->index % ratio != 0) coarse.push(fine.times()[stop->index], fine.state(stop->index));
        coarse.stop(stop->reason);
    }
    // Rebuild the running maximum from the fine path so it still tracks the
    // fine path's own supremum.
    for (std::size_t k = 0; k < coarse.size(); ++k)
        coarse.sup_norm_[k] = fine.sup_norm_[std::min(k * ratio, fine.size() - 1)];
    if (stop && stop->index % ratio != 0) coarse.sup_norm_.back() = fine.sup_norm_[stop->index];
    return coarse;
}

CoupledRecord coupled_resolutions(const SdeSystem& system, int level_coarse, int level_fine,
                                  const EulerConfig& config, const BrownianTree& tree)
{
    require(level_coarse < level_fine, "coupled resolutions need level_coarse < level_fine");
    require(level_coarse >= 0, "levels must be nonnegative");
    require(level_fine <= tree.finest_level(), "fine level exceeds the tree's finest level");

    EulerConfig coarse_cfg = config;
    coarse_cfg.level = level_coarse;
    EulerConfig fine_cfg = config;
    fine_cfg.level = level_fine;

    CoupledRecord rec;
    rec.level = level_coarse;
    rec.first = euler_path(system, coarse_cfg, tree);
    const auto fine = euler_path(system, fine_cfg, tree);
    const std::size_t ratio = std::size_t{1} << (level_fine - level_coarse);
    rec.second = restrict_to_coarse(fine, ratio);

    // Only fine states sitting on coarse nodes enter xi.
    const std::size_t aligned = (fine.size() - 1) / ratio + 1;
    const std::size_t length = std::min(grid_prefix(rec.first, coarse_cfg.steps()), aligned);
    fill_xi(rec, config.eps0, length);
    fill_defect(system, rec.first, level_coarse, tree, rec.defect, rec.defect_norm, length);
    return rec;
}

CoupledRecord coupled_starts(const SdeSystem& system, const EulerConfig& config, std::span<const double> x0,
                             std::span<const double> y0, const BrownianTree& tree)
{
    require(x0.size() == system.d && y0.size() == system.d, "start points must match the system dimension");
    require(!std::equal(x0.begin(), x0.end(), y0.begin()), "coupled starts need x0 != y0");

    EulerConfig cfg_x = config;
    cfg_x.x0.assign(x0.begin(), x0.end());
    EulerConfig cfg_y = config;
    cfg_y.x0.assign(y0.begin(), y0.end());

    CoupledRecord rec;
    rec.level = config.level;
    const auto increments = increments_at_level(tree, config.level);
    require(horizons_match(tree.horizon(), config.horizon), "tree horizon differs from config horizon");
    rec.first = euler_path(system, cfg_x, increments);
    rec.second = euler_path(system, cfg_y, increments);
    const std::size_t length = std::min(rec.first.size(), rec.second.size());
    fill_xi(rec, config.eps0, length);
    fill_defect(system, rec.first, config.level, tree, rec.defect, rec.defect_norm, length);
    return rec;
}

std::optional<double> first_passage_below(const CoupledRecord& record, double eps)
{
    const double eps_sq = eps * eps;
    for (std::size_t k = 0; k < record.xi.size(); ++k)
        if (record.xi[k] <= eps_sq) return record.first.times()[k];
    return std::nullopt;
}

}  // namespace sdelab
