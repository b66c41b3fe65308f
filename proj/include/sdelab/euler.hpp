#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sdelab/model.hpp"
#include "sdelab/noise.hpp"

namespace sdelab {

/// One Euler run: 2^level steps of size h = T 2^-level from x0, halted when
/// |X| reaches r_stop. eps0 is the xi threshold for the coupled stopping time.
struct EulerConfig {
    int level = 10;
    double horizon = 1.0;
    double r_stop = std::numeric_limits<double>::infinity();
    Vector x0;
    double eps0 = 0.5;

    std::size_t steps() const noexcept { return std::size_t{1} << level; }
    double step() const noexcept { return horizon / static_cast<double>(steps()); }
};

enum class StopReason { radius, nonfinite };

const char* to_string(StopReason reason) noexcept;

struct StopInfo {
    std::size_t index;
    StopReason reason;
};

/// Euler states on the grid t_k. Once stopped the record is frozen: the state
/// at `stopped->index` is the last one.
class PathRecord;
PathRecord restrict_to_coarse(const PathRecord& fine, std::size_t ratio);

class PathRecord {
public:
    explicit PathRecord(std::size_t d = 1) : d_(d) {}

    std::size_t dim() const noexcept { return d_; }
    std::size_t size() const noexcept { return times_.size(); }
    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> state(std::size_t k) const noexcept { return {states_.data() + k * d_, d_}; }
    std::span<const double> final_state() const noexcept { return state(size() - 1); }
    /// Running maximum of |X_k|, the grid proxy of sup_{s<=t}|X_s|.
    std::span<const double> sup_norm_running() const noexcept { return sup_norm_; }
    const std::optional<StopInfo>& stopped() const noexcept { return stopped_; }
    bool exploded() const noexcept { return stopped_.has_value(); }

    void reserve(std::size_t n);
    void push(double t, std::span<const double> x);
    void stop(StopReason reason);

    friend PathRecord restrict_to_coarse(const PathRecord& fine, std::size_t ratio);

private:
    std::size_t d_;
    std::vector<double> times_;
    std::vector<double> states_;
    std::vector<double> sup_norm_;
    std::optional<StopInfo> stopped_;
};

/// Two paths on a common grid and the squared-distance diagnostics between them.
struct CoupledRecord {
    PathRecord first;   // coarse path, or the path from x0
    PathRecord second;  // fine path restricted to the coarse grid, or the path from y0
    int level = 0;      // grid level of xi
    std::vector<double> xi;                   // |first - second|^2 on the common grid
    std::optional<double> tau;                // first grid time with xi >= eps0
    double min_distance = 0.0;                // min over the grid of sqrt(xi)
    std::vector<double> defect;               // p(t) of `first`, row-major size() x d
    std::vector<double> defect_norm;          // |p| per grid cell (max over the finest sub-grid)

    std::size_t size() const noexcept { return xi.size(); }
};

/// X_{k+1} = X_k + b(t_k, X_k) h + sigma(t_k, X_k) dB_k with the increments
/// read at config.level from the tree.
/// Throws UsageError on mismatched dimensions/horizon/levels and
/// ModelDomainError when a coefficient is non-finite at a finite state.
PathRecord euler_path(const SdeSystem& system, const EulerConfig& config, const BrownianTree& tree);

/// Same scheme driven by an explicit increment sequence (grid level and
/// horizon taken from `increments`).
PathRecord euler_path(const SdeSystem& system, const EulerConfig& config, const IncrementGrid& increments);

/// Coarse path at level_coarse and fine path at level_fine driven by the same
/// tree; xi is sampled on the coarse grid.
CoupledRecord coupled_resolutions(const SdeSystem& system, int level_coarse, int level_fine,
                                  const EulerConfig& config, const BrownianTree& tree);

/// Paths from x0 and y0 at config.level on the same tree.
CoupledRecord coupled_starts(const SdeSystem& system, const EulerConfig& config, std::span<const double> x0,
                             std::span<const double> y0, const BrownianTree& tree);

/// Restricts a fine record onto the grid coarser by `ratio` (a power of two).
/// A fine stop strictly inside a coarse cell is kept as a final entry at its
/// own time.
PathRecord restrict_to_coarse(const PathRecord& fine, std::size_t ratio);

/// First grid time with sqrt(xi) <= eps, if any.
std::optional<double> first_passage_below(const CoupledRecord& record, double eps);

}  // namespace sdelab
