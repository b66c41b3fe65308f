#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sdelab/control.hpp"
#include "sdelab/euler.hpp"
#include "sdelab/model.hpp"
#include "sdelab/parallel.hpp"
#include "sdelab/scalar_function.hpp"

namespace sdelab {

/// Shared Monte Carlo setup. Path i is driven by the tree
/// sample_tree(m, horizon, tree_level, seed, i); tree_level < 0 means "the
/// finest level the estimator needs".
struct MonteCarloConfig {
    Vector x0;
    double horizon = 1.0;
    int level = 10;
    std::size_t paths = 1000;
    std::uint64_t seed = 1;
    double r_stop = std::numeric_limits<double>::infinity();
    int tree_level = -1;
};

// ---------------------------------------------------------------------------
// Moments of the maximum process
// ---------------------------------------------------------------------------

/// Constants of the moment bound. Defaults for order p:
///   C_p   = 3^{p/2 - 1}      (three-term power mean)
///   C'_p  = (2 (p/2))^{p/2}  (conservative Burkholder-Davis-Gundy constant)
///   C''_p = 2^{p/2 - 1}      (two-term power mean)
struct MomentConstants {
    double c_p = 0.0;
    double c_p_prime = 0.0;
    double c_p_double_prime = 0.0;

    static MomentConstants defaults(double p);
};

enum class BoundBranch { i, ii };

const char* to_string(BoundBranch branch) noexcept;

/// Branch i:  A exp(B int f^{p/2} + C int f^p)
///   A = 1 + 2 C_p |x0|^p + 2 C_p C''_p (int f)^{p/2} + C_p^2 C'_p^2 C''_p^2 (int f^2)^{p/2}
///   B = 2 C_p C''_p,  C = C_p^2 C'_p^2 C''_p^2
/// Branch ii: A1 exp(B1 t), A1 = A,
///   B1 = 2 C_p C''_p (int f^{p/(p-2)})^{(p-2)/p} + C (int f^{2p/(p-2)})^{(p-2)/p}
/// Integrals run over [0, t]. The bound can exceed the double range long
/// before it is infinite, so it is carried as log_value; value is +inf when
/// exp(log_value) overflows.
/// A depends on |x0| as well as on p, t and f.
struct MomentBound {
    BoundBranch branch = BoundBranch::i;
    double log_value = 0.0;
    double value = 0.0;
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;   // branch i only
    double A1 = 0.0;  // branch ii only
    double B1 = 0.0;  // branch ii only
};

/// Throws UsageError for p <= 2 or negative f, QuadratureError when an
/// integral of f does not converge.
MomentBound moment_bound(const ScalarFunction& f, double p, double t, double x0_norm,
                         const MomentConstants& constants, BoundBranch branch);

/// Monte Carlo estimate of E (max_k |X_k|)^p over the Euler grid.
struct MomentReport {
    double p = 0.0;
    double t = 0.0;
    double estimate = 0.0;
    double ci_halfwidth = 0.0;  // 95% normal interval
    std::size_t paths = 0;
    std::size_t exploded = 0;   // excluded from the estimate
    int level = 0;
    std::optional<MomentBound> bound_i;
    std::optional<MomentBound> bound_ii;
    MomentConstants constants;
    std::string f_description;

    bool explosion_flag() const noexcept { return exploded > 0; }
};

/// Throws UsageError for p <= 2 and EstimationError when every path exploded.
MomentReport estimate_sup_moment(const SdeSystem& system, double p, const MonteCarloConfig& mc,
                                 const Execution& exec = {});

/// Fills the requested bounds (and f_description, constants) of a report.
void attach_bounds(MomentReport& report, const ScalarFunction& f, double x0_norm, const MomentConstants& constants,
                   bool branch_i, bool branch_ii);

// ---------------------------------------------------------------------------
// Path statistics
// ---------------------------------------------------------------------------

struct ExplosionStats {
    std::size_t paths = 0;
    std::size_t exploded = 0;
    std::size_t radius_exits = 0;
    std::size_t nonfinite_exits = 0;
    double frequency = 0.0;
    std::vector<double> exit_times;     // exploded paths, in path order
    std::vector<std::size_t> histogram; // exit times binned over [0, T]
};

ExplosionStats explosion_stats(const SdeSystem& system, const MonteCarloConfig& mc, std::size_t bins = 20,
                               const Execution& exec = {});

struct ConfluenceStats {
    std::vector<double> eps;
    std::vector<double> frequency;        // P(first passage below eps <= T)
    std::vector<std::size_t> hits;
    std::vector<double> min_distance;     // per path
    std::vector<double> quantile_levels;  // 0, .05, .25, .5, .75, .95, 1
    std::vector<double> quantiles;
    std::size_t paths = 0;
    std::size_t exploded = 0;
};

/// Two-start coupling from mc.x0 and y0 on the same Brownian path.
ConfluenceStats confluence_stats(const SdeSystem& system, const Vector& y0, const std::vector<double>& eps_list,
                                 const MonteCarloConfig& mc, const Execution& exec = {});

struct MonotoneStats {
    std::size_t paths = 0;
    std::size_t violated = 0;
    double fraction = 0.0;
};

/// Fraction of paths with X_k(x0) > X_k(y0) at some grid point, x0 < y0.
/// Throws UsageError unless d = m = 1 and x0 < y0.
MonotoneStats monotonicity_stats(const SdeSystem& system, double y0, const MonteCarloConfig& mc,
                                 const Execution& exec = {});

// ---------------------------------------------------------------------------
// Convergence
// ---------------------------------------------------------------------------

struct LevelValue {
    int level = 0;
    double value = 0.0;
    double ci_halfwidth = 0.0;
    std::size_t paths_used = 0;
};

/// E max_k |X^{(level)}(t_k) - X^{(ref)}(t_k)|^2 on the level grid, per level.
/// mc.level is ignored; the trees are drawn at ref_level.
std::vector<LevelValue> convergence_diagnostic(const SdeSystem& system, const std::vector<int>& levels,
                                               int ref_level, const MonteCarloConfig& mc,
                                               const Execution& exec = {});

struct StrongErrorResult {
    std::vector<LevelValue> errors;  // RMS endpoint error per level
    double slope = 0.0;              // least-squares slope of log(error) against log(h)
};

/// Needs system.exact_solution. Trees default to max(levels) + 4 (capped at
/// the tree guard) so the reference solution is resolved below the errors.
StrongErrorResult strong_error_vs_oracle(const SdeSystem& system, const std::vector<int>& levels,
                                         const MonteCarloConfig& mc, const Execution& exec = {});

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Test functions
// ---------------------------------------------------------------------------

enum class TestFunctionKind { phi_delta, varphi, Phi_delta };

const char* to_string(TestFunctionKind kind) noexcept;

struct TestFunctionEval {
    TestFunctionKind kind = TestFunctionKind::phi_delta;
    std::string control;
    double delta = 0.0;
    double x = 0.0;
    double value = 0.0;
    double error_estimate = 0.0;
};

/// phi_delta(x) = int_0^x ds / (eta(s) + delta)
/// varphi(x)    = int_0^x ds / (gamma(s) + 1)
/// Phi_delta(x) = exp(int_x^{c0} ds / (gamma_R(s) + delta)), 0 <= x <= c0
/// Throws UsageError when delta = 0 meets control(0) = 0 (divergent integral).
TestFunctionEval eval_test_function(TestFunctionKind kind, const ControlFunction& control, double delta, double x,
                                    double c0);

}  // namespace sdelab
