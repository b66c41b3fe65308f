#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "sdelab/control.hpp"
#include "sdelab/model.hpp"
#include "sdelab/parallel.hpp"
#include "sdelab/scalar_function.hpp"

namespace sdelab {

enum class ConditionId { monotonicity, coercivity, moment, confluence, k_ratio };
enum class Verdict { no_violation_found, violated };

const char* to_string(ConditionId id) noexcept;
const char* to_string(Verdict verdict) noexcept;

/// Sampling regions. Pair checks draw x, y with |x|, |y| <= radius and
/// min_separation <= |x - y| <= max_separation (log-spaced); point checks
/// draw min_radius <= |x| <= radius. Times are uniform on [0, t_max].
struct SamplingSpec {
    double radius = 10.0;
    double min_radius = 0.0;
    double max_separation = 0.5;
    double min_separation = 1e-8;
    std::size_t count = 100000;
    std::uint64_t seed = 1;
    double t_max = 0.0;
};

struct PairSample {
    Vector x;
    Vector y;
    double t = 0.0;
};

struct PointSample {
    Vector x;
    double t = 0.0;
};

/// Sample `index` of the stratified pair design. Strata cycle with the index:
/// uniform-in-ball pairs, axis-aligned pairs, near-origin pairs (half of them
/// paired with the origin itself) and pairs across all length scales.
PairSample sample_pair(const SamplingSpec& spec, std::size_t d, std::size_t index);

/// Sample `index` of the stratified point design (log-spaced radii, axis
/// points, volume-uniform points, boundary shells). Index 0 is the point
/// min_radius * e_1, i.e. the origin when min_radius is 0.
PointSample sample_point(const SamplingSpec& spec, std::size_t d, std::size_t index);

/// A margin (left side minus right side of a condition, positive means
/// violated) and the magnitude of the unreduced terms it was computed from.
struct Margin {
    double value = 0.0;
    double scale = 0.0;

    /// 1e-9 (1 + scale): separates violations from roundoff.
    double tolerance() const noexcept;
};

/// ||sigma(x) - sigma(y)||^2 + 2 <x - y, b(x) - b(y)> - g(t) eta(|x - y|^2).
Margin monotonicity_margin(const SdeSystem& system, const ControlFunction& eta, const ScalarFunction& g,
                           std::span<const double> x, std::span<const double> y, double t);
/// ||sigma(x)||^2 + 2 <x, b(x)> - f(t) (gamma(|x|^2) + 1).
Margin coercivity_margin(const SdeSystem& system, const ControlFunction& gamma, const ScalarFunction& f,
                         std::span<const double> x, double t);
/// max(||sigma||^2 + 2 <x, b>, |sigma^T x|^2) - f(t) (|x|^2 + 1).
Margin moment_margin(const SdeSystem& system, const ScalarFunction& f, std::span<const double> x, double t);
/// ||sigma(x) - sigma(y)||^2 - 2/(2K - 1) <x - y, b(x) - b(y)> - gamma_R(|x - y|^2).
Margin confluence_margin(const SdeSystem& system, const ControlFunction& gamma_r, double K,
                         std::span<const double> x, std::span<const double> y);

/// max(||sigma||^2 + 2 <x, b>, |sigma^T x|^2) / (|x|^2 + 1): the smallest
/// constant f for which the moment condition holds at x.
double moment_ratio(const SdeSystem& system, std::span<const double> x, double t);

struct WorstPoint {
    Vector x;
    std::optional<Vector> y;
    double t = 0.0;
};

/// Outcome of a sampled check. The verdict vocabulary cannot express a proof:
/// sampling can only find violations or fail to find them.
struct ConditionReport {
    ConditionId condition_id = ConditionId::monotonicity;
    std::size_t samples_evaluated = 0;
    double worst_margin = 0.0;
    WorstPoint worst_point;
    Verdict verdict = Verdict::no_violation_found;
    double tolerance = 0.0;
    SamplingSpec sampling_spec;
};

/// Sampled locally weak monotonicity over pairs with |x|, |y| <= R and
/// |x - y| <= c0. `spec.radius` and `spec.max_separation` are overridden by
/// R and c0.
ConditionReport check_monotonicity(const SdeSystem& system, const ControlFunction& eta, const ScalarFunction& g,
                                   double R, double c0, SamplingSpec spec, const Execution& exec = {});

/// Sampled coercivity over K_radius <= |x| <= spec.radius.
ConditionReport check_coercivity(const SdeSystem& system, const ControlFunction& gamma, const ScalarFunction& f,
                                 double k_radius, SamplingSpec spec, const Execution& exec = {});

/// Sampled moment condition over |x| <= spec.radius.
ConditionReport check_moment_condition(const SdeSystem& system, const ScalarFunction& f, SamplingSpec spec,
                                       const Execution& exec = {});

/// Sampled non-confluence condition. Throws UsageError unless K > 1/2.
ConditionReport check_confluence_condition(const SdeSystem& system, const ControlFunction& gamma_r, double K,
                                           double R, double c0, SamplingSpec spec, const Execution& exec = {});

/// Worst x (gamma_R'(x) + 1) / gamma_R(x) - K over spec.count log-spaced
/// points in [spec.min_separation, c0]. Throws UsageError unless K > 1/2.
ConditionReport check_k_ratio(const ControlFunction& gamma_r, double K, double c0, SamplingSpec spec);

/// Largest moment_ratio over the point design; a data-driven constant f.
double max_moment_ratio(const SdeSystem& system, SamplingSpec spec, const Execution& exec = {});

}  // namespace sdelab
