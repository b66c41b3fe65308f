#include "sdelab/control.hpp"

#include <cmath>
#include <numbers>

#include "sdelab/errors.hpp"

namespace sdelab {

const char* to_string(ControlKind kind) noexcept
{
    switch (kind) {
    case ControlKind::eta: return "eta";
    case ControlKind::gamma: return "gamma";
    case ControlKind::gamma_r: return "gamma_r";
    }
    return "unknown";
}

ControlFunction::ControlFunction(ControlKind kind, std::string name, Fn value, Fn derivative, double domain_max,
                                 ControlParams params)
    : kind_(kind), name_(std::move(name)), value_(std::move(value)), derivative_(std::move(derivative)),
      domain_max_(domain_max), params_(params)
{
    require(static_cast<bool>(value_), "control function needs a value map");
    require(params_.c0 > 0.0 && params_.c0 < 1.0, "c0 must lie in (0, 1)");
    require(params_.eps0 > 0.0 && params_.eps0 <= params_.c0, "eps0 must lie in (0, c0]");
    require(params_.R > 0.0, "R must be positive");
}

double ControlFunction::operator()(double x) const
{
    if (!(x >= 0.0 && x <= domain_max_))
        throw UsageError("control '" + name_ + "' evaluated at " + std::to_string(x) + " outside [0, " +
                         std::to_string(domain_max_) + "]");
    return value_(x);
}

double ControlFunction::derivative(double x) const
{
    if (!(x >= 0.0 && x <= domain_max_))
        throw UsageError("control '" + name_ + "' differentiated outside its domain");
    if (derivative_) return derivative_(x);
    const double step = 1e-6 * x;
    require(step > 0.0, "finite-difference derivative needs x > 0");
    return (value_(x + step) - value_(x - step)) / (2.0 * step);
}

ControlFunction make_xlog_control(ControlKind kind, ControlParams params)
{
    const double R = params.R;
    constexpr double knee = 1.0 / std::numbers::e;
    auto value = [R](double x) {
        if (x <= 0.0) return 0.0;
        if (x >= knee) return R * knee;
        return R * x * std::log(1.0 / x);
    };
    auto derivative = [R](double x) {
        if (x <= 0.0) return std::numeric_limits<double>::infinity();
        if (x >= knee) return 0.0;
        return R * (std::log(1.0 / x) - 1.0);
    };
    return ControlFunction(kind, "xlog", value, derivative, std::nextafter(1.0, 0.0), params);
}

ControlFunction make_linear_control(ControlKind kind, double coefficient, ControlParams params)
{
    require(coefficient >= 0.0 && std::isfinite(coefficient), "linear control needs a nonnegative coefficient");
    return ControlFunction(
        kind, "linear", [coefficient](double x) { return coefficient * x; },
        [coefficient](double) { return coefficient; }, kUnbounded, params);
}

ControlFunction make_zero_control(ControlKind kind, ControlParams params)
{
    return ControlFunction(
        kind, "zero", [](double) { return 0.0; }, [](double) { return 0.0; }, kUnbounded, params);
}

double control_eval(const ControlFunction& control, double x) { return control(x); }

}  // namespace sdelab
