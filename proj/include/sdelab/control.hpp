#pragma once

#include <functional>
#include <limits>
#include <string>

namespace sdelab {

/// Which role a control function plays: eta_R bounds the monotonicity
/// margin, gamma the coercivity margin, gamma_R the non-confluence margin.
enum class ControlKind { eta, gamma, gamma_r };

const char* to_string(ControlKind kind) noexcept;

/// Locality constants shared by the conditions. Defaults: c0 = 1/2,
/// eps0 = c0, R = 10, K = 1.
struct ControlParams {
    double R = 10.0;
    double c0 = 0.5;
    double eps0 = 0.5;
    double K = 1.0;
};

/// A nonnegative, nondecreasing function on [0, domain_max] with an optional
/// analytic derivative. Without one, derivative() uses a central difference
/// with step 1e-6 x.
class ControlFunction {
public:
    using Fn = std::function<double(double)>;

    ControlFunction(ControlKind kind, std::string name, Fn value, Fn derivative, double domain_max,
                    ControlParams params);

    ControlKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    const ControlParams& params() const noexcept { return params_; }
    double domain_max() const noexcept { return domain_max_; }
    bool has_analytic_derivative() const noexcept { return static_cast<bool>(derivative_); }

    /// Throws UsageError for x outside [0, domain_max].
    double operator()(double x) const;
    double derivative(double x) const;

    /// Unchecked evaluation for hot loops whose arguments are already in range.
    double eval_unchecked(double x) const { return value_(x); }

private:
    ControlKind kind_;
    std::string name_;
    Fn value_;
    Fn derivative_;
    double domain_max_;
    ControlParams params_;
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// R x log(1/x) for x <= 1/e, held at its maximum R/e on (1/e, 1).
ControlFunction make_xlog_control(ControlKind kind, ControlParams params = {});
/// coefficient * x on [0, inf).
ControlFunction make_linear_control(ControlKind kind, double coefficient, ControlParams params = {});
/// Identically zero on [0, inf).
ControlFunction make_zero_control(ControlKind kind, ControlParams params = {});

double control_eval(const ControlFunction& control, double x);

}  // namespace sdelab
