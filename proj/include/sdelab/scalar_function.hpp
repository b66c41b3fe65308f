#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sdelab {

/// A deterministic scalar function of time, used for the g and f weights of
/// the conditions and the moment bound.
class ScalarFunction {
public:
    ScalarFunction(std::string description, std::function<double(double)> fn)
        : description_(std::move(description)), fn_(std::move(fn))
    {
    }

    double operator()(double t) const { return fn_(t); }
    const std::string& description() const noexcept { return description_; }

    static ScalarFunction constant(double value);
    /// c0 + c1 t + c2 t^2 + ...
    static ScalarFunction polynomial(std::vector<double> coefficients);
    /// Piecewise-linear through (t_i, v_i), held constant outside the knots.
    static ScalarFunction table(std::vector<std::pair<double, double>> knots);

    /// Parses `const:<v>`, `poly:<c0,c1,...>` or `table:<csv-path>` (two
    /// columns t,value; a non-numeric first line is treated as a header).
    static ScalarFunction parse(std::string_view spec);

private:
    std::string description_;
    std::function<double(double)> fn_;
};

/// Parses a comma-separated list of decimal literals.
std::vector<double> parse_number_list(std::string_view text);

}  // namespace sdelab
