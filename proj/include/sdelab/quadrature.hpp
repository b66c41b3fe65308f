#pragma once

#include <cstddef>
#include <functional>

namespace sdelab {

struct QuadratureOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-300;
    std::size_t max_subdivisions = 10000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t subdivisions = 0;
};

/// Adaptive Simpson on [a, b] by interval bisection, always splitting the
/// panel with the largest error estimate. Stops once the summed estimate is
/// at most max(rel_tol |I|, abs_tol) for the current integral I.
/// Throws QuadratureError on a non-finite integrand value or when
/// max_subdivisions is exceeded.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureOptions& options = {});

}  // namespace sdelab
