#include "sdelab/quadrature.hpp"

#include <cmath>
#include <queue>
#include <tuple>
#include <utility>
#include <string>
#include <vector>

#include "sdelab/errors.hpp"

namespace sdelab {

namespace {

struct Panel {
    double a, b;
    double fa, fm, fb;
    double flm, frm;
    double value;  // Richardson-corrected composite Simpson
    double error;  // |S2 - S1| / 15
    bool splittable;
};

struct ByError {
    bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

class Integrator {
public:
    explicit Integrator(const std::function<double(double)>& f) : f_(f) {}

    double eval(double x)
    {
        const double v = f_(x);
        if (!std::isfinite(v))
            throw QuadratureError("integrand is not finite at x=" + std::to_string(x) + " (non-integrable?)");
        return v;
    }

    Panel make(double a, double b, double fa, double fm, double fb)
    {
        const double m = 0.5 * (a + b);
        const double flm = eval(0.5 * (a + m));
        const double frm = eval(0.5 * (m + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        const double halves = (m - a) / 6.0 * (fa + 4.0 * flm + fm) + (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = halves - whole;
        const double lm = 0.5 * (a + m);
        return {a, b, fa, fm, fb, flm, frm, halves + delta / 15.0, std::fabs(delta) / 15.0, lm > a && m < b};
    }

private:
    const std::function<double(double)>& f_;
};

}  // namespace

// Globally adaptive: the panel with the largest error estimate is bisected
// until the summed estimate meets the tolerance relative to the current
// integral, so a poor first guess cannot fix a loose absolute target.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureOptions& options)
{
    require(std::isfinite(a) && std::isfinite(b), "integration limits must be finite");
    if (a == b) return {};
    if (a > b) {
        auto r = adaptive_simpson(f, b, a, options);
        r.value = -r.value;
        return r;
    }
    Integrator in(f);
    std::priority_queue<Panel, std::vector<Panel>, ByError> open;
    std::vector<Panel> done;
    open.push(in.make(a, b, in.eval(a), in.eval(0.5 * (a + b)), in.eval(b)));

    QuadratureResult result;
    const auto totals = [&] {
        double value = 0.0, error = 0.0;
        auto copy = open;
        while (!copy.empty()) {
            value += copy.top().value;
            error += copy.top().error;
            copy.pop();
        }
        for (const auto& p : done) {
            value += p.value;
            error += p.error;
        }
        return std::pair{value, error};
    };

    double value = open.top().value;
    double error = open.top().error;
    while (true) {
        if (error <= std::max(options.rel_tol * std::fabs(value), options.abs_tol)) {
            // re-sum from scratch so running-sum drift cannot end the loop early
            std::tie(value, error) = totals();
            if (error <= std::max(options.rel_tol * std::fabs(value), options.abs_tol)) break;
        }
        if (open.empty())
            throw QuadratureError("adaptive Simpson cannot resolve the integrand at floating-point resolution");
        const Panel p = open.top();
        open.pop();
        if (!p.splittable) {
            done.push_back(p);
            continue;
        }
        if (++result.subdivisions > options.max_subdivisions)
            throw QuadratureError("adaptive Simpson exceeded " + std::to_string(options.max_subdivisions) +
                                  " subdivisions");
        const double m = 0.5 * (p.a + p.b);
        const Panel left = in.make(p.a, m, p.fa, p.flm, p.fm);
        const Panel right = in.make(m, p.b, p.fm, p.frm, p.fb);
        value += left.value + right.value - p.value;
        error += left.error + right.error - p.error;
        open.push(left);
        open.push(right);
    }
    result.value = value;
    result.error_estimate = error;
    return result;
}

}  // namespace sdelab
