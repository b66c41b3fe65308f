#include "sdelab/scalar_function.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sdelab/errors.hpp"

namespace sdelab {

namespace {

double parse_number(std::string_view text)
{
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
        throw UsageError("not a finite decimal number: '" + std::string(text) + "'");
    return value;
}

}  // namespace

std::vector<double> parse_number_list(std::string_view text)
{
    std::vector<double> values;
    if (text.empty()) throw UsageError("empty number list");
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        values.push_back(parse_number(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return values;
}

ScalarFunction ScalarFunction::constant(double value)
{
    std::ostringstream desc;
    desc.precision(17);
    desc << "const:" << value;
    return ScalarFunction(desc.str(), [value](double) { return value; });
}

ScalarFunction ScalarFunction::polynomial(std::vector<double> coefficients)
{
    require(!coefficients.empty(), "polynomial needs at least one coefficient");
    std::ostringstream desc;
    desc.precision(17);
    desc << "poly:";
    for (std::size_t i = 0; i < coefficients.size(); ++i) desc << (i ? "," : "") << coefficients[i];
    return ScalarFunction(desc.str(), [c = std::move(coefficients)](double t) {
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
        return acc;
    });
}

ScalarFunction ScalarFunction::table(std::vector<std::pair<double, double>> knots)
{
    require(!knots.empty(), "table needs at least one knot");
    std::sort(knots.begin(), knots.end());
    std::ostringstream desc;
    desc << "table:" << knots.size() << " knots";
    return ScalarFunction(desc.str(), [k = std::move(knots)](double t) {
        if (t <= k.front().first) return k.front().second;
        if (t >= k.back().first) return k.back().second;
        const auto hi = std::upper_bound(k.begin(), k.end(), t,
                                         [](double v, const auto& knot) { return v < knot.first; });
        const auto lo = hi - 1;
        const double w = (t - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
    });
}

ScalarFunction ScalarFunction::parse(std::string_view spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw UsageError("function spec must be const:, poly: or table:");
    const auto kind = spec.substr(0, colon);
    const auto body = spec.substr(colon + 1);
    if (kind == "const") return constant(parse_number(body));
    if (kind == "poly") return polynomial(parse_number_list(body));
    if (kind == "table") {
        std::ifstream in{std::string(body)};
        if (!in) throw UsageError("cannot open table '" + std::string(body) + "'");
        std::vector<std::pair<double, double>> knots;
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r") continue;
            try {
                const auto v = parse_number_list(line);
                if (v.size() != 2) throw UsageError("table rows need exactly two columns: '" + line + "'");
                knots.emplace_back(v[0], v[1]);
            } catch (const UsageError&) {
                if (!first) throw;
            }
            first = false;
        }
        auto fn = table(std::move(knots));
        return ScalarFunction("table:" + std::string(body), [fn](double t) { return fn(t); });
    }
    throw UsageError("unknown function kind '" + std::string(kind) + "'");
}

}  // namespace sdelab
