#include "sdelab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sdelab {

using nlohmann::json;

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int stop_code(const PathRecord& path, std::size_t row)
{
    const auto& stop = path.stopped();
    if (!stop || stop->index != row) return 0;
    return stop->reason == StopReason::radius ? 1 : 2;
}

namespace {

void write_header(std::ostream& out, std::size_t d)
{
    out << "t";
    for (std::size_t i = 1; i <= d; ++i) out << ",x" << i;
    out << ",stopped";
}

void write_row(std::ostream& out, const PathRecord& path, std::size_t k)
{
    out << format_double(path.times()[k]);
    for (double v : path.state(k)) out << ',' << format_double(v);
    out << ',' << stop_code(path, k);
}

// Non-finite doubles have no JSON literal; they are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_path_csv(const PathRecord& path, std::ostream& out)
{
    write_header(out, path.dim());
    out << '\n';
    for (std::size_t k = 0; k < path.size(); ++k) {
        write_row(out, path, k);
        out << '\n';
    }
}

void write_coupled_csv(const CoupledRecord& record, std::ostream& out)
{
    write_header(out, record.first.dim());
    out << ",xi,defect_norm\n";
    for (std::size_t k = 0; k < record.size(); ++k) {
        write_row(out, record.first, k);
        out << ',' << format_double(record.xi[k]) << ',' << format_double(record.defect_norm[k]) << '\n';
    }
}

void write_level_csv(const std::vector<LevelValue>& values, std::ostream& out)
{
    out << "level,value,ci_halfwidth\n";
    for (const auto& v : values)
        out << v.level << ',' << format_double(v.value) << ',' << format_double(v.ci_halfwidth) << '\n';
}

json to_json(const SamplingSpec& spec)
{
    return {{"radius", spec.radius},
            {"min_radius", spec.min_radius},
            {"max_separation", spec.max_separation},
            {"min_separation", spec.min_separation},
            {"count", spec.count},
            {"seed", spec.seed},
            {"t_max", spec.t_max}};
}

json to_json(const ConditionReport& report)
{
    json point{{"x", report.worst_point.x}, {"t", report.worst_point.t}};
    if (report.worst_point.y) point["y"] = *report.worst_point.y;
    return {{"condition_id", to_string(report.condition_id)},
            {"samples_evaluated", report.samples_evaluated},
            {"worst_margin", number(report.worst_margin)},
            {"worst_point", point},
            {"verdict", to_string(report.verdict)},
            {"tolerance", report.tolerance},
            {"sampling_spec", to_json(report.sampling_spec)}};
}

json to_json(const MomentConstants& c)
{
    return {{"C_p", c.c_p}, {"C_p_prime", c.c_p_prime}, {"C_p_double_prime", c.c_p_double_prime}};
}

json to_json(const MomentBound& b)
{
    json out{{"branch", to_string(b.branch)}, {"value", number(b.value)}, {"log_value", number(b.log_value)}};
    if (b.branch == BoundBranch::i) {
        out["A"] = number(b.A);
        out["B"] = number(b.B);
        out["C"] = number(b.C);
    } else {
        out["A1"] = number(b.A1);
        out["B1"] = number(b.B1);
    }
    return out;
}

json to_json(const MomentReport& r)
{
    json constants = to_json(r.constants);
    if (r.bound_i) {
        constants["A"] = number(r.bound_i->A);
        constants["B"] = number(r.bound_i->B);
        constants["C"] = number(r.bound_i->C);
    }
    if (r.bound_ii) {
        constants["A1"] = number(r.bound_ii->A1);
        constants["B1"] = number(r.bound_ii->B1);
    }
    return {{"p", r.p},
            {"t", r.t},
            {"estimate", number(r.estimate)},
            {"ci_halfwidth", number(r.ci_halfwidth)},
            {"paths", r.paths},
            {"exploded", r.exploded},
            {"explosion_flag", r.explosion_flag()},
            {"level", r.level},
            {"f", r.f_description},
            {"bound_i", r.bound_i ? to_json(*r.bound_i) : json(nullptr)},
            {"bound_ii", r.bound_ii ? to_json(*r.bound_ii) : json(nullptr)},
            {"constants", constants}};
}

json to_json(const ExplosionStats& s)
{
    return {{"paths", s.paths},
            {"exploded", s.exploded},
            {"radius_exits", s.radius_exits},
            {"nonfinite_exits", s.nonfinite_exits},
            {"frequency", s.frequency},
            {"exit_times", s.exit_times},
            {"histogram", s.histogram}};
}

json to_json(const ConfluenceStats& s)
{
    json per_eps = json::array();
    for (std::size_t j = 0; j < s.eps.size(); ++j)
        per_eps.push_back({{"eps", s.eps[j]}, {"hits", s.hits[j]}, {"frequency", s.frequency[j]}});
    json quantiles = json::array();
    for (std::size_t j = 0; j < s.quantiles.size(); ++j)
        quantiles.push_back({{"level", s.quantile_levels[j]}, {"min_distance", s.quantiles[j]}});
    return {{"paths", s.paths},
            {"exploded", s.exploded},
            {"first_passage", per_eps},
            {"min_distance_quantiles", quantiles},
            {"min_distance", s.min_distance}};
}

json to_json(const MonotoneStats& s)
{
    return {{"paths", s.paths}, {"violated", s.violated}, {"fraction", s.fraction}};
}

json to_json(const std::vector<LevelValue>& values)
{
    json out = json::array();
    for (const auto& v : values)
        out.push_back({{"level", v.level},
                       {"value", number(v.value)},
                       {"ci_halfwidth", number(v.ci_halfwidth)},
                       {"paths_used", v.paths_used}});
    return out;
}

json to_json(const StrongErrorResult& r) { return {{"errors", to_json(r.errors)}, {"slope", number(r.slope)}}; }

json to_json(const TestFunctionEval& e)
{
    return {{"kind", to_string(e.kind)}, {"control", e.control},        {"delta", e.delta},
            {"x", e.x},                  {"value", number(e.value)},    {"error_estimate", number(e.error_estimate)}};
}

}  // namespace sdelab
