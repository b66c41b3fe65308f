#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "sdelab/conditions.hpp"
#include "sdelab/control.hpp"
#include "sdelab/errors.hpp"
#include "sdelab/estimators.hpp"
#include "sdelab/euler.hpp"
#include "sdelab/noise.hpp"
#include "sdelab/registry.hpp"
#include "sdelab/scalar_function.hpp"
#include "sdelab/serialize.hpp"

namespace sdelab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Everything a run depends on. Serialized as config.echo.json; the worker
// count and the output directory are left out because neither changes the
// outputs.
struct RunConfig {
    std::string command;
    std::string condition;  // check only
    std::string model = "cube-root";
    std::string config_path;
    std::map<std::string, double> params;
    int level = 10;
    std::size_t paths = 1;
    double horizon = 1.0;
    double p = 4.0;
    std::uint64_t seed = 1;
    double r_stop = std::numeric_limits<double>::infinity();
    std::string x0;
    std::string y0;
    std::string out_dir = "sdelab_out";
    std::string format = "both";
    int workers = 0;

    // simulate
    int fine_level = -1;
    bool dump_noise = false;
    std::size_t bins = 20;
    // check
    std::size_t samples = 100000;
    double radius = 10.0;
    double min_radius = 0.0;
    double c0 = 0.5;
    double min_separation = 1e-8;
    double t_max = 0.0;
    double control_R = 10.0;
    double K = 1.0;
    std::string eta = "xlog";
    std::string gamma = "linear";
    std::string gamma_r = "xlog";
    std::string g = "const:1";
    std::string f = "const:1";
    // moments
    std::string bound = "both";
    std::optional<double> c_p, c_p_prime, c_p_double_prime;
    // confluence
    std::string eps = "1e-6";
    // converge / strong-error
    std::string levels = "6,7,8,9";
    int ref_level = 12;
    // eval-test-fn
    std::string kind = "phi_delta";
    std::string control = "linear";
    double delta = 1.0;
    double x = 1.0;
};

json echo(const RunConfig& c)
{
    json j;
    j["command"] = c.command;
    if (!c.condition.empty()) j["condition"] = c.condition;
    j["model"] = c.model;
    if (!c.config_path.empty()) j["config"] = c.config_path;
    j["params"] = c.params;
    j["level"] = c.level;
    j["paths"] = c.paths;
    j["T"] = c.horizon;
    j["p"] = c.p;
    j["seed"] = c.seed;
    j["r_stop"] = std::isfinite(c.r_stop) ? json(c.r_stop) : json("inf");
    j["x0"] = c.x0;
    j["y0"] = c.y0;
    j["format"] = c.format;
    j["fine_level"] = c.fine_level;
    j["dump_noise"] = c.dump_noise;
    j["bins"] = c.bins;
    j["samples"] = c.samples;
    j["radius"] = c.radius;
    j["min_radius"] = c.min_radius;
    j["c0"] = c.c0;
    j["min_separation"] = c.min_separation;
    j["t_max"] = c.t_max;
    j["R"] = c.control_R;
    j["K"] = c.K;
    j["eta"] = c.eta;
    j["gamma"] = c.gamma;
    j["gamma_r"] = c.gamma_r;
    j["g"] = c.g;
    j["f"] = c.f;
    j["bound"] = c.bound;
    j["c_p"] = c.c_p ? json(*c.c_p) : json(nullptr);
    j["c_p_prime"] = c.c_p_prime ? json(*c.c_p_prime) : json(nullptr);
    j["c_p_double_prime"] = c.c_p_double_prime ? json(*c.c_p_double_prime) : json(nullptr);
    j["eps"] = c.eps;
    j["levels"] = c.levels;
    j["ref_level"] = c.ref_level;
    j["kind"] = c.kind;
    j["control"] = c.control;
    j["delta"] = c.delta;
    j["x"] = c.x;
    return j;
}

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

Vector parse_vector(const std::string& text, std::size_t d, const std::string& flag)
{
    if (text.empty()) {
        Vector e1(d, 0.0);
        e1[0] = 1.0;
        return e1;
    }
    auto v = parse_number_list(text);
    require(v.size() == d, flag + " has " + std::to_string(v.size()) + " entries, the model has d = " +
                               std::to_string(d));
    return v;
}

std::vector<int> parse_levels(const std::string& text)
{
    std::vector<int> out;
    for (double v : parse_number_list(text)) {
        require(v == std::floor(v) && v >= 0 && v <= 62, "levels must be nonnegative integers");
        out.push_back(static_cast<int>(v));
    }
    require(!out.empty(), "need at least one level");
    return out;
}

// `xlog[:R]`, `linear[:c]` or `zero`.
ControlFunction parse_control(const std::string& spec, ControlKind kind, const RunConfig& c)
{
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::optional<double> arg;
    if (colon != std::string::npos) {
        const auto v = parse_number_list(spec.substr(colon + 1));
        require(v.size() == 1, "control '" + spec + "' takes one number");
        arg = v[0];
    }
    ControlParams params;
    params.R = c.control_R;
    params.c0 = c.c0;
    params.eps0 = c.c0;
    params.K = c.K;
    if (name == "xlog") {
        if (arg) params.R = *arg;
        return make_xlog_control(kind, params);
    }
    if (name == "linear") return make_linear_control(kind, arg.value_or(1.0), params);
    if (name == "zero") {
        require(!arg, "control 'zero' takes no argument");
        return make_zero_control(kind, params);
    }
    throw UsageError("unknown control '" + spec + "' (expected xlog[:R], linear[:c] or zero)");
}

ModelSpec model_spec(const RunConfig& c)
{
    ModelSpec spec{c.model, c.params};
    if (c.config_path.empty()) return spec;
    std::ifstream in(c.config_path);
    require(static_cast<bool>(in), "cannot open config file '" + c.config_path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("config file '" + c.config_path + "' is not valid JSON: " + e.what());
    }
    require(j.is_object() && j.contains("model") && j["model"].is_string(),
            "config file needs a string field \"model\"");
    spec.name = j["model"].get<std::string>();
    spec.params.clear();
    if (j.contains("params")) {
        require(j["params"].is_object(), "config field \"params\" must be an object");
        for (const auto& [key, value] : j["params"].items()) {
            require(value.is_number(), "config parameter '" + key + "' must be a number");
            spec.params[key] = value.get<double>();
        }
    }
    // command-line parameters refine the file
    for (const auto& [key, value] : c.params) spec.params[key] = value;
    return spec;
}

MonteCarloConfig mc_config(const RunConfig& c, const SdeSystem& sys)
{
    MonteCarloConfig mc;
    mc.x0 = parse_vector(c.x0, sys.d, "--x0");
    mc.horizon = c.horizon;
    mc.level = c.level;
    mc.paths = c.paths;
    mc.seed = c.seed;
    mc.r_stop = c.r_stop;
    require(c.paths >= 1, "--paths must be at least 1");
    return mc;
}

SamplingSpec sampling(const RunConfig& c)
{
    SamplingSpec s;
    s.radius = c.radius;
    s.min_radius = c.min_radius;
    s.max_separation = c.c0;
    s.min_separation = c.min_separation;
    s.count = c.samples;
    s.seed = c.seed;
    s.t_max = c.t_max;
    return s;
}

Execution execution(const RunConfig& c)
{
    require(c.workers >= 0, "--workers must be nonnegative");
    return {.workers = c.workers};
}

bool want_csv(const RunConfig& c) { return c.format == "csv" || c.format == "both"; }
bool want_json(const RunConfig& c) { return c.format == "json" || c.format == "both"; }

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

class OutputDir {
public:
    explicit OutputDir(const std::string& path) : root_(path)
    {
        std::error_code ec;
        fs::create_directories(root_, ec);
        if (ec) throw ResourceError("cannot create output directory '" + path + "': " + ec.message());
    }

    template <class Writer>
    void write(const std::string& name, Writer&& writer, std::ios::openmode mode = std::ios::out) const
    {
        const auto path = root_ / name;
        std::ofstream out(path, mode | std::ios::trunc);
        if (!out) throw ResourceError("cannot open '" + path.string() + "' for writing");
        writer(out);
        out.flush();
        if (!out) throw ResourceError("failed writing '" + path.string() + "'");
    }

    void write_json(const std::string& name, const json& j) const
    {
        write(name, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    }

private:
    fs::path root_;
};

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& c, const OutputDir& dir, std::ostream& out)
{
    const auto sys = make_model(model_spec(c));
    const auto mc = mc_config(c, sys);
    require(c.fine_level < 0 || c.fine_level > c.level, "--fine-level must exceed --level");
    const int tree_level = std::max(c.level, c.fine_level);

    EulerConfig cfg;
    cfg.level = c.level;
    cfg.horizon = c.horizon;
    cfg.r_stop = c.r_stop;
    cfg.x0 = mc.x0;
    cfg.eps0 = c.c0;

    for (std::size_t i = 0; i < c.paths; ++i) {
        const auto tree = sample_tree(sys.m, c.horizon, tree_level, c.seed, i);
        const std::string stem = "path_" + std::to_string(i);
        if (c.fine_level >= 0) {
            const auto rec = coupled_resolutions(sys, c.level, c.fine_level, cfg, tree);
            dir.write(stem + ".csv", [&](std::ostream& o) { write_coupled_csv(rec, o); });
        } else {
            const auto path = euler_path(sys, cfg, tree);
            dir.write(stem + ".csv", [&](std::ostream& o) { write_path_csv(path, o); });
        }
        if (c.dump_noise)
            dir.write("noise_" + std::to_string(i) + ".bin", [&](std::ostream& o) { write_tree(tree, o); },
                      std::ios::binary);
    }
    auto mc_stats = mc;
    mc_stats.tree_level = tree_level;
    const auto stats = explosion_stats(sys, mc_stats, c.bins, execution(c));
    dir.write_json("explosion.json", to_json(stats));
    out << "wrote " << c.paths << " path(s); explosion frequency " << format_double(stats.frequency) << '\n';
    return 0;
}

int cmd_check(const RunConfig& c, const OutputDir& dir, std::ostream& out)
{
    const auto spec = sampling(c);
    const auto exec = execution(c);
    ConditionReport report;
    if (c.condition == "k-ratio") {
        report = check_k_ratio(parse_control(c.gamma_r, ControlKind::gamma_r, c), c.K, c.c0, spec);
    } else {
        const auto sys = make_model(model_spec(c));
        if (c.condition == "monotonicity") {
            report = check_monotonicity(sys, parse_control(c.eta, ControlKind::eta, c), ScalarFunction::parse(c.g),
                                        c.radius, c.c0, spec, exec);
        } else if (c.condition == "coercivity") {
            report = check_coercivity(sys, parse_control(c.gamma, ControlKind::gamma, c),
                                      ScalarFunction::parse(c.f), c.min_radius, spec, exec);
        } else if (c.condition == "moment") {
            report = check_moment_condition(sys, ScalarFunction::parse(c.f), spec, exec);
        } else {
            report = check_confluence_condition(sys, parse_control(c.gamma_r, ControlKind::gamma_r, c), c.K,
                                                c.radius, c.c0, spec, exec);
        }
    }
    const auto j = to_json(report);
    dir.write_json("check_" + c.condition + ".json", j);
    out << c.condition << ": " << to_string(report.verdict) << " (worst margin "
        << format_double(report.worst_margin) << ", tolerance " << format_double(report.tolerance) << ")\n";
    return 0;
}

int cmd_moments(const RunConfig& c, const OutputDir& dir, std::ostream& out)
{
    const auto sys = make_model(model_spec(c));
    const auto mc = mc_config(c, sys);
    const auto exec = execution(c);
    require(c.bound == "i" || c.bound == "ii" || c.bound == "both" || c.bound == "none",
            "--bound must be i, ii, both or none");

    auto report = estimate_sup_moment(sys, c.p, mc, exec);
    if (c.bound != "none") {
        std::optional<ScalarFunction> f;
        if (c.f == "auto") {
            // smallest constant f for which the moment condition holds on the sampled points
            const double level = max_moment_ratio(sys, sampling(c), exec);
            f = ScalarFunction("auto:" + format_double(level), [level](double) { return level; });
        } else {
            f = ScalarFunction::parse(c.f);
        }
        auto constants = MomentConstants::defaults(c.p);
        if (c.c_p) constants.c_p = *c.c_p;
        if (c.c_p_prime) constants.c_p_prime = *c.c_p_prime;
        if (c.c_p_double_prime) constants.c_p_double_prime = *c.c_p_double_prime;
        attach_bounds(report, *f, norm(mc.x0), constants, c.bound == "i" || c.bound == "both",
                      c.bound == "ii" || c.bound == "both");
    }
    dir.write_json("moments.json", to_json(report));
    out << "E sup|X|^" << format_double(c.p) << " = " << format_double(report.estimate) << " +- "
        << format_double(report.ci_halfwidth);
    if (report.bound_i) out << "; log bound_i = " << format_double(report.bound_i->log_value);
    if (report.bound_ii) out << "; log bound_ii = " << format_double(report.bound_ii->log_value);
    out << '\n';
    return 0;
}

int cmd_confluence(const RunConfig& c, const OutputDir& dir, std::ostream& out)
{
    const auto sys = make_model(model_spec(c));
    const auto mc = mc_config(c, sys);
    require(!c.y0.empty(), "confluence needs --y0");
    const auto y0 = parse_vector(c.y0, sys.d, "--y0");
    const auto stats = confluence_stats(sys, y0, parse_number_list(c.eps), mc, execution(c));
    if (want_json(c)) dir.write_json("confluence.json", to_json(stats));
    if (want_csv(c))
        dir.write("min_distance.csv", [&](std::ostream& o) {
            o << "path,min_distance\n";
            for (std::size_t i = 0; i < stats.min_distance.size(); ++i)
                o << i << ',' << format_double(stats.min_distance[i]) << '\n';
        });
    for (std::size_t j = 0; j < stats.eps.size(); ++j)
        out << "eps " << format_double(stats.eps[j]) << ": frequency " << format_double(stats.frequency[j]) << '\n';
    return 0;
}

int cmd_monotone(const RunConfig& c, const OutputDir& dir, std::ostream& out)
{
    const auto sys = make_model(model_spec(c));
    const auto mc = mc_config(c, sys);
    require(!c.y0.empty(), "monotone needs --y0");
    const auto y0 = parse_vector(c.y0, sys.d, "--y0");
    const auto stats = monotonicity_stats(sys, y0[0], mc, execution(c));
    dir.write_json("monotone.json", to_json(stats));
    out << "ordering violated on " << stats.violated << " of " << stats.paths << " paths\n";
    return 0;
}

void write_levels(const RunConfig& c, const OutputDir& dir, const std::string& stem,
                  const std::vector<LevelValue>& values, const json& j)
{
    if (want_csv(c)) dir.write(stem + ".csv", [&](std::ostream& o) { write_level_csv(values, o); });
    if (want_json(c)) dir.write_json(stem + ".json", j);
}

int cmd_converge(const RunConfig& c, const OutputDir& dir, std::ostream& out)
{
    const auto sys = make_model(model_spec(c));
    auto mc = mc_config(c, sys);
    const auto values = convergence_diagnostic(sys, parse_levels(c.levels), c.ref_level, mc, execution(c));
    write_levels(c, dir, "converge", values, to_json(values));
    for (const auto& v : values)
        out << "level " << v.level << ": " << format_double(v.value) << " +- " << format_double(v.ci_halfwidth)
            << '\n';
    return 0;
}

int cmd_strong_error(const RunConfig& c, const OutputDir& dir, std::ostream& out)
{
    const auto sys = make_model(model_spec(c));
    auto mc = mc_config(c, sys);
    const auto result = strong_error_vs_oracle(sys, parse_levels(c.levels), mc, execution(c));
    write_levels(c, dir, "strong_error", result.errors, to_json(result));
    out << "fitted slope " << format_double(result.slope) << '\n';
    return 0;
}

int cmd_eval_test_fn(const RunConfig& c, const OutputDir& dir, std::ostream& out)
{
    TestFunctionKind kind;
    ControlKind role;
    if (c.kind == "phi_delta") {
        kind = TestFunctionKind::phi_delta;
        role = ControlKind::eta;
    } else if (c.kind == "varphi") {
        kind = TestFunctionKind::varphi;
        role = ControlKind::gamma;
    } else if (c.kind == "Phi_delta") {
        kind = TestFunctionKind::Phi_delta;
        role = ControlKind::gamma_r;
    } else {
        throw UsageError("--kind must be phi_delta, varphi or Phi_delta");
    }
    const auto eval = eval_test_function(kind, parse_control(c.control, role, c), c.delta, c.x, c.c0);
    dir.write_json("test_fn.json", to_json(eval));
    out << c.kind << "(" << format_double(c.x) << ") = " << format_double(eval.value) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// Option wiring
// ---------------------------------------------------------------------------

struct ModelParamFlags {
    std::map<std::string, std::optional<double>> named;
    std::vector<std::string> generic;
};

void add_model_options(CLI::App* sub, RunConfig& c, ModelParamFlags& flags)
{
    sub->add_option("--model", c.model, "built-in model: " + [] {
        std::string s;
        for (const auto& n : builtin_models()) s += (s.empty() ? "" : ", ") + n;
        return s;
    }());
    sub->add_option("--config", c.config_path, "JSON file {\"model\": name, \"params\": {...}}");
    for (const char* key : {"d", "m", "r", "theta", "mu", "vol", "a", "s"})
        sub->add_option(std::string("--") + key, flags.named[key], std::string("model parameter ") + key);
    sub->add_option("--param", flags.generic, "model parameter as key=value (repeatable)");
}

void add_run_options(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--level", c.level, "Euler level: 2^level steps")->check(CLI::NonNegativeNumber);
    sub->add_option("--paths", c.paths, "number of Monte Carlo paths");
    sub->add_option("--T", c.horizon, "time horizon");
    sub->add_option("--r-stop", c.r_stop, "stopping radius");
    sub->add_option("--x0", c.x0, "start point, comma separated (default e1)");
}

void add_common(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--seed", c.seed, "random seed")->envname("SDELAB_SEED");
    sub->add_option("--out", c.out_dir, "output directory");
    sub->add_option("--format", c.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--workers", c.workers, "cap on parallel workers (0 = all)");
}

void add_sampling(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--samples", c.samples, "number of sampled points or pairs");
    sub->add_option("--radius", c.radius, "sampling radius R");
    sub->add_option("--c0", c.c0, "largest pair separation / locality constant");
    sub->add_option("--min-separation", c.min_separation, "smallest pair separation");
    sub->add_option("--t-max", c.t_max, "times are drawn from [0, t-max]");
}

void collect_params(RunConfig& c, const ModelParamFlags& flags)
{
    for (const auto& [key, value] : flags.named)
        if (value) c.params[key] = *value;
    for (const auto& kv : flags.generic) {
        const auto eq = kv.find('=');
        require(eq != std::string::npos && eq > 0, "--param expects key=value, got '" + kv + "'");
        const auto v = parse_number_list(kv.substr(eq + 1));
        require(v.size() == 1, "--param " + kv + " needs one number");
        c.params[kv.substr(0, eq)] = v[0];
    }
}

int dispatch(const RunConfig& c, std::ostream& out)
{
    const OutputDir dir(c.out_dir);
    dir.write_json("config.echo.json", echo(c));
    if (c.command == "simulate") return cmd_simulate(c, dir, out);
    if (c.command == "check") return cmd_check(c, dir, out);
    if (c.command == "moments") return cmd_moments(c, dir, out);
    if (c.command == "confluence") return cmd_confluence(c, dir, out);
    if (c.command == "monotone") return cmd_monotone(c, dir, out);
    if (c.command == "converge") return cmd_converge(c, dir, out);
    if (c.command == "strong-error") return cmd_strong_error(c, dir, out);
    return cmd_eval_test_fn(c, dir, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig c;
    ModelParamFlags flags;
    CLI::App app{"Euler-Maruyama experiments for SDEs with non-Lipschitz coefficients", "sdelab"};
    app.require_subcommand(1, 1);

    auto* simulate = app.add_subcommand("simulate", "write Euler paths as CSV");
    add_model_options(simulate, c, flags);
    add_run_options(simulate, c);
    add_common(simulate, c);
    simulate->add_option("--fine-level", c.fine_level, "also run a finer level and write coupled columns");
    simulate->add_flag("--dump-noise", c.dump_noise, "write each Brownian tree as noise_<i>.bin");
    simulate->add_option("--bins", c.bins, "exit-time histogram bins");
    simulate->add_option("--c0", c.c0, "threshold eps0 for the coupled stopping time");

    auto* check = app.add_subcommand("check", "sampled check of a condition");
    check->add_option("condition", c.condition, "monotonicity | coercivity | moment | confluence | k-ratio")
        ->required()
        ->check(CLI::IsMember({"monotonicity", "coercivity", "moment", "confluence", "k-ratio"}));
    add_model_options(check, c, flags);
    add_common(check, c);
    add_sampling(check, c);
    check->add_option("--min-radius", c.min_radius, "coercivity: smallest |x| (K_radius)");
    check->add_option("--R", c.control_R, "R of the x log(1/x) controls");
    check->add_option("--K", c.K, "non-confluence constant, > 1/2");
    check->add_option("--eta", c.eta, "monotonicity control: xlog[:R] | linear[:c] | zero");
    check->add_option("--gamma", c.gamma, "coercivity control: xlog[:R] | linear[:c] | zero");
    check->add_option("--gamma-r", c.gamma_r, "non-confluence control: xlog[:R] | linear[:c] | zero");
    check->add_option("--g", c.g, "g(t): const:<v> | poly:<c0,c1,..> | table:<csv>");
    check->add_option("--f", c.f, "f(t): const:<v> | poly:<c0,c1,..> | table:<csv>");

    auto* moments = app.add_subcommand("moments", "moment of the maximum process and its bounds");
    add_model_options(moments, c, flags);
    add_run_options(moments, c);
    add_common(moments, c);
    add_sampling(moments, c);
    moments->add_option("--p", c.p, "moment order, > 2");
    moments->add_option("--f", c.f, "f(t) spec, or 'auto' for the sampled smallest constant");
    moments->add_option("--bound", c.bound, "i | ii | both | none");
    moments->add_option("--c-p", c.c_p, "override C_p");
    moments->add_option("--c-p-prime", c.c_p_prime, "override C'_p");
    moments->add_option("--c-p-double-prime", c.c_p_double_prime, "override C''_p");

    auto* confluence = app.add_subcommand("confluence", "two-start coupling: first passage below eps");
    add_model_options(confluence, c, flags);
    add_run_options(confluence, c);
    add_common(confluence, c);
    confluence->add_option("--y0", c.y0, "second start point")->required();
    confluence->add_option("--eps", c.eps, "comma-separated thresholds");

    auto* monotone = app.add_subcommand("monotone", "ordering of two one-dimensional solutions");
    add_model_options(monotone, c, flags);
    add_run_options(monotone, c);
    add_common(monotone, c);
    monotone->add_option("--y0", c.y0, "second start point, > x0")->required();

    auto* converge = app.add_subcommand("converge", "E max |X_level - X_ref|^2 per level");
    add_model_options(converge, c, flags);
    add_run_options(converge, c);
    add_common(converge, c);
    converge->add_option("--levels", c.levels, "comma-separated levels");
    converge->add_option("--ref-level", c.ref_level, "reference level");

    auto* strong = app.add_subcommand("strong-error", "RMS endpoint error against a closed-form solution");
    add_model_options(strong, c, flags);
    add_run_options(strong, c);
    add_common(strong, c);
    strong->add_option("--levels", c.levels, "comma-separated levels");

    auto* test_fn = app.add_subcommand("eval-test-fn", "evaluate phi_delta, varphi or Phi_delta");
    add_common(test_fn, c);
    test_fn->add_option("--kind", c.kind, "phi_delta | varphi | Phi_delta");
    test_fn->add_option("--control", c.control, "xlog[:R] | linear[:c] | zero");
    test_fn->add_option("--delta", c.delta, "regularization delta");
    test_fn->add_option("--x", c.x, "evaluation point");
    test_fn->add_option("--c0", c.c0, "upper limit c0 of Phi_delta");
    test_fn->add_option("--R", c.control_R, "R of the x log(1/x) control");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::usage);
    }
    c.command = app.get_subcommands().front()->get_name();

    try {
        collect_params(c, flags);
        return dispatch(c, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace sdelab::cli
