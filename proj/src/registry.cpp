#include "sdelab/registry.hpp"

#include <cmath>

#include "sdelab/errors.hpp"

namespace sdelab {

namespace {

std::string joined_models()
{
    std::string out;
    for (const auto& name : builtin_models()) out += (out.empty() ? "" : ", ") + name;
    return out;
}

std::size_t as_dimension(double v, const char* what)
{
    require(v >= 1.0 && v <= 4096.0 && std::floor(v) == v, std::string(what) + " must be a positive integer");
    return static_cast<std::size_t>(v);
}

}  // namespace

const std::vector<std::string>& builtin_models()
{
    static const std::vector<std::string> names{"cube-root", "rotation", "ou",   "gbm",
                                                "blowup",    "linear",   "sine", "zero"};
    return names;
}

std::map<std::string, double> default_params(const std::string& name)
{
    if (name == "cube-root") return {{"d", 1.0}};
    if (name == "rotation") return {{"r", 1.0}};
    if (name == "ou") return {{"theta", 1.0}, {"vol", 1.0}};
    if (name == "gbm") return {{"mu", 0.05}, {"vol", 0.2}};
    if (name == "blowup" || name == "sine") return {};
    if (name == "linear") return {{"d", 1.0}, {"a", -1.0}, {"s", 0.0}};
    if (name == "zero") return {{"d", 1.0}, {"m", 1.0}};
    throw UsageError("unknown model '" + name + "'; built-in models: " + joined_models());
}

SdeSystem make_model(const ModelSpec& spec)
{
    auto params = default_params(spec.name);
    for (const auto& [key, value] : spec.params) {
        if (!params.contains(key)) {
            std::string accepted;
            for (const auto& [k, v] : params) accepted += (accepted.empty() ? "" : ", ") + k;
            throw UsageError("model '" + spec.name + "' has no parameter '" + key + "' (accepted: " +
                             (accepted.empty() ? "none" : accepted) + ")");
        }
        params[key] = value;
    }
    const auto& n = spec.name;
    if (n == "cube-root") return make_cube_root(as_dimension(params["d"], "d"));
    if (n == "rotation") return make_rotation(params["r"]);
    if (n == "ou") return make_oracle(OracleKind::ou, {.theta = params["theta"], .vol = params["vol"]});
    if (n == "gbm") return make_oracle(OracleKind::gbm, {.mu = params["mu"], .vol = params["vol"]});
    if (n == "blowup") return make_oracle(OracleKind::deterministic_blowup, {});
    if (n == "linear") return make_linear(as_dimension(params["d"], "d"), params["a"], params["s"]);
    if (n == "sine") return make_sine_diffusion();
    return make_zero(as_dimension(params["d"], "d"), as_dimension(params["m"], "m"));
}

}  // namespace sdelab
