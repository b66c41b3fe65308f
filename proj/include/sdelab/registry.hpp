#pragma once

#include <map>
#include <string>
#include <vector>

#include "sdelab/model.hpp"

namespace sdelab {

/// A built-in model name plus numeric parameters, e.g. {"rotation", {{"r", 1}}}.
struct ModelSpec {
    std::string name;
    std::map<std::string, double> params;
};

/// Names accepted by make_model, in display order.
const std::vector<std::string>& builtin_models();

/// Builds a built-in model. Missing parameters take their defaults; unknown
/// names or parameters raise UsageError listing what is accepted.
SdeSystem make_model(const ModelSpec& spec);

/// Parameter names and defaults of a built-in model.
std::map<std::string, double> default_params(const std::string& name);

}  // namespace sdelab
