#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdelab/conditions.hpp"
#include "sdelab/estimators.hpp"
#include "sdelab/euler.hpp"

namespace sdelab {

/// Shortest form that keeps 17 significant digits ("%.17g").
std::string format_double(double v);

/// Per-row stop code in the `stopped` column: 0 running, 1 radius, 2 nonfinite.
int stop_code(const PathRecord& path, std::size_t row);

/// Header `t,x1,...,xd,stopped`.
void write_path_csv(const PathRecord& path, std::ostream& out);
/// Header `t,x1,...,xd,stopped,xi,defect_norm`; x and stopped describe the
/// first path of the pair.
void write_coupled_csv(const CoupledRecord& record, std::ostream& out);
/// Header `level,value,ci_halfwidth`.
void write_level_csv(const std::vector<LevelValue>& values, std::ostream& out);

nlohmann::json to_json(const SamplingSpec& spec);
nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const MomentConstants& constants);
nlohmann::json to_json(const MomentBound& bound);
nlohmann::json to_json(const MomentReport& report);
nlohmann::json to_json(const ExplosionStats& stats);
nlohmann::json to_json(const ConfluenceStats& stats);
nlohmann::json to_json(const MonotoneStats& stats);
nlohmann::json to_json(const std::vector<LevelValue>& values);
nlohmann::json to_json(const StrongErrorResult& result);
nlohmann::json to_json(const TestFunctionEval& eval);

}  // namespace sdelab
