#pragma once

#include <string>

#include "gradstate/solver.hpp"

namespace gradstate {

/// JSON serialization of a SolverReport (iterations, residual_history,
/// objective_history, wall_time_seconds, algorithm, level, alpha, final
/// iterate vectors).
std::string report_to_json(const SolverReport& report);

SolverReport report_from_json(const std::string& json_text);

void write_report_json(const SolverReport& report, const std::string& path);

SolverReport read_report_json(const std::string& path);

}  // namespace gradstate
