// File formats: aircraft and scenario JSON, trajectory CSV, summary JSON.
#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "cda/optimal.hpp"
#include "cda/verify.hpp"

namespace cda::io {

perf::AircraftModel aircraft_from_json(const nlohmann::json& j);
perf::AircraftModel load_aircraft(const std::string& path);

/// Builds a scenario from its JSON document. `base_dir` resolves a relative
/// aircraft path; `aircraft_override` (if non-empty) replaces it.
Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir,
                            const std::string& aircraft_override = "");
Scenario load_scenario(const std::string& path, const std::string& aircraft_override = "");

/// Rebuilds the cost and cruise reference after the wind has been changed.
void refresh_cost(Scenario& sc);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const opt::OptimalityReport& report,
                          const Scenario& sc);
/// Reads the state, control and arc columns back. Throws ValidationError.
Trajectory read_trajectory_csv(std::istream& is);

nlohmann::json summary_json(const Trajectory& traj, const Scenario& sc);
nlohmann::json report_json(const opt::OptimalityReport& report);
nlohmann::json comparison_json(const verify::Comparison& c, const verify::DpResult& dp);

void write_curve_csv(std::ostream& os, const opt::SingularArcCurve& curve);

}  // namespace cda::io
