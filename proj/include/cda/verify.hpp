// Grid dynamic-programming solution of the free-initial-range problem, used
// as an independent bound on the generated trajectory.
#pragma once

#include <string>
#include <vector>

#include "cda/trajectory.hpp"

namespace cda::verify {

struct GridSpec {
    int n_h = 400;      // altitude rows from h_f to h_0
    int n_v = 200;      // true-airspeed nodes per row
    int n_gamma = 21;   // samples of the descending interval; level flight is always added

    /// Parses "NHxNVxNG"; throws ValidationError.
    static GridSpec parse(const std::string& text);
    std::string str() const;
};

struct DpPoint {
    double h = 0.0;
    double tas = 0.0;
    double gamma = 0.0;
};

struct DpResult {
    GridSpec grid;
    double cost = 0.0;         // free-initial-range total including the cruise term
    double cost_to_go = 0.0;   // integral part from the initial state
    double tod = 0.0;          // m
    double descent_time = 0.0; // s
    std::vector<DpPoint> path; // nearest-node replay from the initial state
    // Value tables, row-major [row * n_v + node]; kept for determinism checks.
    std::vector<double> value;
    std::vector<double> distance;
};

/// Altitude rows are the stages: every admissible descent moves down one row,
/// level deceleration moves one node left inside a row. Nodes outside the
/// speed envelope are pruned. Throws SynthesisError if the initial state
/// cannot reach the final node on the grid.
DpResult dp_solve(const Scenario& sc, const GridSpec& grid);
/// Same recursion evaluated on one thread.
DpResult dp_solve_serial(const Scenario& sc, const GridSpec& grid);

struct Comparison {
    double gen_cost = 0.0;
    double dp_cost = 0.0;
    double cost_gap = 0.0;     // (dp - gen) / |gen|
    double tod_gap = 0.0;      // m, dp - gen
    double max_cas_dev = 0.0;  // m/s over the common descending altitude band
};

Comparison compare(const Trajectory& traj, const DpResult& dp);

}  // namespace cda::verify
