// Scenario, arc and trajectory records shared by the generator, the checker,
// the DP oracle and the file writers.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "cda/dynamics.hpp"

namespace cda {

struct Scenario {
    std::string name;
    dyn::Problem problem;
    double tas0 = 0.0;  // m/s
    double h0 = 0.0;    // m
    double tas_f = 0.0;
    double h_f = 0.0;
    double s_f = 0.0;   // m, terminal along-track position

    void validate() const;
};

enum class ArcKind { kBangHigh, kBangLow, kSingular, kBoundary };

/// "level", "steepest", "singular", "boundary:<constraint>".
std::string arc_label(ArcKind kind, int constraint);

struct Arc {
    ArcKind kind = ArcKind::kBangHigh;
    int constraint = -1;  // active constraint on a boundary arc
    std::vector<dyn::Aug> samples;
    std::vector<double> gammas;

    std::string label() const { return arc_label(kind, constraint); }
    double duration() const { return samples.empty() ? 0.0 : samples.back()[dyn::kT] - samples.front()[dyn::kT]; }
};

struct Junction {
    std::size_t from = 0;  // arc index before
    std::size_t to = 0;    // arc index after
    double t = 0.0;
    double tas = 0.0;
    double h = 0.0;
    double x = 0.0;
    double state_gap = 0.0;  // |V| mismatch between the two arcs, m/s
};

struct Totals {
    double tod = 0.0;           // m, x at the start of descent
    double descent_time = 0.0;  // s
    double arrival_time = 0.0;  // s, measured from d_max at cruise speed
    double fuel = 0.0;          // kg, cruise from d_max plus descent
    std::array<double, perf::kSpeciesCount> emissions{};  // g
    double cost = 0.0;          // Mayer + integral form
    double cost_lagrange = 0.0; // free-initial-range form
};

struct Trajectory {
    std::vector<Arc> arcs;
    std::vector<Junction> junctions;
    Totals totals;
    std::vector<std::string> trace;

    std::vector<ArcKind> structure() const;
    std::string structure_label() const;
};

struct CostForms {
    double mayer = 0.0;     // K_cr (x0 - d_max) + integral of K_des
    double lagrange = 0.0;  // K_cr (s_f - d_max) + integral of (-K_cr gs + K_des)
};

/// Evaluates both cost forms from the running integrals and checks they agree
/// to 1e-8 relative. Throws ValidationError if the descent starts before d_max
/// or the forms disagree.
CostForms total_cost(const Trajectory& traj, const perf::CostSpec& cost);

/// Fills traj.totals from the arc samples.
void compute_totals(Trajectory& traj, const Scenario& sc);

}  // namespace cda
