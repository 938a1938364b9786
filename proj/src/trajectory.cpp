#include "cda/trajectory.hpp"

#include <cmath>
#include <sstream>

#include "cda/error.hpp"

namespace cda {

void Scenario::validate() const {
    problem.aircraft.validate();
    problem.limits.validate();
    if (!(tas0 > 0.0 && tas_f > 0.0)) throw ValidationError("boundary speeds must be positive");
    if (!(h0 > h_f)) throw ValidationError("initial altitude must be above the final altitude");
    if (!(s_f > problem.cost.d_max)) throw ValidationError("final position s_f must lie after d_max");
    const auto s0 = dyn::pure_state_constraints(problem.aircraft, tas0, h0);
    const auto sf = dyn::pure_state_constraints(problem.aircraft, tas_f, h_f);
    for (int i = 0; i < dyn::kConstraintCount; ++i) {
        if (s0[i] > 1e-9) throw ValidationError("initial state violates " + dyn::constraint_name(i));
        if (sf[i] > 1e-9) throw ValidationError("final state violates " + dyn::constraint_name(i));
    }
    const double v_min = std::min(perf::tas_envelope(problem.aircraft, h_f).first,
                                  perf::tas_envelope(problem.aircraft, h0).first);
    if (!(problem.wind.max_abs_cross() < 0.9 * v_min)) {
        throw ValidationError("cross wind exceeds 0.9 of the minimum true airspeed");
    }
    perf::check_descent_capability(problem.aircraft, h_f, h0);
}

std::string arc_label(ArcKind kind, int constraint) {
    switch (kind) {
        case ArcKind::kBangHigh: return "level";
        case ArcKind::kBangLow: return "steepest";
        case ArcKind::kSingular: return "singular";
        case ArcKind::kBoundary: return "boundary:" + dyn::constraint_name(constraint);
    }
    return "?";
}

std::vector<ArcKind> Trajectory::structure() const {
    std::vector<ArcKind> out;
    for (const auto& a : arcs) {
        if (a.samples.size() > 1) out.push_back(a.kind);
    }
    return out;
}

std::string Trajectory::structure_label() const {
    std::string s;
    for (const auto& a : arcs) {
        if (a.samples.size() < 2) continue;
        if (!s.empty()) s += " > ";
        s += a.label();
    }
    return s;
}

CostForms total_cost(const Trajectory& traj, const perf::CostSpec& cost) {
    if (traj.arcs.empty() || traj.arcs.front().samples.empty()) throw ValidationError("empty trajectory");
    const dyn::Aug& first = traj.arcs.front().samples.front();
    const dyn::Aug& last = traj.arcs.back().samples.back();
    if (first[dyn::kX] < cost.d_max) {
        std::ostringstream os;
        os << "descent starts at x=" << first[dyn::kX] << " m, before d_max=" << cost.d_max << " m";
        throw ValidationError(os.str());
    }
    CostForms f;
    f.mayer = cost.k_cr * (first[dyn::kX] - cost.d_max) + (last[dyn::kCostInt] - first[dyn::kCostInt]);
    f.lagrange =
        cost.k_cr * (last[dyn::kX] - cost.d_max) + (last[dyn::kLagrangeInt] - first[dyn::kLagrangeInt]);
    const double scale = std::max(std::abs(f.mayer), std::abs(f.lagrange));
    if (std::abs(f.mayer - f.lagrange) > 1e-8 * scale) {
        std::ostringstream os;
        os.precision(12);
        os << "cost forms disagree: " << f.mayer << " vs " << f.lagrange;
        throw ValidationError(os.str());
    }
    return f;
}

void compute_totals(Trajectory& traj, const Scenario& sc) {
    const auto& cost = sc.problem.cost;
    const dyn::Aug& first = traj.arcs.front().samples.front();
    const dyn::Aug& last = traj.arcs.back().samples.back();
    const CostForms f = total_cost(traj, cost);
    Totals& t = traj.totals;
    t.tod = first[dyn::kX];
    t.descent_time = last[dyn::kT] - first[dyn::kT];
    const double cruise_dist = first[dyn::kX] - cost.d_max;
    const double cruise_time = cruise_dist / cost.cruise_ground_speed;
    t.arrival_time = cruise_time + t.descent_time;
    const double cruise_fuel = sc.problem.aircraft.cruise_fuel_flow * cruise_time;
    t.fuel = cruise_fuel + (last[dyn::kFuelInt] - first[dyn::kFuelInt]);
    for (std::size_t s = 0; s < perf::kSpeciesCount; ++s) {
        t.emissions[s] = cost.ei_cruise[s] * cruise_fuel + (last[dyn::kEmInt0 + s] - first[dyn::kEmInt0 + s]);
    }
    t.cost = f.mayer;
    t.cost_lagrange = f.lagrange;
}

}  // namespace cda
