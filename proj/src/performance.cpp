#include "cda/performance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cda/error.hpp"

namespace cda::perf {
namespace {

double log_log_interp(const std::vector<EiPoint>& table, double w) {
    if (w <= table.front().first) return table.front().second;
    if (w >= table.back().first) return table.back().second;
    auto hi = std::upper_bound(table.begin(), table.end(), w,
                               [](double v, const EiPoint& p) { return v < p.first; });
    auto lo = hi - 1;
    const double f = std::log(w / lo->first) / std::log(hi->first / lo->first);
    return std::exp(std::log(lo->second) + f * std::log(hi->second / lo->second));
}

}  // namespace

std::string species_name(Species s) {
    switch (s) {
        case Species::kNOx: return "NOx";
        case Species::kCO: return "CO";
        case Species::kHC: return "HC";
    }
    return "?";
}

Species species_from_name(const std::string& name) {
    if (name == "NOx") return Species::kNOx;
    if (name == "CO") return Species::kCO;
    if (name == "HC") return Species::kHC;
    throw ValidationError("unknown species '" + name + "' (expected NOx, CO or HC)");
}

void AircraftModel::validate() const {
    auto fail = [&](const std::string& msg) { throw ValidationError("aircraft " + name + ": " + msg); };
    if (!(mass > 0.0)) fail("mass must be positive");
    if (!(wing_area > 0.0)) fail("wing area must be positive");
    if (!(cd0 > 0.0)) fail("cd0 must be positive");
    if (!(cd2 >= 0.0)) fail("cd2 must be non-negative");
    if (!(ct2 > 0.0) || !(cf4 > 0.0)) fail("ct2 and cf4 must be positive");
    if (!(cf3 > 0.0)) fail("idle fuel coefficient cf3 must be positive");
    if (!(cruise_fuel_flow > 0.0)) fail("cruise fuel flow must be positive");
    for (std::size_t s = 0; s < kSpeciesCount; ++s) {
        const auto& t = ei_tables[s];
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!(t[i].first > 0.0) || !(t[i].second > 0.0)) {
                fail("EI table " + species_name(static_cast<Species>(s)) + " needs positive entries");
            }
            if (i > 0 && !(t[i].first > t[i - 1].first)) {
                fail("EI table " + species_name(static_cast<Species>(s)) + " fuel flows must increase");
            }
        }
    }
    const auto& e = envelope;
    if (!(e.cas_min > 0.0 && e.cas_min < e.cas_max)) fail("envelope needs 0 < cas_min < cas_max");
    if (!(e.mach_min > 0.0 && e.mach_min < e.mach_max && e.mach_max < 1.0)) {
        fail("envelope needs 0 < mach_min < mach_max < 1");
    }
}

std::pair<double, double> tas_envelope(const AircraftModel& ac, double h) {
    const auto& e = ac.envelope;
    const double lo = std::max(air::tas_from_cas(e.cas_min, h), air::tas_from_mach(e.mach_min, h));
    const double hi = std::min(air::tas_from_cas(e.cas_max, h), air::tas_from_mach(e.mach_max, h));
    return {lo, hi};
}

double lift_coefficient(const AircraftModel& ac, double tas, double h) {
    if (!(tas > 0.0)) throw DomainError("lift_coefficient: airspeed must be positive");
    const double rho = air::atmos_at(h).density;
    return 2.0 * ac.mass * air::kGravity / (rho * tas * tas * ac.wing_area);
}

double drag(const AircraftModel& ac, double tas, double h) {
    const double rho = air::atmos_at(h).density;
    const double cl = lift_coefficient(ac, tas, h);
    return 0.5 * rho * tas * tas * ac.wing_area * (ac.cd0 + ac.cd2 * cl * cl);
}

double idle_thrust(const AircraftModel& ac, double h) {
    return ac.ct1 * (1.0 - h / ac.ct2 + ac.ct3 * h * h);
}

double net_drag(const AircraftModel& ac, double tas, double h) { return drag(ac, tas, h) - idle_thrust(ac, h); }

air::Partials net_drag_partials(const AircraftModel& ac, double tas, double h) {
    // D = qS cd0 + cd2 (mg)^2 / (qS), qS = rho V^2 S / 2
    const air::AtmosState a = air::atmos_at(h);
    const double qs = 0.5 * a.density * tas * tas * ac.wing_area;
    const double w2 = std::pow(ac.mass * air::kGravity, 2);
    const double dd_dqs = ac.cd0 - ac.cd2 * w2 / (qs * qs);
    const double drho_dh =
        a.density * (-air::kGravity / (air::kGasConstant * a.temperature) - a.dtemperature_dh / a.temperature);
    air::Partials p;
    p.d_dv = dd_dqs * 2.0 * qs / tas;
    p.d_dh = dd_dqs * 0.5 * tas * tas * ac.wing_area * drho_dh - ac.ct1 * (-1.0 / ac.ct2 + 2.0 * ac.ct3 * h);
    return p;
}

double fuel_flow_idle(const AircraftModel& ac, double h) {
    return std::max(0.0, ac.cf3 * (1.0 - h / ac.cf4) / 60.0);
}

double emission_index(const AircraftModel& ac, Species s, double fuel_flow, double tas, double h) {
    const auto& table = ac.ei_tables[static_cast<std::size_t>(s)];
    if (table.empty()) throw ValidationError("no EI table for " + species_name(s));
    const air::AtmosState a = air::atmos_at(h);
    const double m = tas / a.sound_speed;
    const double delta = a.pressure_ratio;
    const double theta = a.temperature_ratio;
    const double w = fuel_flow / delta * std::pow(theta, 3.8) * std::exp(0.2 * m * m);
    const double ref = log_log_interp(table, w);
    if (s == Species::kNOx) return ref * std::sqrt(std::pow(delta, 1.02) / std::pow(theta, 3.3));
    return ref * std::pow(theta, 3.3) / std::pow(delta, 1.02);
}

double emission_index(const AircraftModel& ac, Species s, double tas, double h) {
    return emission_index(ac, s, fuel_flow_idle(ac, h), tas, h);
}

void check_descent_capability(const AircraftModel& ac, double h_lo, double h_hi) {
    constexpr int kN = 41;
    for (int i = 0; i < kN; ++i) {
        const double h = h_lo + (h_hi - h_lo) * i / (kN - 1);
        const auto [v_lo, v_hi] = tas_envelope(ac, h);
        if (!(v_lo < v_hi)) {
            std::ostringstream os;
            os << "aircraft " << ac.name << ": empty speed envelope at h=" << h << " m";
            throw ValidationError(os.str());
        }
        for (int j = 0; j < kN; ++j) {
            const double v = v_lo + (v_hi - v_lo) * j / (kN - 1);
            if (!(net_drag(ac, v, h) > 0.0)) {
                std::ostringstream os;
                os << "aircraft " << ac.name << ": net drag not positive at V_T=" << v << " m/s, h=" << h
                   << " m (idle descent impossible)";
                throw ValidationError(os.str());
            }
        }
    }
}

std::string CostSpec::label() const {
    return kind == CostKind::kFuel ? "fuel" : species_name(species);
}

CostSpec make_cost(const AircraftModel& ac, CostKind kind, Species species, double cruise_tas, double cruise_h,
                   double cruise_ground_speed, double d_max) {
    if (!(cruise_ground_speed > 0.0)) throw ValidationError("cruise ground speed must be positive");
    CostSpec c;
    c.kind = kind;
    c.species = species;
    c.d_max = d_max;
    c.cruise_ground_speed = cruise_ground_speed;
    for (std::size_t s = 0; s < kSpeciesCount; ++s) {
        if (!ac.ei_tables[s].empty()) {
            c.ei_cruise[s] = emission_index(ac, static_cast<Species>(s), ac.cruise_fuel_flow, cruise_tas, cruise_h);
        }
    }
    const double per_metre = ac.cruise_fuel_flow / cruise_ground_speed;
    c.k_cr = kind == CostKind::kFuel ? per_metre : c.ei_cruise[static_cast<std::size_t>(species)] * per_metre;
    if (!(c.k_cr > 0.0)) throw ValidationError("cruise cost coefficient must be positive");
    return c;
}

double k_des(const AircraftModel& ac, const CostSpec& cost, double tas, double h) {
    const double f = fuel_flow_idle(ac, h);
    if (cost.kind == CostKind::kFuel) return f;
    return emission_index(ac, cost.species, f, tas, h) * f;
}

air::Partials k_des_partials(const AircraftModel& ac, const CostSpec& cost, double tas, double h) {
    const double ev = 1e-6 * tas;
    const double eh = 1e-6 * std::max(std::abs(h), 1000.0);
    air::Partials p;
    p.d_dv = (k_des(ac, cost, tas + ev, h) - k_des(ac, cost, tas - ev, h)) / (2.0 * ev);
    p.d_dh = (k_des(ac, cost, tas, h + eh) - k_des(ac, cost, tas, h - eh)) / (2.0 * eh);
    return p;
}

}  // namespace cda::perf
