// Point-mass aircraft performance: drag polar, idle thrust and fuel flow,
// emission indices and the cruise/descent cost coefficients.
#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "cda/airmodel.hpp"

namespace cda::perf {

enum class Species { kNOx = 0, kCO = 1, kHC = 2 };
inline constexpr std::size_t kSpeciesCount = 3;

std::string species_name(Species s);
Species species_from_name(const std::string& name);  // throws ValidationError

/// Speed limits, all in SI (CAS in m/s).
struct Envelope {
    double cas_min = 0.0;
    double cas_max = 0.0;
    double mach_min = 0.0;
    double mach_max = 0.0;
};

/// One point of an emission-index table: reference fuel flow (kg/s) and EI (g/kg).
using EiPoint = std::pair<double, double>;

struct AircraftModel {
    std::string name;
    double mass = 0.0;        // kg
    double wing_area = 0.0;   // m^2
    double cd0 = 0.0;
    double cd2 = 0.0;
    double ct1 = 0.0;         // N
    double ct2 = 1.0;         // m
    double ct3 = 0.0;         // 1/m^2
    double cf3 = 0.0;         // kg/min
    double cf4 = 1.0;         // m
    double cruise_fuel_flow = 0.0;  // kg/s, whole aircraft
    std::array<std::vector<EiPoint>, kSpeciesCount> ei_tables;
    Envelope envelope;

    /// Throws ValidationError naming the first broken invariant.
    void validate() const;
};

/// Lowest and highest true airspeed allowed by the CAS and Mach limits at h.
std::pair<double, double> tas_envelope(const AircraftModel& ac, double h);

double lift_coefficient(const AircraftModel& ac, double tas, double h);
double drag(const AircraftModel& ac, double tas, double h);
double idle_thrust(const AircraftModel& ac, double h);
/// D - T.
double net_drag(const AircraftModel& ac, double tas, double h);
/// Analytic partials of the net drag.
air::Partials net_drag_partials(const AircraftModel& ac, double tas, double h);
/// Idle fuel flow in kg/s, floored at zero.
double fuel_flow_idle(const AircraftModel& ac, double h);

/// BM2-style EI in g/kg for a given actual fuel flow (kg/s) at flight condition.
double emission_index(const AircraftModel& ac, Species s, double fuel_flow, double tas, double h);
/// EI at idle fuel flow.
double emission_index(const AircraftModel& ac, Species s, double tas, double h);

/// Checks D-T > 0 over the envelope between two altitudes; throws ValidationError.
void check_descent_capability(const AircraftModel& ac, double h_lo, double h_hi);

enum class CostKind { kFuel, kEmission };

struct CostSpec {
    CostKind kind = CostKind::kFuel;
    Species species = Species::kNOx;
    double k_cr = 0.0;        // cost per metre of cruise
    double d_max = 0.0;       // m, along-track datum (negative)
    double cruise_ground_speed = 0.0;  // m/s
    std::array<double, kSpeciesCount> ei_cruise{};  // g/kg at the cruise condition

    std::string label() const;
};

/// Cost coefficients for a cruise at (tas, h) flown with ground speed gs.
CostSpec make_cost(const AircraftModel& ac, CostKind kind, Species species, double cruise_tas,
                   double cruise_h, double cruise_ground_speed, double d_max);

/// Descent running cost: kg/s for fuel, g/s for emissions.
double k_des(const AircraftModel& ac, const CostSpec& cost, double tas, double h);
/// Central differences with relative step 1e-6.
air::Partials k_des_partials(const AircraftModel& ac, const CostSpec& cost, double tas, double h);

}  // namespace cda::perf
