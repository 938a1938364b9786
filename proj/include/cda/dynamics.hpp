// Vertical-plane point-mass dynamics, admissible flight-path angles, speed
// envelope constraints and an RK4 integrator with event localisation.
#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cda/environment.hpp"
#include "cda/performance.hpp"

namespace cda::dyn {

struct State {
    double tas = 0.0;  // m/s
    double h = 0.0;    // m
    double x = 0.0;    // m, along-track position (negative before the threshold)
    double t = 0.0;    // s
};

struct PathLimits {
    double gamma_min = 0.0;  // rad
    double gamma_max = 0.0;  // rad
    double rod_min = 0.0;    // m/s
    double rod_max = 0.0;    // m/s
    bool level_allowed = true;

    void validate() const;
};

/// Everything the necessary conditions depend on.
struct Problem {
    perf::AircraftModel aircraft;
    env::WindProfile wind;
    perf::CostSpec cost;
    PathLimits limits;
};

struct Rates {
    double vdot = 0.0;
    double xdot = 0.0;
    double hdot = 0.0;
};

Rates eom(const Problem& p, const State& s, double gamma);

struct Admissible {
    double lo = 0.0;  // steepest descent
    double hi = 0.0;  // shallowest descent
    bool level_allowed = true;
    bool interval_empty = false;

    bool contains(double gamma, double tol = 1e-12) const;
};

/// {0} (if level flight is allowed) united with the descending interval.
/// Throws InfeasibleControlError if both are empty.
Admissible admissible_gammas(const PathLimits& limits, double tas);

/// Steepest admissible descent angle.
double bang_low(const PathLimits& limits, double tas);

enum ConstraintId { kCasMax = 0, kCasMin = 1, kMachMax = 2, kMachMin = 3 };
inline constexpr int kConstraintCount = 4;
std::string constraint_name(int id);

/// S = [V_CAS - V_CAS,max, V_CAS,min - V_CAS, M - M_max, M_min - M]; <= 0 is feasible.
std::array<double, 4> pure_state_constraints(const perf::AircraftModel& ac, double tas, double h);
double constraint_value(const perf::AircraftModel& ac, int id, double tas, double h);
air::Partials constraint_partials(const perf::AircraftModel& ac, int id, double tas, double h);
/// True airspeed at which constraint `id` is active at altitude h.
double constraint_tas(const perf::AircraftModel& ac, int id, double h);
inline bool is_upper_bound(int id) { return id == kCasMax || id == kMachMax; }

// Augmented integration state: dynamics plus running integrals.
enum AugIndex {
    kV = 0,
    kX,
    kH,
    kT,
    kCostInt,      // integral of K_des
    kLagrangeInt,  // integral of -K_cr (cV + W_h) + K_des
    kFuelInt,      // kg
    kEmInt0,       // g, one slot per species
    kAugDim = kEmInt0 + static_cast<int>(perf::kSpeciesCount)
};
using Aug = std::array<double, kAugDim>;

Aug make_aug(const State& s);
Aug aug_rates(const Problem& p, const Aug& y, double gamma);

using ControlLaw = std::function<double(double tas, double h)>;
using Projection = std::function<void(Aug&)>;

struct Event {
    std::string name;
    std::function<double(const Aug&)> fn;
    bool terminal = true;
    int direction = 0;  // +1 rising only, -1 falling only, 0 either
};

enum class Direction { kForward, kBackward };

struct IntegrateOptions {
    double step = 0.5;      // s
    double horizon = 20000.0;  // s of integration time
    double event_tol = 1e-6;   // s
};

struct IntegrateResult {
    std::vector<Aug> samples;
    std::vector<double> gammas;
    int event = -1;  // index of the terminal event that stopped the run
};

/// Fixed-step RK4. Backward runs integrate the negated field, so t and the
/// running integrals decrease. Events are zero crossings of fn between steps,
/// localised by bisection; non-terminal events only split the step (used at
/// wind breakpoints). Throws NoJunctionError if the horizon runs out.
IntegrateResult integrate(const Problem& p, const Aug& y0, const ControlLaw& law, const std::vector<Event>& events,
                          Direction dir, const IntegrateOptions& opt = {}, const Projection& project = {});

/// Non-terminal events at the wind profile breakpoints.
std::vector<Event> wind_kink_events(const env::WindProfile& wind);

}  // namespace cda::dyn
