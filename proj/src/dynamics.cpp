#include "cda/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cda/error.hpp"

namespace cda::dyn {

void PathLimits::validate() const {
    if (!(gamma_min < gamma_max && gamma_max <= 0.0)) {
        throw ValidationError("path limits need gamma_min < gamma_max <= 0");
    }
    if (!(rod_min > 0.0 && rod_min < rod_max)) throw ValidationError("path limits need 0 < rod_min < rod_max");
}

Rates eom(const Problem& p, const State& s, double gamma) {
    const env::WindEffect w = env::wind_effect(p.wind, s.tas, s.h);
    Rates r;
    r.vdot = -perf::net_drag(p.aircraft, s.tas, s.h) / p.aircraft.mass - air::kGravity * gamma -
             s.tas * gamma * w.whchi;
    r.xdot = w.ground_speed(s.tas);
    r.hdot = s.tas * gamma;
    return r;
}

bool Admissible::contains(double gamma, double tol) const {
    if (level_allowed && std::abs(gamma) <= tol) return true;
    return !interval_empty && gamma >= lo - tol && gamma <= hi + tol;
}

Admissible admissible_gammas(const PathLimits& limits, double tas) {
    Admissible a;
    a.lo = std::max(limits.gamma_min, -limits.rod_max / tas);
    a.hi = std::min(limits.gamma_max, -limits.rod_min / tas);
    a.level_allowed = limits.level_allowed && limits.gamma_max >= 0.0;
    a.interval_empty = !(a.lo <= a.hi);
    if (a.interval_empty && !a.level_allowed) {
        std::ostringstream os;
        os << "no admissible flight-path angle at V_T=" << tas << " m/s";
        throw InfeasibleControlError(os.str());
    }
    return a;
}

double bang_low(const PathLimits& limits, double tas) {
    const Admissible a = admissible_gammas(limits, tas);
    return a.interval_empty ? 0.0 : a.lo;
}

std::string constraint_name(int id) {
    switch (id) {
        case kCasMax: return "cas_max";
        case kCasMin: return "cas_min";
        case kMachMax: return "mach_max";
        case kMachMin: return "mach_min";
        default: return "none";
    }
}

std::array<double, 4> pure_state_constraints(const perf::AircraftModel& ac, double tas, double h) {
    const double cas = air::cas_from_tas(tas, h);
    const double m = air::mach(tas, h);
    const auto& e = ac.envelope;
    return {cas - e.cas_max, e.cas_min - cas, m - e.mach_max, e.mach_min - m};
}

double constraint_value(const perf::AircraftModel& ac, int id, double tas, double h) {
    const auto& e = ac.envelope;
    switch (id) {
        case kCasMax: return air::cas_from_tas(tas, h) - e.cas_max;
        case kCasMin: return e.cas_min - air::cas_from_tas(tas, h);
        case kMachMax: return air::mach(tas, h) - e.mach_max;
        case kMachMin: return e.mach_min - air::mach(tas, h);
        default: throw DomainError("unknown constraint id");
    }
}

air::Partials constraint_partials(const perf::AircraftModel& /*ac*/, int id, double tas, double h) {
    air::Partials p = (id == kCasMax || id == kCasMin) ? air::cas_partials(tas, h) : air::mach_partials(tas, h);
    if (!is_upper_bound(id)) {
        p.d_dv = -p.d_dv;
        p.d_dh = -p.d_dh;
    }
    return p;
}

double constraint_tas(const perf::AircraftModel& ac, int id, double h) {
    const auto& e = ac.envelope;
    switch (id) {
        case kCasMax: return air::tas_from_cas(e.cas_max, h);
        case kCasMin: return air::tas_from_cas(e.cas_min, h);
        case kMachMax: return air::tas_from_mach(e.mach_max, h);
        case kMachMin: return air::tas_from_mach(e.mach_min, h);
        default: throw DomainError("unknown constraint id");
    }
}

Aug make_aug(const State& s) {
    Aug y{};
    y[kV] = s.tas;
    y[kX] = s.x;
    y[kH] = s.h;
    y[kT] = s.t;
    return y;
}

Aug aug_rates(const Problem& p, const Aug& y, double gamma) {
    const double v = y[kV];
    const double h = y[kH];
    const env::WindEffect w = env::wind_effect(p.wind, v, h);
    const double gs = w.ground_speed(v);
    const double f = perf::fuel_flow_idle(p.aircraft, h);
    const double kd = perf::k_des(p.aircraft, p.cost, v, h);
    Aug r{};
    r[kV] = -perf::net_drag(p.aircraft, v, h) / p.aircraft.mass - (air::kGravity + v * w.whchi) * gamma;
    r[kX] = gs;
    r[kH] = v * gamma;
    r[kT] = 1.0;
    r[kCostInt] = kd;
    r[kLagrangeInt] = -p.cost.k_cr * gs + kd;
    r[kFuelInt] = f;
    for (std::size_t s = 0; s < perf::kSpeciesCount; ++s) {
        if (!p.aircraft.ei_tables[s].empty()) {
            r[kEmInt0 + s] = perf::emission_index(p.aircraft, static_cast<perf::Species>(s), f, v, h) * f;
        }
    }
    return r;
}

namespace {

Aug axpy(const Aug& y, double a, const Aug& k) {
    Aug out;
    for (int i = 0; i < kAugDim; ++i) out[i] = y[i] + a * k[i];
    return out;
}

struct Stepper {
    const Problem& p;
    const ControlLaw& law;
    const Projection& project;
    double sign;

    Aug field(const Aug& y) const {
        Aug r = aug_rates(p, y, law(y[kV], y[kH]));
        for (double& v : r) v *= sign;
        return r;
    }

    Aug step(const Aug& y, double dt) const {
        const Aug k1 = field(y);
        const Aug k2 = field(axpy(y, 0.5 * dt, k1));
        const Aug k3 = field(axpy(y, 0.5 * dt, k2));
        const Aug k4 = field(axpy(y, dt, k3));
        Aug out;
        for (int i = 0; i < kAugDim; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (project) project(out);
        return out;
    }
};

bool crossed(double e0, double e1, int direction) {
    if (e0 == 0.0) return false;
    const bool rising = e0 < 0.0 && e1 >= 0.0;
    const bool falling = e0 > 0.0 && e1 <= 0.0;
    if (direction > 0) return rising;
    if (direction < 0) return falling;
    return rising || falling;
}

}  // namespace

IntegrateResult integrate(const Problem& p, const Aug& y0, const ControlLaw& law, const std::vector<Event>& events,
                          Direction dir, const IntegrateOptions& opt, const Projection& project) {
    const Stepper st{p, law, project, dir == Direction::kForward ? 1.0 : -1.0};
    IntegrateResult res;
    Aug y = y0;
    res.samples.push_back(y);
    res.gammas.push_back(law(y[kV], y[kH]));
    std::vector<double> e0(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) e0[i] = events[i].fn(y);

    double elapsed = 0.0;
    while (elapsed < opt.horizon) {
        const double dt = opt.step;
        Aug yn = st.step(y, dt);
        // earliest event inside this step
        int hit = -1;
        double hit_dt = dt;
        Aug hit_y = yn;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const double e1 = events[i].fn(yn);
            if (!crossed(e0[i], e1, events[i].direction)) continue;
            double a = 0.0;
            double b = dt;
            Aug yb = yn;
            while (b - a > 1e-3 * opt.event_tol) {
                const double mid = 0.5 * (a + b);
                const Aug ym = st.step(y, mid);
                if (crossed(e0[i], events[i].fn(ym), events[i].direction)) {
                    b = mid;
                    yb = ym;
                } else {
                    a = mid;
                }
            }
            if (b < hit_dt || hit < 0) {
                hit = static_cast<int>(i);
                hit_dt = b;
                hit_y = yb;
            }
        }
        if (hit >= 0 && events[hit].terminal) {
            // A step whose stages straddle a wind breakpoint is discontinuous
            // in its length, so bisection can stop across the jump. One
            // linearised move along the local field puts the state back on
            // the event surface.
            const Aug f = st.field(hit_y);
            const double e = events[hit].fn(hit_y);
            const double eps = 1e-6;
            const double slope = (events[hit].fn(axpy(hit_y, eps, f)) - e) / eps;
            if (e != 0.0 && slope != 0.0 && std::abs(e / slope) < hit_dt) {
                const double d = -e / slope;
                hit_y = axpy(hit_y, d, f);
                if (project) project(hit_y);
                hit_dt += d;
            }
        }
        if (hit >= 0) {
            y = hit_y;
            elapsed += hit_dt;
            res.samples.push_back(y);
            res.gammas.push_back(law(y[kV], y[kH]));
            if (events[hit].terminal) {
                res.event = hit;
                return res;
            }
        } else {
            y = yn;
            elapsed += dt;
            res.samples.push_back(y);
            res.gammas.push_back(law(y[kV], y[kH]));
        }
        for (std::size_t i = 0; i < events.size(); ++i) e0[i] = events[i].fn(y);
    }
    std::ostringstream os;
    os << "no stopping event within " << opt.horizon << " s (events:";
    for (const auto& e : events) {
        if (e.terminal) os << ' ' << e.name;
    }
    os << ')';
    throw NoJunctionError(os.str());
}

std::vector<Event> wind_kink_events(const env::WindProfile& wind) {
    std::vector<Event> out;
    for (double hk : wind.kinks()) {
        out.push_back(Event{"wind breakpoint", [hk](const Aug& y) { return y[kH] - hk; }, false, 0});
    }
    return out;
}

}  // namespace cda::dyn
