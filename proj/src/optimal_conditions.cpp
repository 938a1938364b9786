#include <cmath>
#include <exception>
#include <sstream>

#include "cda/error.hpp"
#include "cda/optimal.hpp"

namespace cda::opt {
namespace {

constexpr double kG = air::kGravity;

// Model quantities at one point, shared by the condition formulas.
struct Terms {
    double v, h;
    double c, c_v, c_h;
    double wh, dwh;
    double whchi, whchi_v, whchi_h;
    double big_g;  // g + V W_h,chi
    double dn, dn_v, dn_h;  // net drag and partials
    double k, k_v, k_h;     // K_des and partials
    double a;      // K_cr (cV + W_h) - K_des
};

Terms terms(const dyn::Problem& p, double v, double h) {
    const env::WindEffect w = env::wind_effect(p.wind, v, h);
    const air::Partials dn = perf::net_drag_partials(p.aircraft, v, h);
    const air::Partials dk = perf::k_des_partials(p.aircraft, p.cost, v, h);
    Terms t;
    t.v = v;
    t.h = h;
    t.c = w.c;
    t.c_v = w.dc_dv;
    t.c_h = w.dc_dh;
    t.wh = w.along;
    t.dwh = w.dalong_dh;
    t.whchi = w.whchi;
    t.whchi_v = w.dwhchi_dv;
    t.whchi_h = w.dwhchi_dh;
    t.big_g = kG + v * w.whchi;
    t.dn = perf::net_drag(p.aircraft, v, h);
    t.dn_v = dn.d_dv;
    t.dn_h = dn.d_dh;
    t.k = perf::k_des(p.aircraft, p.cost, v, h);
    t.k_v = dk.d_dv;
    t.k_h = dk.d_dh;
    t.a = p.cost.k_cr * (w.c * v + w.along) - t.k;
    return t;
}

double fd_step_v(double v) { return 1e-5 * v; }
double fd_step_h(double h) { return 1e-5 * std::max(std::abs(h), 1000.0); }

// Second-order difference in h that keeps its stencil on one side of a wind
// breakpoint. A breakpoint belongs to the segment below it, as in the lookup.
template <class F>
double d_dh_sided(const env::WindProfile& wind, const F& f, double h, double e) {
    bool above = false;  // breakpoint in [h, h + e)
    bool below = false;  // breakpoint in [h - e, h)
    for (double k : wind.kinks()) {
        above = above || (k >= h && k < h + e);
        below = below || (k >= h - e && k < h);
    }
    if (above && !below) return (3.0 * f(h) - 4.0 * f(h - e) + f(h - 2.0 * e)) / (2.0 * e);
    if (below && !above) return (-3.0 * f(h) + 4.0 * f(h + e) - f(h + 2.0 * e)) / (2.0 * e);
    return (f(h + e) - f(h - e)) / (2.0 * e);
}

}  // namespace

double rate_scale(const dyn::Problem& p) { return p.cost.k_cr * p.cost.cruise_ground_speed; }

double gamma_s_scale(const dyn::Problem& p) { return p.cost.k_cr * p.aircraft.mass * kG * kG; }

double hamiltonian(const dyn::Problem& p, const dyn::State& s, const Costate& l, double gamma) {
    const env::WindEffect w = env::wind_effect(p.wind, s.tas, s.h);
    const double gs = w.ground_speed(s.tas);
    const double vdot = -perf::net_drag(p.aircraft, s.tas, s.h) / p.aircraft.mass - (kG + s.tas * w.whchi) * gamma;
    return -p.cost.k_cr * gs + perf::k_des(p.aircraft, p.cost, s.tas, s.h) + l.lv * vdot + l.lx * gs +
           l.lh * s.tas * gamma;
}

double switching(const dyn::Problem& p, const dyn::State& s, const Costate& l) {
    const env::WindEffect w = env::wind_effect(p.wind, s.tas, s.h);
    return -l.lv * (kG + s.tas * w.whchi) + l.lh * s.tas;
}

air::Partials hamiltonian_partials(const dyn::Problem& p, const dyn::State& s, const Costate& l, double gamma) {
    const Terms t = terms(p, s.tas, s.h);
    const double m = p.aircraft.mass;
    const double gs_v = t.c + t.c_v * t.v;
    const double gs_h = t.c_h * t.v + t.dwh;
    const double big_g_v = t.whchi + t.v * t.whchi_v;
    const double big_g_h = t.v * t.whchi_h;
    air::Partials d;
    d.d_dv = -p.cost.k_cr * gs_v + t.k_v + l.lv * (-t.dn_v / m - big_g_v * gamma) + l.lx * gs_v + l.lh * gamma;
    d.d_dh = -p.cost.k_cr * gs_h + t.k_h + l.lv * (-t.dn_h / m - big_g_h * gamma) + l.lx * gs_h;
    return d;
}

Costate costates_on_arc(const dyn::Problem& p, double tas, double h) {
    const env::WindEffect w = env::wind_effect(p.wind, tas, h);
    const double a = p.cost.k_cr * w.ground_speed(tas) - perf::k_des(p.aircraft, p.cost, tas, h);
    Costate l;
    l.lv = -a / perf::net_drag(p.aircraft, tas, h) * p.aircraft.mass;
    l.lh = l.lv * (kG + tas * w.whchi) / tas;
    return l;
}

double gamma_s_residual(const dyn::Problem& p, double tas, double h) {
    const Terms t = terms(p, tas, h);
    const double kcr = p.cost.k_cr;
    return t.a * (t.v * t.dn_h - t.big_g * t.dn_v + t.dn * (t.v * t.whchi_v - kG / t.v)) +
           t.dn * t.big_g * (kcr * (t.c + t.c_v * t.v) - t.k_v) -
           t.dn * t.v * (kcr * (t.c_h * t.v + t.dwh) - t.k_h);
}

air::Partials gamma_s_partials(const dyn::Problem& p, double tas, double h) {
    const double ev = fd_step_v(tas);
    const double eh = fd_step_h(h);
    air::Partials d;
    d.d_dv = (gamma_s_residual(p, tas + ev, h) - gamma_s_residual(p, tas - ev, h)) / (2.0 * ev);
    d.d_dh = d_dh_sided(p.wind, [&](double x) { return gamma_s_residual(p, tas, x); }, h, eh);
    return d;
}

double switching_rate(const dyn::Problem& p, double tas, double h, const Costate& l) {
    const Terms t = terms(p, tas, h);
    const double m = p.aircraft.mass;
    const double kcr = p.cost.k_cr;
    const double big_g_v = t.whchi + t.v * t.whchi_v;
    return -t.big_g * (kcr * (t.c + t.c_v * t.v) - t.k_v + l.lv * t.dn_v / m) + l.lv * big_g_v * t.dn / m +
           t.v * (kcr * (t.c_h * t.v + t.dwh) - t.k_h + l.lv * t.dn_h / m) - l.lh * t.dn / m;
}

double singular_control(const dyn::Problem& p, double tas, double h) {
    const air::Partials d = gamma_s_partials(p, tas, h);
    const env::WindEffect w = env::wind_effect(p.wind, tas, h);
    const double big_g = kG + tas * w.whchi;
    const double den = -d.d_dv * big_g + d.d_dh * tas;
    const double size = std::abs(d.d_dv * big_g) + std::abs(d.d_dh * tas);
    if (!(std::abs(den) > 1e-9 * size) || size == 0.0) {
        std::ostringstream os;
        os << "singular control undefined at V_T=" << tas << " h=" << h << " (arc tangent to the flow)";
        throw NumericError(os.str());
    }
    const double dn = perf::net_drag(p.aircraft, tas, h);
    return -(d.d_dv * (-dn / p.aircraft.mass)) / den;
}

double glc_value(const dyn::Problem& p, double tas, double h) {
    const Costate l = costates_on_arc(p, tas, h);
    const double ev = 1e-4 * tas;
    const double eh = 1e-4 * std::max(std::abs(h), 1000.0);
    const double f_v = (switching_rate(p, tas + ev, h, l) - switching_rate(p, tas - ev, h, l)) / (2.0 * ev);
    const double f_h = d_dh_sided(p.wind, [&](double x) { return switching_rate(p, tas, x, l); }, h, eh);
    const env::WindEffect w = env::wind_effect(p.wind, tas, h);
    return -f_v * (kG + tas * w.whchi) + f_h * tas;
}

bool singular_speed(const dyn::Problem& p, double h, double& tas, int& bound) {
    const auto [lo, hi] = perf::tas_envelope(p.aircraft, h);
    constexpr int kScan = 48;
    double v_prev = lo;
    double g_prev = gamma_s_residual(p, lo, h);
    for (int i = 1; i <= kScan; ++i) {
        const double v = lo + (hi - lo) * i / kScan;
        const double g = gamma_s_residual(p, v, h);
        if (g_prev >= 0.0 && g < 0.0) {
            double a = v_prev;
            double b = v;
            while (b - a > 1e-9) {
                const double mid = 0.5 * (a + b);
                if (gamma_s_residual(p, mid, h) >= 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            tas = 0.5 * (a + b);
            bound = -1;
            return true;
        }
        v_prev = v;
        g_prev = g;
    }
    const auto& e = p.aircraft.envelope;
    if (g_prev >= 0.0) {
        // root above the envelope: the upper limit takes over
        const double v_cas = air::tas_from_cas(e.cas_max, h);
        const double v_mach = air::tas_from_mach(e.mach_max, h);
        bound = v_cas <= v_mach ? dyn::kCasMax : dyn::kMachMax;
        tas = hi;
    } else {
        const double v_cas = air::tas_from_cas(e.cas_min, h);
        const double v_mach = air::tas_from_mach(e.mach_min, h);
        bound = v_cas >= v_mach ? dyn::kCasMin : dyn::kMachMin;
        tas = lo;
    }
    return false;
}

namespace {

SingularSample curve_sample(const dyn::Problem& p, double h) {
    SingularSample s;
    s.h = h;
    s.valid = singular_speed(p, h, s.tas, s.bound);
    if (s.valid) {
        s.gamma = singular_control(p, s.tas, h);
        s.glc = glc_value(p, s.tas, h);
    } else {
        s.gamma = boundary_gamma(p, s.bound, s.tas, h);
    }
    return s;
}

std::vector<double> curve_altitudes(double h_lo, double h_hi, double dh) {
    if (!(h_hi > h_lo) || !(dh > 0.0)) throw DomainError("singular curve needs h_lo < h_hi and dh > 0");
    const int n = static_cast<int>(std::ceil((h_hi - h_lo) / dh)) + 1;
    std::vector<double> hs(n);
    for (int i = 0; i < n; ++i) hs[i] = i == n - 1 ? h_hi : h_lo + dh * i;
    return hs;
}

}  // namespace

SingularArcCurve singular_arc_curve_serial(const dyn::Problem& p, double h_lo, double h_hi, double dh) {
    const auto hs = curve_altitudes(h_lo, h_hi, dh);
    SingularArcCurve c;
    c.samples.reserve(hs.size());
    for (double h : hs) c.samples.push_back(curve_sample(p, h));
    return c;
}

SingularArcCurve singular_arc_curve(const dyn::Problem& p, double h_lo, double h_hi, double dh) {
    const auto hs = curve_altitudes(h_lo, h_hi, dh);
    const int n = static_cast<int>(hs.size());
    SingularArcCurve c;
    c.samples.resize(hs.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < n; ++i) {
        try {
            c.samples[i] = curve_sample(p, hs[i]);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return c;
}

double boundary_gamma(const dyn::Problem& p, int id, double tas, double h) {
    const air::Partials s = dyn::constraint_partials(p.aircraft, id, tas, h);
    const env::WindEffect w = env::wind_effect(p.wind, tas, h);
    const double den = s.d_dv * (kG + tas * w.whchi) - s.d_dh * tas;
    if (den == 0.0) throw NumericError("boundary control undefined: degenerate constraint geometry");
    return -s.d_dv * perf::net_drag(p.aircraft, tas, h) / p.aircraft.mass / den;
}

double eta_a(const dyn::Problem& p, int id, double tas, double h, double gamma) {
    const double dn = perf::net_drag(p.aircraft, tas, h);
    const double gs = gamma_s_residual(p, tas, h) / gamma_s_scale(p);
    const double s_v = dyn::constraint_partials(p.aircraft, id, tas, h).d_dv;
    return -(p.aircraft.mass * gamma / (dn * dn)) * gs / s_v;
}

bool OptimalityReport::pass() const {
    for (const auto& i : items) {
        if (!i.pass) return false;
    }
    return true;
}

const CheckItem* OptimalityReport::find(const std::string& name) const {
    for (const auto& i : items) {
        if (i.name == name) return &i;
    }
    return nullptr;
}

}  // namespace cda::opt
