#include <algorithm>
#include <cmath>
#include <sstream>

#include "cda/error.hpp"
#include "cda/optimal.hpp"
#include "cda/units.hpp"

namespace cda::opt {
namespace {

// |Gamma_s| (normalised) below which a boundary state counts as on the arc;
// the curve roots are bisected well inside this.
constexpr double kOnArc = 1e-9;

using dyn::Aug;

struct Mode {
    ArcKind kind = ArcKind::kSingular;
    int constraint = -1;
};

std::string fmt_state(const Aug& y) {
    std::ostringstream os;
    os.precision(6);
    os << "V_T=" << y[dyn::kV] << " m/s (CAS " << units::ms_to_kt(air::cas_from_tas(y[dyn::kV], y[dyn::kH]))
       << " kt), h=" << y[dyn::kH] << " m";
    return os.str();
}

class Generator {
public:
    Generator(const Scenario& sc, const GenerateOptions& opt) : sc_(sc), p_(sc.problem), opt_(opt) {
        iopt_.step = opt.step;
    }

    Trajectory run() {
        step1();
        const auto [j2, mode2] = step2();
        const auto [j3, mode3] = step3();
        if (!(j3[dyn::kH] < j2[dyn::kH] || (j3[dyn::kH] == j2[dyn::kH] && same_point(j2, j3)))) {
            fail("initial and final bang arcs overlap in altitude (h_J2=" + std::to_string(j2[dyn::kH]) +
                 ", h_J3=" + std::to_string(j3[dyn::kH]) + ")");
        }
        step4(j3, mode3, j2);
        return assemble();
    }

    [[noreturn]] void fail(const std::string& msg) {
        trace_.push_back("failure: " + msg);
        throw SynthesisError(msg, trace_);
    }

    std::vector<std::string>& trace() { return trace_; }

private:
    double gamma_s_n(double v, double h) const { return gamma_s_residual(p_, v, h) / gamma_s_scale(p_); }

    double bang_high(double v) const {
        const dyn::Admissible a = dyn::admissible_gammas(p_.limits, v);
        return a.level_allowed ? 0.0 : a.hi;
    }

    static bool same_point(const Aug& a, const Aug& b) {
        return std::abs(a[dyn::kV] - b[dyn::kV]) < 1e-9 && std::abs(a[dyn::kH] - b[dyn::kH]) < 1e-9;
    }

    // Active constraint at the state, or -1.
    int active_bound(double v, double h) const {
        const auto s = dyn::pure_state_constraints(p_.aircraft, v, h);
        const auto& e = p_.aircraft.envelope;
        const double scale[4] = {e.cas_max, e.cas_min, e.mach_max, e.mach_min};
        for (int i = 0; i < dyn::kConstraintCount; ++i) {
            if (std::abs(s[i]) <= 1e-9 * scale[i]) return i;
        }
        return -1;
    }

    dyn::Event gamma_s_event(int direction) const {
        return dyn::Event{"Gamma_s=0", [this](const Aug& y) { return gamma_s_n(y[dyn::kV], y[dyn::kH]); }, true,
                          direction};
    }

    dyn::Event constraint_event(int id) const {
        return dyn::Event{dyn::constraint_name(id),
                          [this, id](const Aug& y) {
                              return dyn::constraint_value(p_.aircraft, id, y[dyn::kV], y[dyn::kH]);
                          },
                          true, +1};
    }

    dyn::Event altitude_event(const std::string& name, double h, int direction) const {
        return dyn::Event{name, [h](const Aug& y) { return y[dyn::kH] - h; }, true, direction};
    }

    void add_kinks(std::vector<dyn::Event>& ev, bool steepest) const {
        for (auto& k : dyn::wind_kink_events(p_.wind)) ev.push_back(k);
        if (steepest && p_.limits.gamma_min < 0.0) {
            // the steepest angle switches between the gamma and rate-of-descent limits here
            const double v_k = p_.limits.rod_max / -p_.limits.gamma_min;
            ev.push_back(dyn::Event{"steepest-limit switch", [v_k](const Aug& y) { return y[dyn::kV] - v_k; },
                                    false, 0});
        }
    }

    void step1() {
        const SingularArcCurve c = singular_arc_curve(p_, sc_.h_f, sc_.h0, opt_.curve_dh);
        int valid = 0;
        int glc_bad = 0;
        double v_lo = 1e300;
        double v_hi = -1e300;
        for (const auto& s : c.samples) {
            if (!s.valid) continue;
            ++valid;
            if (s.glc > 0.0) ++glc_bad;
            const double cas = units::ms_to_kt(air::cas_from_tas(s.tas, s.h));
            v_lo = std::min(v_lo, cas);
            v_hi = std::max(v_hi, cas);
        }
        std::ostringstream os;
        os << "STEP 1: singular curve " << valid << "/" << c.samples.size() << " samples inside the envelope";
        if (valid > 0) os << ", CAS " << v_lo << ".." << v_hi << " kt, GLC>0 at " << glc_bad;
        trace_.push_back(os.str());
    }

    // Validity of entering a boundary arc on constraint id at (v, h).
    bool boundary_valid(int id, double v, double h) const {
        const double g = gamma_s_n(v, h);
        return dyn::is_upper_bound(id) ? g >= -1e-12 : g <= 1e-12;
    }

    std::pair<Aug, Mode> step2() {
        const Aug y0 = dyn::make_aug({sc_.tas0, sc_.h0, 0.0, 0.0});
        const double g0 = gamma_s_n(sc_.tas0, sc_.h0);
        const int b = active_bound(sc_.tas0, sc_.h0);
        if (b >= 0 && boundary_valid(b, sc_.tas0, sc_.h0)) {
            trace_.push_back("STEP 2: initial state on valid boundary " + dyn::constraint_name(b) +
                             ", zero-length initial arc");
            return {y0, Mode{ArcKind::kBoundary, b}};
        }
        if (std::abs(g0) < kOnArc) {
            trace_.push_back("STEP 2: initial state on the singular arc, zero-length initial arc");
            return {y0, Mode{ArcKind::kSingular, -1}};
        }
        std::vector<dyn::Event> ev;
        dyn::ControlLaw law;
        ArcKind kind;
        if (g0 < 0.0) {
            kind = ArcKind::kBangHigh;
            law = [this](double v, double) { return bang_high(v); };
            ev.push_back(gamma_s_event(+1));
            ev.push_back(constraint_event(dyn::kCasMin));
            ev.push_back(constraint_event(dyn::kMachMin));
        } else {
            kind = ArcKind::kBangLow;
            law = [this](double v, double) { return dyn::bang_low(p_.limits, v); };
            ev.push_back(gamma_s_event(-1));
            ev.push_back(constraint_event(dyn::kCasMax));
            ev.push_back(constraint_event(dyn::kMachMax));
        }
        ev.push_back(altitude_event("final altitude", sc_.h_f, -1));
        add_kinks(ev, kind == ArcKind::kBangLow);
        const auto res = run_integration(y0, law, ev, dyn::Direction::kForward, "STEP 2");
        Arc a{kind, -1, res.samples, res.gammas};
        step2_arc_ = a;
        const Aug& j = res.samples.back();
        const std::string& hit = ev[res.event].name;
        std::ostringstream os;
        os << "STEP 2: " << arc_label(kind, -1) << " arc for " << a.duration() << " s, stopped on " << hit << " at "
           << fmt_state(j);
        trace_.push_back(os.str());
        if (hit == "final altitude") fail("initial bang arc reached the final altitude without meeting the arc");
        if (hit == "Gamma_s=0") return {j, Mode{ArcKind::kSingular, -1}};
        const int id = res.event == 1 ? (kind == ArcKind::kBangHigh ? dyn::kCasMin : dyn::kCasMax)
                                      : (kind == ArcKind::kBangHigh ? dyn::kMachMin : dyn::kMachMax);
        if (!boundary_valid(id, j[dyn::kV], j[dyn::kH])) {
            fail("initial bang arc met " + dyn::constraint_name(id) + " on a branch with negative eta_a");
        }
        return {j, Mode{ArcKind::kBoundary, id}};
    }

    std::pair<Aug, Mode> step3() {
        const Aug yf = dyn::make_aug({sc_.tas_f, sc_.h_f, 0.0, 0.0});
        const double gf = gamma_s_n(sc_.tas_f, sc_.h_f);
        const int b = active_bound(sc_.tas_f, sc_.h_f);
        if (b >= 0 && boundary_valid(b, sc_.tas_f, sc_.h_f)) {
            trace_.push_back("STEP 3: final state on valid boundary " + dyn::constraint_name(b) +
                             ", zero-length final arc");
            return {yf, Mode{ArcKind::kBoundary, b}};
        }
        if (std::abs(gf) < kOnArc) {
            trace_.push_back("STEP 3: final state on the singular arc, zero-length final arc");
            return {yf, Mode{ArcKind::kSingular, -1}};
        }
        std::vector<dyn::Event> ev;
        dyn::ControlLaw law;
        ArcKind kind;
        int first_bound;
        if (gf > 0.0) {
            // slower than the arc: the final arc is a level deceleration
            kind = ArcKind::kBangHigh;
            law = [this](double v, double) { return bang_high(v); };
            ev.push_back(gamma_s_event(-1));
            first_bound = dyn::kCasMax;
            ev.push_back(constraint_event(dyn::kCasMax));
            ev.push_back(constraint_event(dyn::kMachMax));
        } else {
            kind = ArcKind::kBangLow;
            law = [this](double v, double) { return dyn::bang_low(p_.limits, v); };
            ev.push_back(gamma_s_event(+1));
            first_bound = dyn::kCasMin;
            ev.push_back(constraint_event(dyn::kCasMin));
            ev.push_back(constraint_event(dyn::kMachMin));
        }
        ev.push_back(altitude_event("initial altitude", sc_.h0, +1));
        add_kinks(ev, kind == ArcKind::kBangLow);
        const auto res = run_integration(yf, law, ev, dyn::Direction::kBackward, "STEP 3");
        step3_arc_ = Arc{kind, -1, res.samples, res.gammas};
        const Aug& j = res.samples.back();
        const std::string& hit = ev[res.event].name;
        std::ostringstream os;
        os << "STEP 3: " << arc_label(kind, -1) << " arc for " << -step3_arc_.duration() << " s (backward), stopped on "
           << hit << " at " << fmt_state(j);
        trace_.push_back(os.str());
        if (hit == "initial altitude") fail("final bang arc reached the initial altitude without meeting the arc");
        if (hit == "Gamma_s=0") return {j, Mode{ArcKind::kSingular, -1}};
        const int id = res.event == 1 ? first_bound : first_bound + 2;
        if (!boundary_valid(id, j[dyn::kV], j[dyn::kH])) {
            fail("final bang arc met " + dyn::constraint_name(id) + " on a branch with negative eta_a");
        }
        return {j, Mode{ArcKind::kBoundary, id}};
    }

    void project_singular(Aug& y) const {
        const double h = y[dyn::kH];
        for (int it = 0; it < 4; ++it) {
            const double v = y[dyn::kV];
            const double e = 1e-5 * v;
            const double g = gamma_s_residual(p_, v, h);
            const double d = (gamma_s_residual(p_, v + e, h) - gamma_s_residual(p_, v - e, h)) / (2.0 * e);
            if (d == 0.0) return;
            const double dv = g / d;
            y[dyn::kV] = v - dv;
            if (std::abs(dv) < 1e-12 * v) return;
        }
    }

    void step4(const Aug& j3, Mode mode, const Aug& j2) {
        const double h_top = j2[dyn::kH];
        Aug y = j3;
        if (j3[dyn::kH] >= h_top) {
            trace_.push_back("STEP 4: junctions coincide, no manifold arc");
            return;
        }
        for (int leg = 0; leg < 32; ++leg) {
            std::vector<dyn::Event> ev;
            ev.push_back(altitude_event("STEP-2 junction altitude", h_top, +1));
            dyn::ControlLaw law;
            dyn::Projection proj;
            std::vector<Mode> next(1);
            if (mode.kind == ArcKind::kSingular) {
                law = [this](double v, double h) { return singular_control(p_, v, h); };
                proj = [this](Aug& a) { project_singular(a); };
                for (int c = 0; c < dyn::kConstraintCount; ++c) {
                    ev.push_back(constraint_event(c));
                    next.push_back(Mode{ArcKind::kBoundary, c});
                }
            } else {
                const int id = mode.constraint;
                law = [this, id](double v, double h) { return boundary_gamma(p_, id, v, h); };
                proj = [this, id](Aug& a) { a[dyn::kV] = dyn::constraint_tas(p_.aircraft, id, a[dyn::kH]); };
                ev.push_back(gamma_s_event(dyn::is_upper_bound(id) ? -1 : +1));
                next.push_back(Mode{ArcKind::kSingular, -1});
                for (int c = 0; c < dyn::kConstraintCount; ++c) {
                    if (c == id) continue;
                    ev.push_back(constraint_event(c));
                    next.push_back(Mode{ArcKind::kBoundary, c});
                }
            }
            add_kinks(ev, false);
            if (mode.kind == ArcKind::kSingular) project_singular(y);
            auto res = run_integration(y, law, ev, dyn::Direction::kBackward, "STEP 4", proj);
            if (res.event == 0) {
                // land exactly on the junction altitude: a wind breakpoint there
                // makes the arc speed one-sided
                res.samples.back()[dyn::kH] = h_top;
                if (proj) proj(res.samples.back());
                res.gammas.back() = law(res.samples.back()[dyn::kV], h_top);
            }
            manifold_.push_back(Arc{mode.kind, mode.constraint, res.samples, res.gammas});
            y = res.samples.back();
            std::ostringstream os;
            os << "STEP 4: " << arc_label(mode.kind, mode.constraint) << " arc for " << -manifold_.back().duration()
               << " s (backward), stopped on " << ev[res.event].name << " at " << fmt_state(y);
            trace_.push_back(os.str());
            if (res.event == 0) {
                const double gap = std::abs(y[dyn::kV] - j2[dyn::kV]) / j2[dyn::kV];
                if (gap > opt_.junction_tol) {
                    std::ostringstream m;
                    m << "manifold reaches the STEP-2 junction altitude at V_T=" << y[dyn::kV]
                      << " m/s, junction has " << j2[dyn::kV] << " m/s (relative gap " << gap << ")";
                    fail(m.str());
                }
                return;
            }
            const Mode nm = next[res.event];
            if (nm.kind == ArcKind::kBoundary && !boundary_valid(nm.constraint, y[dyn::kV], y[dyn::kH])) {
                fail("manifold met " + dyn::constraint_name(nm.constraint) + " where the boundary arc is invalid");
            }
            mode = nm;
        }
        fail("too many arc switches along the manifold");
    }

    dyn::IntegrateResult run_integration(const Aug& y0, const dyn::ControlLaw& law,
                                         const std::vector<dyn::Event>& ev, dyn::Direction dir,
                                         const std::string& step, const dyn::Projection& proj = {}) {
        try {
            return dyn::integrate(p_, y0, law, ev, dir, iopt_, proj);
        } catch (const Error& e) {
            fail(step + ": " + e.what());
        }
    }

    static Arc reversed(const Arc& a) {
        Arc r = a;
        std::reverse(r.samples.begin(), r.samples.end());
        std::reverse(r.gammas.begin(), r.gammas.end());
        return r;
    }

    Trajectory assemble() {
        std::vector<Arc> arcs;
        if (step2_arc_.samples.size() > 1) arcs.push_back(step2_arc_);
        for (auto it = manifold_.rbegin(); it != manifold_.rend(); ++it) {
            if (it->samples.size() > 1) arcs.push_back(reversed(*it));
        }
        if (step3_arc_.samples.size() > 1) arcs.push_back(reversed(step3_arc_));
        if (arcs.empty()) fail("trajectory has no arcs");

        Trajectory tr;
        static constexpr int kShift[] = {dyn::kX,       dyn::kT,      dyn::kCostInt, dyn::kLagrangeInt,
                                         dyn::kFuelInt, dyn::kEmInt0, dyn::kEmInt0 + 1, dyn::kEmInt0 + 2};
        for (std::size_t k = 0; k < arcs.size(); ++k) {
            if (k == 0) continue;
            const Aug& prev = arcs[k - 1].samples.back();
            const Aug front = arcs[k].samples.front();
            for (int i : kShift) {
                const double off = prev[i] - front[i];
                for (auto& s : arcs[k].samples) s[i] += off;
            }
        }
        const Aug first = arcs.front().samples.front();
        const double x_shift = sc_.s_f - arcs.back().samples.back()[dyn::kX];
        for (auto& a : arcs) {
            for (auto& s : a.samples) {
                s[dyn::kX] += x_shift;
                for (int i : kShift) {
                    if (i != dyn::kX) s[i] -= first[i];
                }
            }
        }
        for (std::size_t k = 1; k < arcs.size(); ++k) {
            Junction j;
            j.from = k - 1;
            j.to = k;
            const Aug& a = arcs[k - 1].samples.back();
            const Aug& b = arcs[k].samples.front();
            j.t = b[dyn::kT];
            j.tas = b[dyn::kV];
            j.h = b[dyn::kH];
            j.x = b[dyn::kX];
            j.state_gap = std::abs(a[dyn::kV] - b[dyn::kV]) + std::abs(a[dyn::kH] - b[dyn::kH]);
            tr.junctions.push_back(j);
        }
        tr.arcs = std::move(arcs);
        try {
            compute_totals(tr, sc_);
        } catch (const Error& e) {
            fail(std::string("totals: ") + e.what());
        }
        std::ostringstream os;
        os.precision(8);
        os << "assembled " << tr.structure_label() << "; TOD " << units::m_to_nm(tr.totals.tod) << " NM, TA "
           << tr.totals.arrival_time << " s";
        trace_.push_back(os.str());
        tr.trace = trace_;
        return tr;
    }

    const Scenario& sc_;
    const dyn::Problem& p_;
    GenerateOptions opt_;
    dyn::IntegrateOptions iopt_;
    std::vector<std::string> trace_;
    Arc step2_arc_;
    Arc step3_arc_;
    std::vector<Arc> manifold_;  // backward order, from the STEP-3 junction upward
};

}  // namespace

Trajectory generate_trajectory(const Scenario& sc, const GenerateOptions& opt) {
    sc.validate();
    Generator g(sc, opt);
    try {
        return g.run();
    } catch (const SynthesisError&) {
        throw;
    } catch (const Error& e) {
        g.trace().push_back(std::string("failure: ") + e.what());
        throw SynthesisError(e.what(), g.trace());
    }
}

}  // namespace cda::opt
