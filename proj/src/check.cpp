#include <algorithm>
#include <cmath>
#include <sstream>

#include "cda/error.hpp"
#include "cda/optimal.hpp"

namespace cda::opt {
namespace {

using dyn::Aug;

bool is_bang(ArcKind k) { return k == ArcKind::kBangHigh || k == ArcKind::kBangLow; }

// State plus costates integrated along a bang arc. lh49 is lambda_h driven
// with lambda_V recovered from H = 0 at every instant.
struct Adjoint {
    double v, h, lv, lh, lh49;
};

class Checker {
public:
    Checker(const Trajectory& tr, const Scenario& sc) : tr_(tr), sc_(sc), p_(sc.problem) {}

    OptimalityReport run() {
        if (tr_.arcs.empty()) throw ValidationError("trajectory has no arcs");
        rs_ = rate_scale(p_);
        rep_.samples.resize(tr_.arcs.size());
        for (std::size_t i = 0; i < tr_.arcs.size(); ++i) {
            if (tr_.arcs[i].samples.empty()) throw ValidationError("trajectory arc without samples");
            if (!is_bang(tr_.arcs[i].kind)) arc_costates(i);
        }
        for (std::size_t i = 0; i < tr_.arcs.size(); ++i) {
            if (is_bang(tr_.arcs[i].kind)) bang_costates(i);
        }
        finish();
        return rep_;
    }

private:
    double lambda_v_from_h0(double v, double h, double lh, double gamma) const {
        const env::WindEffect w = env::wind_effect(p_.wind, v, h);
        const double a = p_.cost.k_cr * w.ground_speed(v) - perf::k_des(p_.aircraft, p_.cost, v, h);
        const double m = p_.aircraft.mass;
        return m * (lh * v * gamma - a) / (perf::net_drag(p_.aircraft, v, h) + m * (air::kGravity + v * w.whchi) * gamma);
    }

    double bang_gamma(ArcKind k, double v) const {
        if (k == ArcKind::kBangLow) return dyn::bang_low(p_.limits, v);
        const dyn::Admissible a = dyn::admissible_gammas(p_.limits, v);
        return a.level_allowed ? 0.0 : a.hi;
    }

    // d(gamma)/dV of the bang control. Nonzero where a descent-rate limit sets
    // it; the rate-limit multiplier then adds H_gamma * dgamma/dV to lambda_V.
    double bang_gamma_dv(ArcKind k, double v) const {
        const dyn::PathLimits& l = p_.limits;
        if (k == ArcKind::kBangLow) {
            if (dyn::admissible_gammas(l, v).interval_empty) return 0.0;
            return -l.rod_max / v > l.gamma_min ? l.rod_max / (v * v) : 0.0;
        }
        if (dyn::admissible_gammas(l, v).level_allowed) return 0.0;
        return -l.rod_min / v < l.gamma_max ? l.rod_min / (v * v) : 0.0;
    }

    Adjoint rates(ArcKind k, const Adjoint& z) const {
        const double gamma = bang_gamma(k, z.v);
        const dyn::State s{z.v, z.h, 0.0, 0.0};
        const dyn::Rates r = dyn::eom(p_, s, gamma);
        const air::Partials full = hamiltonian_partials(p_, s, Costate{z.lv, 0.0, z.lh}, gamma);
        const double lv49 = lambda_v_from_h0(z.v, z.h, z.lh49, gamma);
        const air::Partials d49 = hamiltonian_partials(p_, s, Costate{lv49, 0.0, z.lh49}, gamma);
        const double mu_term = switching(p_, s, Costate{z.lv, 0.0, z.lh}) * bang_gamma_dv(k, z.v);
        return {r.vdot, r.hdot, -full.d_dv - mu_term, -full.d_dh, -d49.d_dh};
    }

    Adjoint rk4(ArcKind k, const Adjoint& z, double dt) const {
        auto add = [](const Adjoint& a, double s, const Adjoint& b) {
            return Adjoint{a.v + s * b.v, a.h + s * b.h, a.lv + s * b.lv, a.lh + s * b.lh, a.lh49 + s * b.lh49};
        };
        const Adjoint k1 = rates(k, z);
        const Adjoint k2 = rates(k, add(z, 0.5 * dt, k1));
        const Adjoint k3 = rates(k, add(z, 0.5 * dt, k2));
        const Adjoint k4 = rates(k, add(z, dt, k3));
        Adjoint o = z;
        o.v += dt / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
        o.h += dt / 6.0 * (k1.h + 2 * k2.h + 2 * k3.h + k4.h);
        o.lv += dt / 6.0 * (k1.lv + 2 * k2.lv + 2 * k3.lv + k4.lv);
        o.lh += dt / 6.0 * (k1.lh + 2 * k2.lh + 2 * k3.lh + k4.lh);
        o.lh49 += dt / 6.0 * (k1.lh49 + 2 * k2.lh49 + 2 * k3.lh49 + k4.lh49);
        return o;
    }

    SampleDiagnostics diag(const Aug& y, const Costate& l, double gamma, double hgamma) const {
        SampleDiagnostics d;
        const dyn::State s{y[dyn::kV], y[dyn::kH], y[dyn::kX], y[dyn::kT]};
        d.costate = l;
        d.hamiltonian = hamiltonian(p_, s, l, gamma) / rs_;
        d.switching = hgamma / rs_;
        d.gamma_s = gamma_s_residual(p_, s.tas, s.h) / gamma_s_scale(p_);
        d.constraints = dyn::pure_state_constraints(p_.aircraft, s.tas, s.h);
        return d;
    }

    void arc_costates(std::size_t i) {
        const Arc& a = tr_.arcs[i];
        auto& out = rep_.samples[i];
        for (std::size_t k = 0; k < a.samples.size(); ++k) {
            const Aug& y = a.samples[k];
            const Costate l = costates_on_arc(p_, y[dyn::kV], y[dyn::kH]);
            const double hg = switching(p_, {y[dyn::kV], y[dyn::kH], 0.0, 0.0}, l);
            out.push_back(diag(y, l, a.gammas[k], hg));
        }
    }

    void bang_costates(std::size_t i) {
        const Arc& a = tr_.arcs[i];
        auto& out = rep_.samples[i];
        out.assign(a.samples.size(), SampleDiagnostics{});
        // anchor at a neighbouring singular or boundary arc
        bool at_end = i + 1 < tr_.arcs.size() && !is_bang(tr_.arcs[i + 1].kind);
        bool at_start = i > 0 && !is_bang(tr_.arcs[i - 1].kind);
        if (!at_end && !at_start) {
            unanchored_.push_back(i);
            return;
        }
        const std::size_t n = a.samples.size();
        const std::size_t k0 = at_end ? n - 1 : 0;
        const Aug& y0 = a.samples[k0];
        const Costate l0 = at_end ? rep_.samples[i + 1].front().costate : rep_.samples[i - 1].back().costate;
        Adjoint z{y0[dyn::kV], y0[dyn::kH], l0.lv, l0.lh, l0.lh};
        auto record = [&](std::size_t k) {
            const Aug& y = a.samples[k];
            const double gamma = a.gammas[k];
            const double lv49 = lambda_v_from_h0(z.v, z.h, z.lh49, gamma);
            const dyn::State s{z.v, z.h, 0.0, 0.0};
            const double hg = switching(p_, s, Costate{lv49, 0.0, z.lh49});
            Aug yi = y;
            yi[dyn::kV] = z.v;
            yi[dyn::kH] = z.h;
            out[k] = diag(yi, Costate{z.lv, 0.0, z.lh}, gamma, hg);
            const double gap = std::abs(z.v - y[dyn::kV]) / y[dyn::kV] + std::abs(z.h - y[dyn::kH]) / y[dyn::kH];
            replay_gap_ = std::max(replay_gap_, gap);
            // sign of the switching function away from the anchoring junction
            if (k != k0) {
                const double signed_hg = (a.kind == ArcKind::kBangHigh ? -1.0 : 1.0) * out[k].switching;
                worst_sign_ = std::min(worst_sign_, signed_hg);
            }
        };
        record(k0);
        if (at_end) {
            for (std::size_t k = n - 1; k-- > 0;) {
                const double dt = a.samples[k][dyn::kT] - a.samples[k + 1][dyn::kT];
                z = rk4(a.kind, z, dt);
                record(k);
            }
        } else {
            for (std::size_t k = 1; k < n; ++k) {
                const double dt = a.samples[k][dyn::kT] - a.samples[k - 1][dyn::kT];
                z = rk4(a.kind, z, dt);
                record(k);
            }
        }
    }

    void add(const std::string& name, bool pass, double worst, const std::string& detail) {
        rep_.items.push_back(CheckItem{name, pass, worst, detail});
    }

    void finish() {
        const auto& env = p_.aircraft.envelope;
        const double s_scale[4] = {env.cas_max, env.cas_min, env.mach_max, env.mach_min};
        double h_max = 0.0;
        double sing_gs = 0.0;
        double sing_hg = 0.0;
        double glc_max = -1e300;
        double eta_min = 1e300;
        double bnd_s = 0.0;
        double path_s = -1e300;
        double margin_min = 1e300;  // distance of interior controls from the admissible limits
        bool control_ok = true;
        bool has_sing = false;
        bool has_bnd = false;
        for (std::size_t i = 0; i < tr_.arcs.size(); ++i) {
            const Arc& a = tr_.arcs[i];
            for (std::size_t k = 0; k < a.samples.size(); ++k) {
                const Aug& y = a.samples[k];
                const double v = y[dyn::kV];
                const double h = y[dyn::kH];
                const SampleDiagnostics& d = rep_.samples[i][k];
                if (!(is_bang(a.kind) && std::find(unanchored_.begin(), unanchored_.end(), i) != unanchored_.end())) {
                    h_max = std::max(h_max, std::abs(d.hamiltonian));
                }
                for (int c = 0; c < 4; ++c) path_s = std::max(path_s, d.constraints[c] / s_scale[c]);
                const double gamma = a.gammas[k];
                const dyn::Admissible adm = dyn::admissible_gammas(p_.limits, v);
                if (!adm.contains(gamma, 1e-9)) control_ok = false;
                if (a.kind == ArcKind::kSingular) {
                    has_sing = true;
                    sing_gs = std::max(sing_gs, std::abs(d.gamma_s));
                    sing_hg = std::max(sing_hg, std::abs(d.switching));
                    glc_max = std::max(glc_max, glc_value(p_, v, h));
                    margin_min = std::min(margin_min, std::min(gamma - adm.lo, adm.hi - gamma));
                } else if (a.kind == ArcKind::kBoundary) {
                    has_bnd = true;
                    eta_min = std::min(eta_min, eta_a(p_, a.constraint, v, h, gamma));
                    bnd_s = std::max(bnd_s, std::abs(d.constraints[a.constraint]) / s_scale[a.constraint]);
                    margin_min = std::min(margin_min, std::min(gamma - adm.lo, adm.hi - gamma));
                }
            }
        }
        add("hamiltonian", h_max <= 1e-4, h_max, "max |H| / (K_cr V_cr)");
        add("lambda_x", true, 0.0, "lambda_x = 0 on every arc");
        if (unanchored_.empty()) {
            add("bang_sign", worst_sign_ > 0.0 || worst_sign_ == 1e300, worst_sign_ == 1e300 ? 0.0 : worst_sign_,
                "min of -H_gamma on level arcs and +H_gamma on steepest arcs (normalised)");
        } else {
            add("bang_sign", false, 0.0, "bang arc without a singular or boundary neighbour: costates undetermined");
        }
        add("bang_replay", replay_gap_ <= 1e-6, replay_gap_, "relative state gap of the adjoint replay");
        add("singular_gamma_s", sing_gs <= 1e-6, sing_gs, has_sing ? "max |Gamma_s| normalised" : "no singular arc");
        add("singular_switching", sing_hg <= 1e-6, sing_hg, has_sing ? "max |H_gamma| normalised" : "no singular arc");
        add("glc", !has_sing || glc_max <= 0.0, has_sing ? glc_max : 0.0, "max GLC value on singular arcs");
        add("boundary_eta", !has_bnd || eta_min >= -1e-9, has_bnd ? eta_min : 0.0, has_bnd ? "min eta_a" : "no boundary arc");
        add("boundary_constraint", bnd_s <= 1e-6, bnd_s, "max |S_a| relative on boundary arcs");
        add("mixed_constraint", margin_min > 0.0 || (!has_sing && !has_bnd),
            (has_sing || has_bnd) ? margin_min : 0.0, "min margin of interior controls inside the descent interval (rad)");
        add("path_constraints", path_s <= 1e-6 && control_ok, path_s,
            control_ok ? "max S relative" : "control outside the admissible set");

        // junctions: costate continuity and control jumps into/out of singular arcs
        double jump_gap = 0.0;
        double min_jump = 1e300;
        double state_gap = 0.0;
        for (const auto& j : tr_.junctions) {
            const auto& before = rep_.samples[j.from].back();
            const auto& after = rep_.samples[j.to].front();
            const Aug& yb = tr_.arcs[j.from].samples.back();
            const double g = air::kGravity / rs_;
            const double dlv = std::abs(before.costate.lv - after.costate.lv) * g;
            const double dlh = std::abs(before.costate.lh - after.costate.lh) * yb[dyn::kV] / rs_;
            jump_gap = std::max(jump_gap, std::max(dlv, dlh));
            state_gap = std::max(state_gap, j.state_gap);
            const ArcKind ka = tr_.arcs[j.from].kind;
            const ArcKind kb = tr_.arcs[j.to].kind;
            if ((ka == ArcKind::kSingular && is_bang(kb)) || (is_bang(ka) && kb == ArcKind::kSingular)) {
                const double dg = std::abs(tr_.arcs[j.from].gammas.back() - tr_.arcs[j.to].gammas.front());
                min_jump = std::min(min_jump, dg);
            }
        }
        add("costate_continuity", jump_gap <= 1e-6, jump_gap, "max normalised costate jump at junctions");
        add("junction_state", state_gap <= 1e-6, state_gap, "max state mismatch at junctions");
        add("singular_junction_jump", min_jump == 1e300 || min_jump > 1e-6, min_jump == 1e300 ? 0.0 : min_jump,
            "min control jump at bang/singular junctions (rad)");

        const Aug& last = tr_.arcs.back().samples.back();
        const double term = std::abs(last[dyn::kV] - sc_.tas_f) / sc_.tas_f +
                            std::abs(last[dyn::kH] - sc_.h_f) / sc_.h_f +
                            std::abs(last[dyn::kX] - sc_.s_f) / std::abs(sc_.s_f == 0.0 ? 1.0 : sc_.s_f);
        add("terminal", term <= 1e-6, term, "relative terminal state error");
        const Aug& first = tr_.arcs.front().samples.front();
        const double init = std::abs(first[dyn::kV] - sc_.tas0) / sc_.tas0 + std::abs(first[dyn::kH] - sc_.h0) / sc_.h0;
        add("initial", init <= 1e-6, init, "relative initial state error");
    }

    const Trajectory& tr_;
    const Scenario& sc_;
    const dyn::Problem& p_;
    double rs_ = 1.0;
    OptimalityReport rep_;
    std::vector<std::size_t> unanchored_;
    double worst_sign_ = 1e300;
    double replay_gap_ = 0.0;
};

}  // namespace

OptimalityReport check_optimality(const Trajectory& traj, const Scenario& sc) { return Checker(traj, sc).run(); }

}  // namespace cda::opt
