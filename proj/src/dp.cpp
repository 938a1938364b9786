#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>
#include <sstream>

#include "cda/error.hpp"
#include "cda/verify.hpp"

namespace cda::verify {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Grid {
    int nh, nv, ng;
    double v0, dv;
    std::vector<double> hs;
    double v(int i) const { return v0 + dv * i; }
};

// Values carried per node: cost-to-go, distance-to-go, time-to-go.
struct Tables {
    std::vector<double> j, d, t;
    std::vector<int> choice;  // -2 unreachable, -1 terminal, 0 level, k+1 descent sample k
    std::vector<double> gamma;
};

struct Ctx {
    const Scenario& sc;
    const dyn::Problem& p;
    Grid g;
    std::vector<unsigned char> feasible;
};

struct Running {
    double vdot, gs, l;
};

Running running(const dyn::Problem& p, double v, double h, double gamma) {
    const env::WindEffect w = env::wind_effect(p.wind, v, h);
    const double gs = w.ground_speed(v);
    const double vdot =
        -perf::net_drag(p.aircraft, v, h) / p.aircraft.mass - (air::kGravity + v * w.whchi) * gamma;
    return {vdot, gs, -p.cost.k_cr * gs + perf::k_des(p.aircraft, p.cost, v, h)};
}

// Level deceleration from node speed va down to vb at altitude h (Simpson in V).
void level_segment(const dyn::Problem& p, double va, double vb, double h, double& dj, double& dd, double& dt) {
    const double vm = 0.5 * (va + vb);
    const Running ra = running(p, va, h, 0.0);
    const Running rm = running(p, vm, h, 0.0);
    const Running rb = running(p, vb, h, 0.0);
    const double w = (va - vb) / 6.0;
    dt = w * (-1.0 / ra.vdot - 4.0 / rm.vdot - 1.0 / rb.vdot);
    dd = w * (-ra.gs / ra.vdot - 4.0 * rm.gs / rm.vdot - rb.gs / rb.vdot);
    dj = w * (-ra.l / ra.vdot - 4.0 * rm.l / rm.vdot - rb.l / rb.vdot);
}

// Descent at fixed gamma from altitude ha down to hb, integrated in h with RK4.
struct Leg {
    double v, j, d, t;
};

Leg descend(const dyn::Problem& p, double v, double ha, double hb, double gamma) {
    constexpr int kSub = 2;
    const double dh = (hb - ha) / kSub;
    auto f = [&](double vv, double h) {
        const Running r = running(p, vv, h, gamma);
        const double hdot = vv * gamma;
        return Leg{r.vdot / hdot, r.l / hdot, r.gs / hdot, 1.0 / hdot};
    };
    Leg y{v, 0.0, 0.0, 0.0};
    double h = ha;
    for (int s = 0; s < kSub; ++s) {
        const Leg k1 = f(y.v, h);
        const Leg k2 = f(y.v + 0.5 * dh * k1.v, h + 0.5 * dh);
        const Leg k3 = f(y.v + 0.5 * dh * k2.v, h + 0.5 * dh);
        const Leg k4 = f(y.v + dh * k3.v, h + dh);
        y.v += dh / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
        y.j += dh / 6.0 * (k1.j + 2 * k2.j + 2 * k3.j + k4.j);
        y.d += dh / 6.0 * (k1.d + 2 * k2.d + 2 * k3.d + k4.d);
        y.t += dh / 6.0 * (k1.t + 2 * k2.t + 2 * k3.t + k4.t);
        h += dh;
    }
    return y;
}

bool interpolate(const Ctx& c, const Tables& tb, int row, double v, double& j, double& d, double& t) {
    const Grid& g = c.g;
    const double pos = (v - g.v0) / g.dv;
    int i0 = static_cast<int>(std::floor(pos));
    double f = pos - i0;
    if (std::abs(f) < 1e-9) f = 0.0;
    if (std::abs(f - 1.0) < 1e-9) {
        ++i0;
        f = 0.0;
    }
    if (i0 < 0 || i0 >= g.nv || (f > 0.0 && i0 + 1 >= g.nv)) return false;
    const std::size_t a = static_cast<std::size_t>(row) * g.nv + i0;
    if (!std::isfinite(tb.j[a])) return false;
    if (f == 0.0) {
        j = tb.j[a];
        d = tb.d[a];
        t = tb.t[a];
        return true;
    }
    if (!std::isfinite(tb.j[a + 1])) return false;
    j = (1.0 - f) * tb.j[a] + f * tb.j[a + 1];
    d = (1.0 - f) * tb.d[a] + f * tb.d[a + 1];
    t = (1.0 - f) * tb.t[a] + f * tb.t[a + 1];
    return true;
}

void descend_node(const Ctx& c, Tables& tb, int r, int i) {
    const Grid& g = c.g;
    const std::size_t idx = static_cast<std::size_t>(r) * g.nv + i;
    if (!c.feasible[idx]) return;
    const double v = g.v(i);
    const dyn::Admissible adm = dyn::admissible_gammas(c.p.limits, v);
    if (adm.interval_empty) return;
    for (int k = 0; k < g.ng; ++k) {
        const double gamma = g.ng == 1 ? adm.lo : adm.lo + (adm.hi - adm.lo) * k / (g.ng - 1);
        const Leg leg = descend(c.p, v, g.hs[r], g.hs[r - 1], gamma);
        double j;
        double d;
        double t;
        if (!interpolate(c, tb, r - 1, leg.v, j, d, t)) continue;
        const double total = leg.j + j;
        if (total < tb.j[idx]) {
            tb.j[idx] = total;
            tb.d[idx] = leg.d + d;
            tb.t[idx] = leg.t + t;
            tb.choice[idx] = k + 1;
            tb.gamma[idx] = gamma;
        }
    }
}

void level_chain(const Ctx& c, Tables& tb, int r) {
    const Grid& g = c.g;
    if (!c.p.limits.level_allowed) return;
    for (int i = 1; i < g.nv; ++i) {
        const std::size_t a = static_cast<std::size_t>(r) * g.nv + i;
        if (!c.feasible[a] || !std::isfinite(tb.j[a - 1])) continue;
        double dj;
        double dd;
        double dt;
        level_segment(c.p, g.v(i), g.v(i - 1), g.hs[r], dj, dd, dt);
        const double total = tb.j[a - 1] + dj;
        if (total < tb.j[a]) {
            tb.j[a] = total;
            tb.d[a] = tb.d[a - 1] + dd;
            tb.t[a] = tb.t[a - 1] + dt;
            tb.choice[a] = 0;
            tb.gamma[a] = 0.0;
        }
    }
}

DpResult solve(const Scenario& sc, const GridSpec& spec, bool parallel) {
    if (spec.n_h < 2 || spec.n_v < 3 || spec.n_gamma < 1) throw ValidationError("DP grid too small");
    sc.validate();
    Ctx c{sc, sc.problem, {}, {}};
    Grid& g = c.g;
    g.nh = spec.n_h;
    g.nv = spec.n_v;
    g.ng = spec.n_gamma;
    g.hs.resize(g.nh);
    double v_lo = kInf;
    double v_hi = -kInf;
    for (int r = 0; r < g.nh; ++r) {
        g.hs[r] = r == g.nh - 1 ? sc.h0 : sc.h_f + (sc.h0 - sc.h_f) * r / (g.nh - 1);
        const auto [lo, hi] = perf::tas_envelope(sc.problem.aircraft, g.hs[r]);
        v_lo = std::min(v_lo, lo);
        v_hi = std::max(v_hi, hi);
    }
    g.dv = (v_hi - v_lo) / (g.nv - 2);
    // shift the speed grid so the final speed is a node
    g.v0 = sc.tas_f - std::ceil((sc.tas_f - v_lo) / g.dv) * g.dv;
    c.feasible.assign(static_cast<std::size_t>(g.nh) * g.nv, 0);
    for (int r = 0; r < g.nh; ++r) {
        for (int i = 0; i < g.nv; ++i) {
            const auto s = dyn::pure_state_constraints(sc.problem.aircraft, g.v(i), g.hs[r]);
            bool ok = g.v(i) > 0.0;
            for (double x : s) ok = ok && x <= 1e-9;
            c.feasible[static_cast<std::size_t>(r) * g.nv + i] = ok;
        }
    }
    const std::size_t n = static_cast<std::size_t>(g.nh) * g.nv;
    Tables tb{std::vector<double>(n, kInf), std::vector<double>(n, kInf), std::vector<double>(n, kInf),
              std::vector<int>(n, -2), std::vector<double>(n, 0.0)};
    const int i_f = static_cast<int>(std::lround((sc.tas_f - g.v0) / g.dv));
    tb.j[i_f] = 0.0;
    tb.d[i_f] = 0.0;
    tb.t[i_f] = 0.0;
    tb.choice[i_f] = -1;
    level_chain(c, tb, 0);
    for (int r = 1; r < g.nh; ++r) {
        std::exception_ptr err;
#pragma omp parallel for schedule(static) if (parallel)
        for (int i = 0; i < g.nv; ++i) {
            try {
                descend_node(c, tb, r, i);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        level_chain(c, tb, r);
    }

    DpResult res;
    res.grid = spec;
    const int top = g.nh - 1;
    double j;
    double d;
    double t;
    if (!interpolate(c, tb, top, sc.tas0, j, d, t)) {
        throw SynthesisError("DP: initial state cannot reach the final node on grid " + spec.str(), {});
    }
    res.cost_to_go = j;
    res.cost = sc.problem.cost.k_cr * (sc.s_f - sc.problem.cost.d_max) + j;
    res.tod = sc.s_f - d;
    res.descent_time = t;
    res.value = tb.j;
    res.distance = tb.d;

    // nearest-node replay
    int r = top;
    int i = static_cast<int>(std::lround((sc.tas0 - g.v0) / g.dv));
    for (int guard = 0; guard < g.nh * g.nv + 1; ++guard) {
        const std::size_t a = static_cast<std::size_t>(r) * g.nv + i;
        if (i < 0 || i >= g.nv || tb.choice[a] < -1) break;
        res.path.push_back(DpPoint{g.hs[r], g.v(i), tb.gamma[a]});
        if (tb.choice[a] == -1) break;
        if (tb.choice[a] == 0) {
            --i;
            continue;
        }
        const Leg leg = descend(c.p, g.v(i), g.hs[r], g.hs[r - 1], tb.gamma[a]);
        --r;
        i = static_cast<int>(std::lround((leg.v - g.v0) / g.dv));
    }
    return res;
}

}  // namespace

GridSpec GridSpec::parse(const std::string& text) {
    static const std::regex re(R"((\d+)x(\d+)x(\d+))");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw ValidationError("grid must look like NHxNVxNG, got '" + text + "'");
    GridSpec g;
    g.n_h = std::stoi(m[1]);
    g.n_v = std::stoi(m[2]);
    g.n_gamma = std::stoi(m[3]);
    if (g.n_h < 2 || g.n_v < 3 || g.n_gamma < 1) throw ValidationError("grid counts too small: " + text);
    return g;
}

std::string GridSpec::str() const {
    return std::to_string(n_h) + "x" + std::to_string(n_v) + "x" + std::to_string(n_gamma);
}

DpResult dp_solve(const Scenario& sc, const GridSpec& grid) { return solve(sc, grid, true); }

DpResult dp_solve_serial(const Scenario& sc, const GridSpec& grid) { return solve(sc, grid, false); }

Comparison compare(const Trajectory& traj, const DpResult& dp) {
    Comparison c;
    c.gen_cost = traj.totals.cost;
    c.dp_cost = dp.cost;
    c.cost_gap = (dp.cost - c.gen_cost) / std::abs(c.gen_cost);
    c.tod_gap = dp.tod - traj.totals.tod;
    // generator speed as a function of altitude on descending samples
    std::vector<std::pair<double, double>> hv;
    for (const auto& a : traj.arcs) {
        for (const auto& s : a.samples) {
            if (hv.empty() || s[dyn::kH] < hv.back().first - 1e-9) hv.emplace_back(s[dyn::kH], s[dyn::kV]);
        }
    }
    if (hv.size() < 2) return c;
    std::reverse(hv.begin(), hv.end());  // ascending altitude
    const double h_lo = hv.front().first;
    const double h_hi = hv.back().first;
    for (const auto& pt : dp.path) {
        if (pt.h <= h_lo || pt.h >= h_hi) continue;
        auto it = std::lower_bound(hv.begin(), hv.end(), pt.h,
                                   [](const std::pair<double, double>& e, double h) { return e.first < h; });
        const auto& b = *it;
        const auto& a = *(it - 1);
        const double v = a.second + (b.second - a.second) * (pt.h - a.first) / (b.first - a.first);
        const double dev = std::abs(air::cas_from_tas(pt.tas, pt.h) - air::cas_from_tas(v, pt.h));
        c.max_cas_dev = std::max(c.max_cas_dev, dev);
    }
    return c;
}

}  // namespace cda::verify
