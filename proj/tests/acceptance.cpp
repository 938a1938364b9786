// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cda/environment.hpp"
#include "cda/io.hpp"
#include "cda/units.hpp"

using namespace cda;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string data(const std::string& rel) { return std::string(CDA_DATA_DIR) + "/" + rel; }

Scenario scenario(const std::string& name, const std::string& aircraft = "") {
    return io::load_scenario(data("scenarios/" + name + ".json"), aircraft);
}

int failures = 0;

void report(int n, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("CRITERION %d %s: %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

void skipped(int n, const std::string& detail) {
    std::printf("CRITERION %d SKIPPED: %s\n", n, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// CAS against altitude over the descending part, sorted by altitude.
std::vector<std::pair<double, double>> cas_profile(const Trajectory& tr) {
    std::vector<std::pair<double, double>> out;
    for (const auto& arc : tr.arcs) {
        for (const auto& y : arc.samples) out.emplace_back(y[dyn::kH], air::cas_from_tas(y[dyn::kV], y[dyn::kH]));
    }
    std::sort(out.begin(), out.end());
    // level segments give repeated altitudes; keep one point per altitude
    std::vector<std::pair<double, double>> uniq;
    for (const auto& p : out) {
        if (uniq.empty() || p.first - uniq.back().first > 1e-3) uniq.push_back(p);
    }
    return uniq;
}

double interp(const std::vector<std::pair<double, double>>& f, double h) {
    auto it = std::lower_bound(f.begin(), f.end(), std::make_pair(h, -1e300));
    if (it == f.begin()) return it->second;
    if (it == f.end()) return f.back().second;
    const auto& a = *(it - 1);
    const auto& b = *it;
    return a.second + (b.second - a.second) * (h - a.first) / (b.first - a.first);
}

double max_cas_deviation(const Trajectory& a, const Trajectory& b) {
    const auto fa = cas_profile(a), fb = cas_profile(b);
    const double lo = std::max(fa.front().first, fb.front().first) + 1.0;
    const double hi = std::min(fa.back().first, fb.back().first) - 1.0;
    double worst = 0.0;
    for (double h = lo; h <= hi; h += 10.0) worst = std::max(worst, std::abs(interp(fa, h) - interp(fb, h)));
    return worst;
}

bool has_boundary(const Trajectory& tr) {
    for (auto k : tr.structure()) {
        if (k == ArcKind::kBoundary) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------

void criterion1() {
    const std::vector<std::string> names = {"fuel_calm", "fuel_tail30", "fuel_head30", "fuel_cross",
                                            "nox_calm", "nox_tail30", "nox_head30", "nox_cross",
                                            "syn764_fuel_tail30", "syn764_fuel_tail30_cross100",
                                            "syn764_nox_tail30", "syn764_nox_tail30_cross100"};
    bool ok = true;
    std::ostringstream os;
    double slowest = 0.0;
    for (const auto& n : names) {
        const auto t0 = Clock::now();
        try {
            const Scenario sc = scenario(n);
            const Trajectory tr = opt::generate_trajectory(sc);
            const auto rep = opt::check_optimality(tr, sc);
            const double dt = seconds_since(t0);
            slowest = std::max(slowest, dt);
            if (!rep.pass() || dt >= 10.0) {
                ok = false;
                os << n << " failed";
                for (const auto& it : rep.items) {
                    if (!it.pass) os << " [" << it.name << " " << it.worst << "]";
                }
                os << "; ";
            }
        } catch (const std::exception& e) {
            ok = false;
            os << n << " threw: " << e.what() << "; ";
        }
    }
    report(1, ok, std::to_string(names.size()) + " scenarios checked, slowest " + fmt("%.3f", slowest) + " s" +
                      (os.str().empty() ? "" : "; " + os.str()));
}

void criterion2() {
    const std::vector<std::string> names = {"fuel_calm", "nox_calm", "fuel_tail30", "nox_head30", "fuel_cross",
                                            "syn764_nox_tail30_cross100"};
    const std::vector<verify::GridSpec> grids = {{100, 50, 6}, {200, 100, 11}, {400, 200, 21}};
    bool ok = true;
    std::ostringstream os;
    for (const auto& n : names) {
        try {
            const Scenario sc = scenario(n);
            const Trajectory tr = opt::generate_trajectory(sc);
            std::vector<double> gaps;
            double slowest = 0.0;
            for (const auto& g : grids) {
                const auto t0 = Clock::now();
                const auto dp = verify::dp_solve(sc, g);
                slowest = std::max(slowest, seconds_since(t0));
                gaps.push_back(verify::compare(tr, dp).cost_gap);
            }
            bool shrinking = true;
            for (std::size_t i = 1; i < gaps.size(); ++i) shrinking = shrinking && std::abs(gaps[i]) < std::abs(gaps[i - 1]);
            const bool pass = shrinking && std::abs(gaps.back()) <= 0.02 && slowest < 300.0;
            ok = ok && pass;
            os << n << " gaps";
            for (double g : gaps) os << ' ' << fmt("%+.2e", g);
            os << " (" << fmt("%.1f", slowest) << " s)" << (pass ? "" : " FAILED") << "; ";
        } catch (const std::exception& e) {
            ok = false;
            os << n << " threw: " << e.what() << "; ";
        }
    }
    report(2, ok, os.str());
}

struct SweepRow {
    double tod = 0.0;
    double ta = 0.0;
    double cas_singular = 0.0;  // mean over fixed altitudes
};

SweepRow sweep_point(const std::string& base, double wind) {
    Scenario sc = scenario(base);
    sc.problem.wind = env::WindProfile::constant(wind);
    io::refresh_cost(sc);
    const Trajectory tr = opt::generate_trajectory(sc);
    if (!opt::check_optimality(tr, sc).pass()) throw std::runtime_error("checker failed at wind " + fmt("%g", wind));
    SweepRow r{std::abs(tr.totals.tod), tr.totals.arrival_time, 0.0};
    int n = 0;
    for (double h : {5000.0, 7000.0, 9000.0}) {
        double tas = 0.0;
        int bound = -1;
        if (!opt::singular_speed(sc.problem, h, tas, bound)) throw std::runtime_error("no singular speed at " + fmt("%g", h));
        r.cas_singular += air::cas_from_tas(tas, h);
        ++n;
    }
    r.cas_singular /= n;
    return r;
}

void criterion3() {
    const std::vector<double> winds = {-30.0, -10.0, 0.0, 10.0, 30.0};
    bool ok = true;
    std::ostringstream os;
    try {
        std::vector<SweepRow> fuel, nox;
        for (double w : winds) {
            fuel.push_back(sweep_point("fuel_calm", w));
            nox.push_back(sweep_point("nox_calm", w));
        }
        for (const auto* rows : {&fuel, &nox}) {
            for (std::size_t i = 1; i < winds.size(); ++i) {
                const auto& a = (*rows)[i - 1];
                const auto& b = (*rows)[i];
                ok = ok && b.tod > a.tod && b.ta < a.ta && b.cas_singular < a.cas_singular;
            }
        }
        for (std::size_t i = 0; i < winds.size(); ++i) ok = ok && nox[i].tod > fuel[i].tod && nox[i].ta > fuel[i].ta;
        for (std::size_t i = 0; i < winds.size(); ++i) {
            os << fmt("w=%+.0f", winds[i]) << " fuel TOD " << fmt("%.2f", units::m_to_nm(fuel[i].tod)) << " NM TA "
               << fmt("%.1f", fuel[i].ta) << " CAS " << fmt("%.1f", units::ms_to_kt(fuel[i].cas_singular))
               << " kt / NOx TOD " << fmt("%.2f", units::m_to_nm(nox[i].tod)) << " TA " << fmt("%.1f", nox[i].ta)
               << "; ";
        }
    } catch (const std::exception& e) {
        ok = false;
        os << "threw: " << e.what();
    }
    report(3, ok, os.str());
}

void criterion4() {
    bool ok = true;
    std::ostringstream os;
    try {
        const Scenario a = scenario("syn764_nox_tail30");
        const Scenario b = scenario("syn764_nox_tail30_cross100");
        const Trajectory ta = opt::generate_trajectory(a);
        const Trajectory tb = opt::generate_trajectory(b);
        const bool checked = opt::check_optimality(ta, a).pass() && opt::check_optimality(tb, b).pass();
        const double dev = units::ms_to_kt(max_cas_deviation(ta, tb));
        const bool structural = !has_boundary(ta) && has_boundary(tb);
        ok = checked && dev > 2.0 && structural;
        os << "max CAS deviation " << fmt("%.2f", dev) << " kt; " << ta.structure_label() << " vs "
           << tb.structure_label() << "; checker " << (checked ? "passes" : "fails") << " on both";

        // the smaller aircraft with a 60 m/s wind from 60 deg off track, for information
        Scenario c = scenario("fuel_tail30");
        Scenario d = c;
        d.problem.wind = env::WindProfile::constant(30.0, 51.96);
        io::refresh_cost(d);
        const double dev_small =
            units::ms_to_kt(max_cas_deviation(opt::generate_trajectory(c), opt::generate_trajectory(d)));
        os << "; syn735 fuel with 51.96 m/s cross wind: deviation " << fmt("%.2f", dev_small) << " kt";
    } catch (const std::exception& e) {
        ok = false;
        os << "threw: " << e.what();
    }
    report(4, ok, os.str());
}

void criterion5() {
    struct Row {
        const char* env;
        double tod_nm, ta, fuel;
    };
    const Row rows[] = {{"CDA_BADA_B735", -108.369, 1038.248, 311.588}, {"CDA_BADA_B764", -116.167, 1020.959, 528.991}};
    bool any = false, ok = true;
    std::ostringstream os;
    for (const auto& r : rows) {
        const char* path = std::getenv(r.env);
        if (!path || !*path) continue;
        any = true;
        try {
            const Scenario sc = scenario("fuel_calm", path);
            const Trajectory tr = opt::generate_trajectory(sc);
            const double tod = units::m_to_nm(tr.totals.tod);
            auto rel = [](double x, double ref) { return std::abs(x / ref - 1.0); };
            const bool pass = rel(tod, r.tod_nm) <= 0.01 && rel(tr.totals.arrival_time, r.ta) <= 0.01 &&
                              rel(tr.totals.fuel, r.fuel) <= 0.01;
            ok = ok && pass;
            os << r.env << ": TOD " << fmt("%.3f", tod) << " NM, TA " << fmt("%.3f", tr.totals.arrival_time)
               << " s, fuel " << fmt("%.3f", tr.totals.fuel) << " kg" << (pass ? "" : " (outside 1%)") << "; ";
        } catch (const std::exception& e) {
            ok = false;
            os << r.env << " threw: " << e.what() << "; ";
        }
    }
    if (!any) {
        skipped(5, "licensed coefficients not supplied (set CDA_BADA_B735 / CDA_BADA_B764 to aircraft JSON files)");
        return;
    }
    report(5, ok, os.str());
}

// Richardson-extrapolated central difference.
double richardson(const std::function<double(double)>& f, double x, double e) {
    const double d1 = (f(x + e) - f(x - e)) / (2 * e);
    const double d2 = (f(x + 0.5 * e) - f(x - 0.5 * e)) / e;
    return (4 * d2 - d1) / 3.0;
}

dyn::Aug run_to(const dyn::Problem& p, const dyn::Aug& y0, double gamma, double t_end, double step) {
    dyn::IntegrateOptions opt;
    opt.step = step;
    const dyn::Event stop{"time", [t_end](const dyn::Aug& y) { return y[dyn::kT] - t_end; }, true, 1};
    return dyn::integrate(p, y0, [gamma](double, double) { return gamma; }, {stop}, dyn::Direction::kForward, opt)
        .samples.back();
}

void criterion6() {
    const env::WindProfile wind({{1000.0, -10.0, 25.0}, {5000.0, 20.0, -15.0}, {9000.0, 35.0, 40.0}, {12000.0, 5.0, 10.0}});
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dv(110.0, 290.0), dh(200.0, 12800.0);
    auto close = [](double analytic, double fd) {
        return std::abs(analytic - fd) <= 1e-6 * std::max(std::abs(fd), 1e-9) + 1e-14;
    };
    int samples = 0, bad = 0;
    double worst = 0.0;
    auto track = [&](double analytic, double fd) {
        const double scale = std::max(std::abs(fd), 1e-9);
        worst = std::max(worst, std::abs(analytic - fd) / scale);
        if (!close(analytic, fd)) ++bad;
    };
    while (samples < 1000) {
        const double v = dv(rng), h = dh(rng);
        // keep the difference stencil clear of the shear kinks and the tropopause
        bool near = std::abs(h - air::kTropopause) < 5.0;
        for (double k : wind.kinks()) near = near || std::abs(h - k) < 5.0;
        if (near) continue;
        const double ev = 1e-3 * v, eh = 1.0;
        const auto e = env::wind_effect(wind, v, h);
        track(e.dc_dv, richardson([&](double x) { return env::wind_effect(wind, x, h).c; }, v, ev));
        track(e.dc_dh, richardson([&](double x) { return env::wind_effect(wind, v, x).c; }, h, eh));
        track(e.dwhchi_dv, richardson([&](double x) { return env::wind_effect(wind, x, h).whchi; }, v, ev));
        track(e.dwhchi_dh, richardson([&](double x) { return env::wind_effect(wind, v, x).whchi; }, h, eh));
        const auto pc = air::cas_partials(v, h);
        track(pc.d_dv, richardson([&](double x) { return air::cas_from_tas(x, h); }, v, ev));
        track(pc.d_dh, richardson([&](double x) { return air::cas_from_tas(v, x); }, h, eh));
        const auto pm = air::mach_partials(v, h);
        track(pm.d_dv, richardson([&](double x) { return air::mach(x, h); }, v, ev));
        if (h < air::kTropopause) track(pm.d_dh, richardson([&](double x) { return air::mach(v, x); }, h, eh));
        ++samples;
    }

    const Scenario sc = scenario("nox_calm");
    const auto y0 = dyn::make_aug({230.0, 10000.0, -2e5, 0.0});
    const auto ref = run_to(sc.problem, y0, -0.05, 160.0, 0.125);
    std::vector<double> errs;
    for (double step : {8.0, 4.0, 2.0}) errs.push_back(std::abs(run_to(sc.problem, y0, -0.05, 160.0, step)[dyn::kV] - ref[dyn::kV]));
    double order = 1e9;
    for (std::size_t i = 1; i < errs.size(); ++i) order = std::min(order, std::log2(errs[i - 1] / errs[i]));

    report(6, bad == 0 && order >= 3.9,
           std::to_string(samples) + " random samples, " + std::to_string(bad) + " partials outside 1e-6 (worst " +
               fmt("%.2e", worst) + "); RK4 order " + fmt("%.2f", order));
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    std::printf("total %.1f s, %d failed\n", seconds_since(t0), failures);
    return failures == 0 ? 0 : 1;
}
