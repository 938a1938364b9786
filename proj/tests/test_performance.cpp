#include <doctest.h>

#include <cmath>

#include "cda/error.hpp"
#include "cda/performance.hpp"
#include "support.hpp"

using namespace cda;

TEST_CASE("lift coefficient example") {
    perf::AircraftModel ac = test::syn735();
    ac.mass = 60000.0;
    ac.wing_area = 105.0;
    const double rho = air::atmos_at(0.0).density;
    const double expect = 2.0 * 60000.0 * 9.80665 / (rho * 200.0 * 200.0 * 105.0);
    CHECK(perf::lift_coefficient(ac, 200.0, 0.0) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(expect == doctest::Approx(0.2287).epsilon(1e-3));
    CHECK(perf::lift_coefficient(ac, 400.0, 0.0) == doctest::Approx(expect / 4.0).epsilon(1e-14));
}

TEST_CASE("drag without induced term") {
    perf::AircraftModel ac = test::syn735();
    ac.cd2 = 0.0;
    const double rho = air::atmos_at(3000.0).density;
    CHECK(perf::drag(ac, 180.0, 3000.0) ==
          doctest::Approx(0.5 * rho * 180.0 * 180.0 * ac.wing_area * ac.cd0).epsilon(1e-14));
}

TEST_CASE("drag has one minimum over airspeed") {
    const perf::AircraftModel ac = test::syn735();
    for (double h : {0.0, 6000.0, 10000.0}) {
        int sign_changes = 0;
        double last = perf::drag(ac, 61.0, h) - perf::drag(ac, 60.0, h);
        for (double v = 61.0; v < 400.0; v += 1.0) {
            const double d = perf::drag(ac, v + 1.0, h) - perf::drag(ac, v, h);
            if ((d > 0.0) != (last > 0.0)) ++sign_changes;
            last = d;
        }
        CHECK(sign_changes == 1);
    }
}

TEST_CASE("idle thrust and net drag") {
    perf::AircraftModel ac = test::syn735();
    CHECK(perf::idle_thrust(ac, 0.0) == ac.ct1);
    CHECK(perf::net_drag(ac, 200.0, 5000.0) ==
          perf::drag(ac, 200.0, 5000.0) - perf::idle_thrust(ac, 5000.0));
    ac.ct1 = 0.0;
    CHECK(perf::net_drag(ac, 200.0, 5000.0) == perf::drag(ac, 200.0, 5000.0));
}

TEST_CASE("net drag partials agree with central differences") {
    const perf::AircraftModel ac = test::syn735();
    for (double h : {1000.0, 7000.0, 10500.0, 11800.0}) {
        for (double v : {130.0, 190.0, 250.0}) {
            const auto p = perf::net_drag_partials(ac, v, h);
            const double ev = 1e-4 * v, eh = 0.1;
            const double fv = (perf::net_drag(ac, v + ev, h) - perf::net_drag(ac, v - ev, h)) / (2 * ev);
            const double fh = (perf::net_drag(ac, v, h + eh) - perf::net_drag(ac, v, h - eh)) / (2 * eh);
            CHECK(p.d_dv == doctest::Approx(fv).epsilon(1e-6));
            CHECK(p.d_dh == doctest::Approx(fh).epsilon(1e-6));
        }
    }
}

TEST_CASE("idle fuel flow is linear and floored") {
    const perf::AircraftModel ac = test::syn735();
    CHECK(perf::fuel_flow_idle(ac, 0.0) == doctest::Approx(ac.cf3 / 60.0));
    CHECK(perf::fuel_flow_idle(ac, ac.cf4) == 0.0);
    CHECK(perf::fuel_flow_idle(ac, 0.5 * ac.cf4) == doctest::Approx(ac.cf3 / 120.0));
}

TEST_CASE("emission index tables") {
    perf::AircraftModel ac = test::syn735();
    ac.ei_tables[0] = {{0.5, 7.0}};
    // one point: the correction factor is all that varies
    const auto a = air::atmos_at(8000.0);
    const double corr = std::sqrt(std::pow(a.pressure_ratio, 1.02) / std::pow(a.temperature_ratio, 3.3));
    CHECK(perf::emission_index(ac, perf::Species::kNOx, 200.0, 8000.0) == doctest::Approx(7.0 * corr));

    // two points, sea level, near-static: corrected flow equals actual flow
    ac.ei_tables[0] = {{0.2, 4.0}, {1.8, 16.0}};
    const double w_mid = std::sqrt(0.2 * 1.8);
    CHECK(perf::emission_index(ac, perf::Species::kNOx, w_mid, 1e-3, 0.0) ==
          doctest::Approx(std::sqrt(4.0 * 16.0)).epsilon(1e-9));
    // clamped outside the table
    CHECK(perf::emission_index(ac, perf::Species::kNOx, 0.01, 1e-3, 0.0) == doctest::Approx(4.0));
    CHECK(perf::emission_index(ac, perf::Species::kNOx, 5.0, 1e-3, 0.0) == doctest::Approx(16.0));

    ac.ei_tables[1] = {{0.5, 7.0}};
    CHECK(perf::emission_index(ac, perf::Species::kCO, 200.0, 8000.0) ==
          doctest::Approx(7.0 * std::pow(a.temperature_ratio, 3.3) / std::pow(a.pressure_ratio, 1.02)));
}

TEST_CASE("species names") {
    for (auto s : {perf::Species::kNOx, perf::Species::kCO, perf::Species::kHC}) {
        CHECK(perf::species_from_name(perf::species_name(s)) == s);
    }
    CHECK_THROWS_AS(perf::species_from_name("SO2"), ValidationError);
}

TEST_CASE("cost coefficients") {
    const perf::AircraftModel ac = test::syn735();
    const double tas = air::tas_from_cas(136.0, 10668.0);
    const auto fuel = perf::make_cost(ac, perf::CostKind::kFuel, perf::Species::kNOx, tas, 10668.0, 230.0, -2e5);
    CHECK(fuel.k_cr == doctest::Approx(ac.cruise_fuel_flow / 230.0));
    CHECK(perf::k_des(ac, fuel, 200.0, 5000.0) == perf::fuel_flow_idle(ac, 5000.0));

    const auto nox = perf::make_cost(ac, perf::CostKind::kEmission, perf::Species::kNOx, tas, 10668.0, 230.0, -2e5);
    CHECK(nox.k_cr == doctest::Approx(nox.ei_cruise[0] * ac.cruise_fuel_flow / 230.0));
    CHECK(perf::k_des(ac, nox, 200.0, 5000.0) ==
          doctest::Approx(perf::emission_index(ac, perf::Species::kNOx, 200.0, 5000.0) * perf::fuel_flow_idle(ac, 5000.0)));

    perf::AircraftModel flat = ac;
    flat.ei_tables[0] = {{1.0, 9.0}};
    flat.cf3 = 12.0;
    const auto c = perf::make_cost(flat, perf::CostKind::kEmission, perf::Species::kNOx, tas, 10668.0, 230.0, -2e5);
    const double corr = perf::emission_index(flat, perf::Species::kNOx, 200.0, 0.0) / 9.0;
    CHECK(corr == doctest::Approx(1.0));
    CHECK(perf::k_des(flat, c, 200.0, 0.0) == doctest::Approx(9.0 * 12.0 / 60.0));
}

TEST_CASE("descent cost partials against Richardson extrapolation") {
    const perf::AircraftModel ac = test::syn735();
    const double tas = air::tas_from_cas(136.0, 10668.0);
    for (auto kind : {perf::CostKind::kFuel, perf::CostKind::kEmission}) {
        const auto cost = perf::make_cost(ac, kind, perf::Species::kNOx, tas, 10668.0, 230.0, -2e5);
        for (double h : {4000.0, 8000.0}) {
            const double v = 190.0;
            auto fd_v = [&](double e) {
                return (perf::k_des(ac, cost, v + e, h) - perf::k_des(ac, cost, v - e, h)) / (2 * e);
            };
            auto fd_h = [&](double e) {
                return (perf::k_des(ac, cost, v, h + e) - perf::k_des(ac, cost, v, h - e)) / (2 * e);
            };
            const double rv = (4 * fd_v(0.05) - fd_v(0.1)) / 3.0;
            const double rh = (4 * fd_h(1.0) - fd_h(2.0)) / 3.0;
            const auto p = perf::k_des_partials(ac, cost, v, h);
            CHECK(std::abs(p.d_dv - rv) <= 1e-5 * std::max(std::abs(rv), 1e-9));
            CHECK(std::abs(p.d_dh - rh) <= 1e-5 * std::abs(rh));
        }
    }
}

TEST_CASE("model validation") {
    perf::AircraftModel ac = test::syn735();
    CHECK_NOTHROW(ac.validate());
    auto bad = ac;
    bad.mass = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = ac;
    bad.ei_tables[0] = {{1.0, 5.0}, {1.0, 6.0}};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = ac;
    bad.envelope.cas_min = bad.envelope.cas_max;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("descent capability scan") {
    perf::AircraftModel ac = test::syn735();
    CHECK_NOTHROW(perf::check_descent_capability(ac, 3962.4, 10668.0));
    ac.ct1 = 60000.0;
    CHECK_THROWS_AS(perf::check_descent_capability(ac, 3962.4, 10668.0), ValidationError);
}
