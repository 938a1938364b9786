#include <doctest.h>

#include <cmath>

#include "cda/error.hpp"
#include "cda/verify.hpp"
#include "support.hpp"

using namespace cda;

TEST_CASE("grid spec parsing") {
    const auto g = verify::GridSpec::parse("400x200x21");
    CHECK(g.n_h == 400);
    CHECK(g.n_v == 200);
    CHECK(g.n_gamma == 21);
    CHECK(g.str() == "400x200x21");
    CHECK(verify::GridSpec::parse(g.str()).n_v == 200);
    for (const char* bad : {"", "400x200", "400x200x", "axbxc", "1x200x21", "400x200x21x3", "-4x20x3"}) {
        CHECK_THROWS_AS(verify::GridSpec::parse(bad), ValidationError);
    }
}

TEST_CASE("parallel dp reproduces the serial tables bit for bit") {
    const auto sc = test::scenario("nox_cross");
    const verify::GridSpec g{60, 40, 6};
    const auto a = verify::dp_solve(sc, g);
    const auto b = verify::dp_solve_serial(sc, g);
    CHECK(a.cost == b.cost);
    CHECK(a.tod == b.tod);
    CHECK(a.value == b.value);
    CHECK(a.distance == b.distance);
    REQUIRE(a.path.size() == b.path.size());
    for (std::size_t i = 0; i < a.path.size(); ++i) CHECK(a.path[i].tas == b.path[i].tas);
}

TEST_CASE("dp path stays inside the envelope") {
    const auto sc = test::scenario("fuel_calm");
    const auto dp = verify::dp_solve(sc, {80, 40, 6});
    REQUIRE_FALSE(dp.path.empty());
    for (const auto& pt : dp.path) {
        for (double s : dyn::pure_state_constraints(sc.problem.aircraft, pt.tas, pt.h)) CHECK(s <= 1e-9);
        CHECK(dyn::admissible_gammas(sc.problem.limits, pt.tas).contains(pt.gamma, 1e-12));
    }
    CHECK(dp.path.front().h == doctest::Approx(sc.h0));
    CHECK(dp.path.back().h == doctest::Approx(sc.h_f));
}

TEST_CASE("dp gap to the generator shrinks under refinement") {
    const auto sc = test::scenario("fuel_calm");
    const auto tr = opt::generate_trajectory(sc);
    double last = 1e300;
    for (const verify::GridSpec g : {verify::GridSpec{50, 25, 3}, verify::GridSpec{100, 50, 6}, verify::GridSpec{200, 100, 11}}) {
        const auto c = verify::compare(tr, verify::dp_solve(sc, g));
        INFO(g.str() << " gap " << c.cost_gap);
        CHECK(std::abs(c.cost_gap) < last);
        CHECK(std::abs(c.cost_gap) < 0.02);
        last = std::abs(c.cost_gap);
    }
}
