#include "pidchan/lp.hpp"

#include <doctest.h>

#include <string>

using namespace pidchan;
using doctest::Approx;

TEST_CASE("small textbook problem") {
    // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
    LinearProgram lp(2);
    lp.objective = {-3, -5};
    lp.add_ub({1, 0}, 4);
    lp.add_ub({0, 2}, 12);
    lp.add_ub({3, 2}, 18);
    const LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == Approx(-36));
    CHECK(r.x[0] == Approx(2));
    CHECK(r.x[1] == Approx(6));
}

TEST_CASE("equality constraints and phase one") {
    // min x + 2y + 3z s.t. x + y + z = 1, x - y = 0.2
    LinearProgram lp(3);
    lp.objective = {1, 2, 3};
    lp.add_eq({1, 1, 1}, 1);
    lp.add_eq({1, -1, 0}, 0.2);
    const LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x[0] == Approx(0.6));
    CHECK(r.x[1] == Approx(0.4));
    CHECK(r.objective == Approx(1.4));
}

TEST_CASE("negative right-hand side") {
    // min x s.t. -x <= -3
    LinearProgram lp(1);
    lp.objective = {1};
    lp.add_ub({-1}, -3);
    const LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x[0] == Approx(3));
}

TEST_CASE("infeasible and unbounded") {
    LinearProgram inf(2);
    inf.add_eq({1, 1}, 1);
    inf.add_eq({1, 1}, 2);
    CHECK(solve_lp(inf).status == LpStatus::Infeasible);

    LinearProgram unb(2);
    unb.objective = {-1, 0};
    unb.add_ub({0, 1}, 1);
    CHECK(solve_lp(unb).status == LpStatus::Unbounded);
}

TEST_CASE("degenerate redundant equalities") {
    LinearProgram lp(3);
    lp.objective = {0, 0, -1};
    lp.add_eq({1, 1, 1}, 1);
    lp.add_eq({2, 2, 2}, 2);
    lp.add_eq({1, 1, 1}, 1);
    const LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x[2] == Approx(1));
}

TEST_CASE("status names") {
    CHECK(std::string(to_string(LpStatus::Optimal)) == "optimal");
    CHECK(std::string(to_string(LpStatus::Infeasible)) == "infeasible");
}
