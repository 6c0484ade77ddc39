#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <slmt/problem.hpp>

#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using slmt::ErrorCode;

namespace {

ErrorCode code_of(const slmt::ProblemSpec& s) {
    try {
        slmt::Problem p(s);
    } catch (const slmt::Error& e) {
        return e.code();
    }
    FAIL("expected validation failure");
    return ErrorCode::invalid_config;
}

}  // namespace

TEST_CASE("derived constants of a three-interface spec") {
    slmt::ProblemSpec s = oracle::canon1();
    s.interfaces = {-0.5, 0.1, 0.6};
    s.jumps = {1.7, -0.6, 2.5};
    s.right_bc = {0.5, 1.0, 1.0, 0.4};
    slmt::Problem p(s);
    CHECK_THAT(p.rho(), WithinAbs(1.0 * 1.0 - 0.5 * 0.4, 1e-15));
    REQUIRE(p.weights().size() == 4);
    CHECK(p.weights()[0] == 1.0);
    CHECK_THAT(p.weights()[1], WithinRel(1.7 * 1.7, 1e-15));
    CHECK_THAT(p.weights()[3], WithinRel(std::pow(1.7 * 0.6 * 2.5, 2), 1e-14));
    CHECK_THAT(p.delta_product(), WithinRel(-1.7 * 0.6 * 2.5, 1e-15));
    CHECK_THAT(p.delta_prefix()[2], WithinRel(-1.7 * 0.6, 1e-15));
    CHECK(p.nodes().front() == -1.0);
    CHECK(p.nodes().back() == 1.0);
}

TEST_CASE("locate honours one-sided interface queries") {
    slmt::Problem p(oracle::case1_m2());
    CHECK(p.locate(-1.0, slmt::Side::interior) == 0);
    CHECK(p.locate(-0.3, slmt::Side::left) == 0);
    CHECK(p.locate(-0.3, slmt::Side::right) == 1);
    CHECK(p.locate(0.0, slmt::Side::interior) == 1);
    CHECK(p.locate(1.0, slmt::Side::interior) == 2);
    CHECK_THROWS_AS(p.locate(0.4, slmt::Side::interior), slmt::Error);
    CHECK_THROWS_AS(p.locate(1.5, slmt::Side::interior), slmt::Error);
}

TEST_CASE("validation errors carry their codes") {
    auto s = oracle::canon1();
    s.right_bc = {1.0, 0.0, 1.0, 0.0};
    CHECK(code_of(s) == ErrorCode::rho_not_positive);

    s = oracle::canon1();
    s.right_bc = {0.0, -1.0, 1.0, 0.0};
    CHECK(code_of(s) == ErrorCode::rho_not_positive);

    s = oracle::canon1(0.0);
    CHECK(code_of(s) == ErrorCode::zero_jump_factor);

    s = oracle::canon1();
    s.left_bc = {0.0, 0.0};
    CHECK(code_of(s) == ErrorCode::degenerate_left_bc);

    s = oracle::case1_m2();
    s.interfaces = {0.4, -0.3};
    CHECK(code_of(s) == ErrorCode::unordered_interfaces);

    s = oracle::canon1();
    s.interfaces = {1.0};
    CHECK(code_of(s) == ErrorCode::unordered_interfaces);

    s = oracle::canon1();
    s.jumps = {1.0, 2.0};
    CHECK(code_of(s) == ErrorCode::unordered_interfaces);

    s = oracle::canon1();
    s.potential = {{slmt::SampledPiece{{-1.0, 0.5}, {0.0, 1.0}}}};
    CHECK(code_of(s) == ErrorCode::invalid_potential);

    s = oracle::canon1();
    s.potential = {{slmt::ConstantPiece{1.0}, slmt::ConstantPiece{2.0}, slmt::ConstantPiece{3.0}}};
    CHECK(code_of(s) == ErrorCode::invalid_potential);

    s = oracle::canon1();
    s.potential = {{slmt::BumpPiece{0.0, 0.0, 1.0}}};
    CHECK(code_of(s) == ErrorCode::invalid_potential);
}

TEST_CASE("case table") {
    using C = slmt::AsymptoticCase;
    auto s = oracle::canon1();
    CHECK(slmt::classify_case(slmt::Problem(s)).which == C::case4);
    s.left_bc = {0.5, 1.0};
    CHECK(slmt::classify_case(slmt::Problem(s)).which == C::case3);
    CHECK(slmt::classify_case(slmt::Problem(oracle::case1_m2())).which == C::case1);
    CHECK(slmt::classify_case(slmt::Problem(oracle::case2_m1())).which == C::case2);
    // A tiny alpha2 counts as zero only with a tolerance.
    s.left_bc = {1.0, 1e-14};
    CHECK(slmt::classify_case(slmt::Problem(s)).which == C::case3);
    CHECK(slmt::classify_case(slmt::Problem(s), 1e-12).which == C::case4);
}

TEST_CASE("piece evaluation and I0") {
    slmt::Problem p(oracle::case1_m2());
    CHECK_THAT(slmt::evaluate_potential(p, -0.65), WithinAbs(0.75, 1e-15));
    CHECK_THAT(slmt::evaluate_potential(p, 0.4, slmt::Side::left), WithinAbs(-0.5, 1e-15));
    // Trapezoids: 0.7 * 1.5 / 2 + 0.7 * 1.0 / 2 + 0.6 * 0.5 / 2.
    CHECK_THAT(slmt::potential_moments(p).I0, WithinAbs(1.025, 1e-15));

    auto s = oracle::canon1();
    s.potential = {{slmt::PolynomialPiece{{1.0, -2.0, 3.0}}}};
    CHECK_THAT(slmt::potential_moments(slmt::Problem(s)).I0, WithinAbs(2.0 + 2.0, 1e-15));

    // Bump against a plain midpoint sum.
    s.potential = {{slmt::BumpPiece{0.5, 0.3, 2.0}}};
    slmt::Problem pb(s);
    double ref = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double x = 0.2 + 0.6 * (i + 0.5) / n, r = (x - 0.5) / 0.3;
        ref += 2.0 * std::exp(1.0 - 1.0 / (1.0 - r * r)) * 0.6 / n;
    }
    auto m = slmt::potential_moments(pb);
    CHECK_THAT(m.I0, WithinAbs(ref, 1e-9));
    CHECK(m.error_estimate < 1e-10);
    CHECK(pb.potential_bound() == 2.0);
    REQUIRE(pb.potential_breakpoints(1).size() == 2);
}
