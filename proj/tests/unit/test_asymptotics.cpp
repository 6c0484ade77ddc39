#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <slmt/asymptotics.hpp>
#include <slmt/characteristic.hpp>

#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using slmt::AsymptoticCase;
using slmt::FormulaVariant;

constexpr double pi = std::numbers::pi;

TEST_CASE("first-order offsets by case") {
    CHECK(slmt::first_order_s(AsymptoticCase::case1, 3) == pi);
    CHECK(slmt::first_order_s(AsymptoticCase::case2, 3) == pi * 1.25);
    CHECK(slmt::first_order_s(AsymptoticCase::case3, 3) == pi * 1.25);
    CHECK(slmt::first_order_s(AsymptoticCase::case4, 3) == pi * 1.5);
    CHECK(slmt::nearest_formula_index(AsymptoticCase::case4, 14.17) == 9);
    CHECK(slmt::nearest_formula_index(AsymptoticCase::case1, pi) == 3);
}

TEST_CASE("CANON-1 estimates against the bisection roots") {
    slmt::Problem p(oracle::canon1());
    auto roots = oracle::canon1_roots(41);
    for (int n = 5; n <= 40; ++n) {
        auto e = slmt::eigenvalue_estimate(p, n);
        CHECK(e.which == AsymptoticCase::case4);
        CHECK_THAT(e.correction, WithinAbs(1.0, 1e-15));
        CHECK_THAT(e.second_order, WithinAbs(pi * n / 2 + 1.0 / (pi * n), 1e-14));
        CHECK(n * std::abs(roots[n] - e.first_order) < 0.33);
        CHECK(n * n * std::abs(roots[n] - e.second_order) < 0.1);
    }
}

TEST_CASE("singular indices are rejected") {
    slmt::Problem p4(oracle::canon1());
    CHECK_THROWS_AS(slmt::eigenvalue_estimate(p4, 0), slmt::Error);
    slmt::Problem p1(oracle::case1_m2());
    try {
        slmt::eigenvalue_estimate(p1, 1);
        FAIL("expected UndefinedRatio");
    } catch (const slmt::Error& e) {
        CHECK(e.code() == slmt::ErrorCode::undefined_ratio);
    }
}

TEST_CASE("second-order terms of each case") {
    // Case 1 spec: beta1'/beta2' = 0, alpha1/alpha2 = 0, I0 = 1.025.
    slmt::Problem p1(oracle::case1_m2());
    auto e1 = slmt::eigenvalue_estimate(p1, 10);
    CHECK_THAT(e1.correction, WithinAbs(1.025 / 2, 1e-14));
    CHECK_THAT(e1.denominator, WithinAbs(9 * pi, 1e-13));
    // Printed mean term divides by prod delta (= 1 here).
    CHECK_THAT(slmt::eigenvalue_estimate(p1, 10, FormulaVariant::printed).correction, WithinAbs(1.025 / 2, 1e-14));

    // Case 3 spec: beta2/beta1' = 1, alpha1/alpha2 = 0.5, I0 = 0.5 + 2 ... piecewise linear.
    slmt::Problem p3(oracle::case3_m1());
    double I0 = slmt::potential_moments(p3).I0;
    CHECK_THAT(I0, WithinAbs(0.5 * (1 - 1) + 0.5 * (-1 + 2), 1e-15));
    auto e3 = slmt::eigenvalue_estimate(p3, 8);
    CHECK_THAT(e3.correction, WithinAbs(1.0 - 0.5 + I0 / 2, 1e-15));
    auto e3p = slmt::eigenvalue_estimate(p3, 8, FormulaVariant::printed);
    CHECK_THAT(e3p.correction, WithinAbs(1.0 - 0.5 + I0 / 3.0, 1e-15));

    // Case 2: corrected bracket -(beta1'/beta2' - I0/2), printed -(beta1'/beta2' + I0/(2 prod delta)).
    slmt::Problem p2(oracle::case2_m1());
    double I2 = slmt::potential_moments(p2).I0;
    CHECK_THAT(slmt::eigenvalue_estimate(p2, 6).correction, WithinAbs(-(0.5 - I2 / 2), 1e-15));
    CHECK_THAT(slmt::eigenvalue_estimate(p2, 6, FormulaVariant::printed).correction,
               WithinAbs(-(0.5 + I2 / 2.6), 1e-15));
}

TEST_CASE("leading term tracks omega with prod delta scaling") {
    const slmt::IntegratorOptions tight{1e-12, 1e-12};
    for (double d : {1.0, 2.0}) {
        slmt::Problem p(oracle::canon1(d));
        // sin 2s = -1 keeps the leading term away from zero.
        for (int k : {10, 40}) {
            double s = (2 * k + 1.5) * pi / 2;
            double ratio = slmt::omega(p, s * s, tight) / slmt::leading_omega(p, s);
            CHECK_THAT(ratio, WithinAbs(1.0, 2.0 / s));
        }
    }
}

TEST_CASE("eigenfunction estimate on CANON-1") {
    slmt::Problem p(oracle::canon1(2.0));
    auto roots = oracle::canon1_roots(31);
    const int n = 30;
    double s = roots[n];
    for (double x : {-0.7, 0.2, 0.9}) {
        // Raw phi is -sin(s (x + 1)) / s on the left and that over delta on the right.
        double raw = -std::sin(s * (x + 1)) / s / (x > 0 ? 2.0 : 1.0);
        CHECK_THAT(slmt::eigenfunction_estimate(p, n, x), WithinAbs(raw, 0.5 / (n * n)));
    }
}
