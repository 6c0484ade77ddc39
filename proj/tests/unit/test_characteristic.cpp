#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <slmt/characteristic.hpp>

#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const slmt::IntegratorOptions tight{1e-12, 1e-12};
}

TEST_CASE("CANON-1 omega against its closed form") {
    slmt::Problem p(oracle::canon1());
    for (double lambda : {-20.0, -1.0, 0.0, 0.3, 2.5, 49.0, 400.0}) {
        double ref = oracle::constant_q_omega(0.0, lambda, p.spec().left_bc, p.spec().right_bc);
        CHECK_THAT(slmt::omega(p, lambda, tight), WithinAbs(ref, 1e-9 * std::max(1.0, std::abs(ref))));
    }
    CHECK_THAT(slmt::omega(p, 0.0, tight), WithinAbs(1.0, 1e-12));
}

TEST_CASE("constant q, Robin data on both ends") {
    auto s = oracle::constant_q(2.0);
    s.left_bc = {0.7, -1.2};
    s.right_bc = {0.5, 1.0, 1.0, 0.4};
    slmt::Problem p(s);
    for (double lambda : {-7.0, 1.5, 2.0, 30.0, 250.0}) {
        double ref = oracle::constant_q_omega(2.0, lambda, s.left_bc, s.right_bc);
        CHECK_THAT(slmt::omega(p, lambda, tight), WithinAbs(ref, 1e-9 * std::max(1.0, std::abs(ref))));
    }
}

TEST_CASE("jump factors scale omega by prod delta") {
    // phi on the right is the continuous solution divided by delta; omega
    // carries prod delta^2, so the net factor is prod delta.
    for (double d : {0.5, 2.0, -3.0}) {
        slmt::Problem p(oracle::canon1(d)), p1(oracle::canon1());
        for (double lambda : {0.7, 12.0, 300.0})
            CHECK_THAT(slmt::omega(p, lambda, tight), WithinAbs(d * slmt::omega(p1, lambda, tight), 1e-9 * std::abs(d) * 20));
    }
}

TEST_CASE("omega_1 = w_i omega_i on random three-interface specs") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(-1.0, 1.0), L(-20.0, 400.0), D(0.4, 2.5);
    for (int k = 0; k < 3; ++k) {
        slmt::ProblemSpec s;
        s.potential = {{slmt::PolynomialPiece{{U(rng), U(rng), 2.0 * U(rng)}}}};
        s.interfaces = {-0.5 + 0.1 * U(rng), 0.1 * U(rng), 0.5 + 0.1 * U(rng)};
        s.jumps = {D(rng), -D(rng), D(rng)};
        s.left_bc = {U(rng), 1.0};
        s.right_bc = {0.5, 1.0, 1.0, 0.4 * U(rng)};
        slmt::Problem p(s);
        for (int i = 0; i < 8; ++i) {
            auto smp = slmt::omega_per_interval(p, L(rng), tight);
            REQUIRE(smp.omega_i.size() == 4);
            CHECK(smp.chain_residual_max <= 1e-8 * std::max(1.0, std::abs(smp.omega_i[0])));
            CHECK_THAT(smp.omega, WithinAbs(smp.omega_i[0], 1e-8 * std::max(1.0, std::abs(smp.omega))));
        }
    }
}

TEST_CASE("omega' against a difference of the closed form") {
    slmt::Problem p(oracle::canon1());
    const auto& l = p.spec().left_bc;
    const auto& r = p.spec().right_bc;
    CHECK_THAT(slmt::omega_derivative(p, 0.0, {}, tight), WithinAbs(-4.0, 1e-7));
    for (double lambda : {0.289914, 3.3, 60.0, 200.0}) {
        const double h = 1e-4;
        auto f = [&](double x) { return oracle::constant_q_omega(0.0, x, l, r); };
        double ref = (-f(lambda + 2 * h) + 8 * f(lambda + h) - 8 * f(lambda - h) + f(lambda - 2 * h)) / (12 * h);
        CHECK_THAT(slmt::omega_derivative(p, lambda, {}, tight), WithinAbs(ref, 1e-7 * std::max(1.0, std::abs(ref))));
    }
}

TEST_CASE("Wronskian needs a common lambda") {
    slmt::Problem p(oracle::canon1());
    auto a = slmt::shoot_phi(p, 1.0), b = slmt::shoot_chi(p, 2.0);
    try {
        slmt::wronskian_at(a, b, 0.5);
        FAIL("expected MismatchedLambda");
    } catch (const slmt::Error& e) {
        CHECK(e.code() == slmt::ErrorCode::mismatched_lambda);
    }
}
