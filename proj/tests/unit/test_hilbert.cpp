#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <slmt/hilbert.hpp>

#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("inner product weights") {
    slmt::Problem p(oracle::case1_m2());
    slmt::HElement one{[](std::size_t, double) { return 1.0; }, 0.0};
    // Weights 1, 4, 1 on lengths 0.7, 0.7, 0.6.
    CHECK_THAT(slmt::h_inner_product(one, one, p).value, WithinRel(0.7 + 4 * 0.7 + 0.6, 1e-14));
    slmt::HElement scalar{[](std::size_t, double) { return 0.0; }, 3.0};
    // rho = beta1' beta2 - beta1 beta2' = 1, prod delta^2 = 1.
    CHECK_THAT(slmt::h_inner_product(scalar, scalar, p).value, WithinRel(9.0, 1e-15));
    slmt::HElement x2{[](std::size_t, double x) { return x * x; }, 2.0};
    CHECK_THAT(slmt::h_inner_product(x2, scalar, p).value, WithinAbs(6.0, 1e-14));
    // Weighted int x^2 plus the scalar product 2 * 3.
    double ref = (1.0 - 0.027) / 3 + 4 * (0.064 + 0.027) / 3 + (1.0 - 0.064) / 3 + 6.0;
    CHECK_THAT(slmt::h_inner_product(x2, {one.f, 3.0}, p).value, WithinRel(ref, 1e-14));
}

TEST_CASE("inner product of x^2 with itself") {
    slmt::Problem p(oracle::canon1(2.0));
    slmt::HElement x2{[](std::size_t, double x) { return x * x; }, 0.5};
    // int_{-1}^0 x^4 + 4 int_0^1 x^4 + (4 / 1) * 0.25.
    CHECK_THAT(slmt::h_inner_product(x2, x2, p).value, WithinRel(0.2 + 0.8 + 1.0, 1e-14));
}

TEST_CASE("non-convergent quadrature is reported") {
    slmt::Problem p(oracle::canon1());
    slmt::HElement rough{[](std::size_t, double x) { return std::sqrt(std::abs(x - 0.3719)); }, 0.0};
    slmt::QuadratureOptions q;
    q.tolerance = 1e-15;
    q.max_refine = 2;
    try {
        slmt::h_inner_product(rough, rough, p, q);
        FAIL("expected QuadratureNotConverged");
    } catch (const slmt::Error& e) {
        CHECK(e.code() == slmt::ErrorCode::quadrature_not_converged);
    }
}

TEST_CASE("boundary form identity for arbitrary end values") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    slmt::Problem p(oracle::case2_m1());
    for (int i = 0; i < 100; ++i) {
        slmt::StateVector f{U(rng), U(rng)}, g{U(rng), U(rng)};
        CHECK(slmt::boundary_form_identity_residual(p, f, g) < 1e-15);
    }
}

TEST_CASE("Green's identity on random lambda pairs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> L(-20.0, 400.0);
    slmt::Problem p(oracle::case1_m2());
    slmt::IntegratorOptions tight{1e-12, 1e-12};
    for (int i = 0; i < 5; ++i) {
        auto rep = slmt::greens_identity_residual(p, L(rng), L(rng), tight);
        CHECK(rep.residual < 1e-7);
        CHECK(rep.left_wronskian < 1e-12);
        CHECK(rep.interface_wronskian_max < 1e-9);
        CHECK(rep.boundary_identity < 1e-12);
    }
}

TEST_CASE("Green's difference matches its boundary term") {
    // (la - lb) <phi_a, phi_b>_L2w = (P / rho) [R1(a) R1'(b) - R1'(a) R1(b)] for left-BC solutions.
    slmt::Problem p(oracle::case3_m1());
    slmt::IntegratorOptions tight{1e-12, 1e-12};
    double la = 17.0, lb = 3.5;
    auto fa = slmt::shoot_phi(p, la, tight), fb = slmt::shoot_phi(p, lb, tight);
    slmt::QuadratureOptions q;
    q.frequency = std::sqrt(la);
    double ip = slmt::h_inner_product(slmt::element_from_solution(fa, 0), slmt::element_from_solution(fb, 0), p, q).value;
    auto a1 = slmt::value_at_one(fa), b1 = slmt::value_at_one(fb);
    double rhs = p.delta_product_squared() / p.rho() *
                 (slmt::boundary_form_R1(p, a1) * slmt::boundary_form_R1_prime(p, b1) -
                  slmt::boundary_form_R1_prime(p, a1) * slmt::boundary_form_R1(p, b1));
    CHECK_THAT((la - lb) * ip, WithinAbs(rhs, 1e-8 * std::abs(rhs)));
}
