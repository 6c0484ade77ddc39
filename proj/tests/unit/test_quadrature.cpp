#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <slmt/quadrature.hpp>

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gauss-Legendre five-point rule matches tabulated nodes") {
    const auto& r = slmt::gauss_legendre(5);
    REQUIRE(r.nodes.size() == 5);
    CHECK_THAT(r.nodes[4], WithinAbs(0.9061798459386640, 1e-15));
    CHECK_THAT(r.nodes[3], WithinAbs(0.5384693101056831, 1e-15));
    CHECK(r.nodes[2] == 0.0);
    CHECK_THAT(r.weights[4], WithinAbs(0.2369268850561891, 1e-15));
    CHECK_THAT(r.weights[2], WithinAbs(128.0 / 225.0, 1e-15));
}

TEST_CASE("n-point rule integrates monomials up to degree 2n-1 exactly") {
    for (std::size_t n : {1u, 2u, 7u, 16u, 24u}) {
        const auto& r = slmt::gauss_legendre(n);
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        CHECK_THAT(wsum, WithinAbs(2.0, 1e-14));
        for (std::size_t k = 0; k < 2 * n; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += r.weights[i] * std::pow(r.nodes[i], static_cast<double>(k));
            double exact = k % 2 ? 0.0 : 2.0 / static_cast<double>(k + 1);
            CHECK_THAT(acc, WithinAbs(exact, 1e-13));
        }
    }
}

TEST_CASE("composite rule on an oscillatory integrand") {
    auto f = [](double x) { return std::sin(40.0 * x) * std::exp(x); };
    // Antiderivative e^x (sin 40x - 40 cos 40x) / 1601.
    auto F = [](double x) { return std::exp(x) * (std::sin(40.0 * x) - 40.0 * std::cos(40.0 * x)) / 1601.0; };
    double v = slmt::composite_gauss_legendre(f, -1.0, 0.7, 20, 16);
    CHECK_THAT(v, WithinAbs(F(0.7) - F(-1.0), 1e-14));
}

TEST_CASE("barycentric interpolant reproduces polynomials of degree n-1") {
    slmt::GaussNodeInterpolant I(8);
    auto p = [](double t) { return 1.0 - 2.0 * t + 0.5 * t * t * t - t * t * t * t * t * t * t; };
    std::vector<double> v;
    for (double t : I.rule().nodes) v.push_back(p(t));
    for (double t : {-1.0, -0.77, 0.0, 0.31, 1.0}) CHECK_THAT(I(t, v.data()), WithinAbs(p(t), 1e-13));
    // Exactly at a node the stored value comes back.
    CHECK(I(I.rule().nodes[3], v.data()) == v[3]);
}
