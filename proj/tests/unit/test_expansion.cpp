#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <slmt/expansion.hpp>

#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;

TEST_CASE("Gram matrix of normalized eigenvectors is the identity") {
    for (const auto& spec : {oracle::canon1(), oracle::case1_m2()}) {
        slmt::Problem p(spec);
        auto res = slmt::find_eigenvalues(p, 12);
        auto g = slmt::gram_matrix(res.eigenpairs, p);
        CHECK(g.n == 12);
        CHECK(g.max_off_diagonal() < 1e-8);
        CHECK(g.max_diagonal_error() < 1e-8);
    }
}

TEST_CASE("an eigenvector expands onto itself") {
    slmt::Problem p(oracle::case3_m1());
    auto res = slmt::find_eigenvalues(p, 8);
    auto ex = slmt::expand(slmt::eigenvector(res.eigenpairs[3]), res.eigenpairs, p);
    for (std::size_t n = 0; n < 8; ++n) CHECK_THAT(ex.coefficients[n], WithinAbs(n == 3 ? 1.0 : 0.0, 1e-8));
    CHECK(ex.residuals.back() < 1e-7);
}

TEST_CASE("residual curves are nonincreasing") {
    slmt::Problem p(oracle::canon1());
    auto res = slmt::find_eigenvalues(p, 25);
    slmt::HElement poly{[](std::size_t, double x) { return 1.0 + x - x * x; }, 0.5};
    auto ex = slmt::expand(poly, res.eigenpairs, p);
    CHECK(ex.max_increase() <= 1e-12);
    CHECK(ex.residuals.back() < ex.residuals.front());
    // Bessel: partial sums of c_n^2 never exceed ||F||^2.
    CHECK(ex.parseval.back() <= ex.norm2 * (1 + 1e-12));
}
