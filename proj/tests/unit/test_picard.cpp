#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <slmt/picard.hpp>
#include <slmt/shooting.hpp>

#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;

TEST_CASE("Picard matches the constant-q closed form") {
    for (double c : {1.0, 2.0}) {
        auto spec = oracle::constant_q(c);
        spec.left_bc = {0.4, 1.0};
        slmt::Problem p(spec);
        for (double lambda : {9.0, 100.0, 900.0}) {
            auto res = slmt::picard_phi(p, lambda);
            CHECK(res.converged);
            double scale = std::max(1.0, std::sqrt(lambda));
            for (double x : {-0.5, 0.3, 1.0}) {
                auto y = res.solution.at(x);
                auto ref = oracle::constant_q_solution(c, lambda, 0.4, 1.0, x);
                CHECK_THAT(y.u, WithinAbs(ref.u, 1e-10));
                CHECK_THAT(y.du, WithinAbs(ref.du, 1e-10 * scale));
            }
        }
    }
}

TEST_CASE("Picard and shooting agree across jumps") {
    slmt::Problem p(oracle::case1_m2());
    auto pic = slmt::picard_phi(p, 150.0);
    auto sh = slmt::shoot_phi(p, 150.0, {1e-12, 1e-12});
    for (double x : {-0.8, -0.1, 0.7, 1.0}) CHECK_THAT(pic.solution.at(x).u, WithinAbs(sh.at(x).u, 1e-8));
    // Transmission: u(h-0) = delta u(h+0).
    auto m = pic.solution.end_state(0), q = pic.solution.begin_state(1);
    CHECK_THAT(m.u, WithinAbs(2.0 * q.u, 1e-14));
    CHECK_THAT(m.du, WithinAbs(2.0 * q.du, 1e-14));
}

TEST_CASE("Picard domain and convergence errors") {
    slmt::Problem p(oracle::constant_q(1.0));
    CHECK_THROWS_AS(slmt::picard_phi(p, 0.0), slmt::Error);
    CHECK_THROWS_AS(slmt::picard_phi(p, -4.0), slmt::Error);
    slmt::PicardOptions opts;
    opts.iterations = 1;
    try {
        slmt::picard_phi(p, 4.0, opts);
        FAIL("expected NonConvergence");
    } catch (const slmt::Error& e) {
        CHECK(e.code() == slmt::ErrorCode::non_convergence);
    }
    opts.throw_on_nonconvergence = false;
    auto res = slmt::picard_phi(p, 4.0, opts);
    CHECK_FALSE(res.converged);
    CHECK(res.residuals.size() == 1);
}
