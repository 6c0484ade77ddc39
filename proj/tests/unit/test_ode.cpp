#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <slmt/ode.hpp>

using Catch::Matchers::WithinAbs;
using slmt::StateVector;

namespace {
auto oscillator(double w) {
    return [w](double, StateVector y) { return StateVector{y.du, -w * w * y.u}; };
}
}  // namespace

TEST_CASE("harmonic oscillator end state and dense output") {
    const double w = 7.0;
    slmt::IntegratorOptions opts{1e-12, 1e-12};
    slmt::IntegratorStats stats;
    auto traj = slmt::integrate(oscillator(w), 0.0, 2.0, {1.0, 0.0}, opts, true, 0.0, &stats);
    CHECK_THAT(traj.back().u, WithinAbs(std::cos(2 * w), 1e-10));
    CHECK_THAT(traj.back().du, WithinAbs(-w * std::sin(2 * w), 1e-9));
    CHECK(stats.accepted > 10);
    for (double x : {0.013, 0.5, 1.234567, 1.999}) {
        auto y = traj.at(x);
        CHECK_THAT(y.u, WithinAbs(std::cos(w * x), 1e-9));
        CHECK_THAT(y.du, WithinAbs(-w * std::sin(w * x), 1e-8));
    }
    CHECK_THROWS_AS(traj.at(2.5), slmt::Error);
}

TEST_CASE("backward integration") {
    auto traj = slmt::integrate(oscillator(3.0), 1.0, -1.0, {std::cos(3.0), -3.0 * std::sin(3.0)}, {1e-12, 1e-12});
    CHECK_THAT(traj.back().u, WithinAbs(std::cos(-3.0), 1e-10));
    CHECK_THAT(traj.at(0.25).u, WithinAbs(std::cos(0.75), 1e-9));
}

TEST_CASE("replaying the mesh reproduces the adaptive run") {
    auto rhs = oscillator(5.0);
    auto traj = slmt::integrate(rhs, -1.0, 1.0, {0.0, 1.0}, {1e-11, 1e-11});
    auto mesh = slmt::trajectory_mesh(traj);
    REQUIRE(mesh.front() == -1.0);
    REQUIRE(mesh.back() == 1.0);
    auto y = slmt::integrate_on_mesh(rhs, mesh, {0.0, 1.0});
    CHECK_THAT(y.u, WithinAbs(traj.back().u, 1e-12));
    CHECK_THAT(y.du, WithinAbs(traj.back().du, 1e-12));
}

TEST_CASE("finite-time blow-up is reported") {
    // y' = y^2, y(0) = 1 blows up at x = 1.
    auto rhs = [](double, StateVector y) { return StateVector{y.u * y.u, 0.0}; };
    CHECK_THROWS_AS(slmt::integrate(rhs, 0.0, 2.0, {1.0, 0.0}, {1e-10, 1e-10}), slmt::Error);
    try {
        slmt::integrate(rhs, 0.0, 2.0, {1.0, 0.0}, {1e-10, 1e-10});
    } catch (const slmt::Error& e) {
        CHECK((e.code() == slmt::ErrorCode::step_size_underflow || e.code() == slmt::ErrorCode::non_finite_state));
    }
    CHECK_THROWS_AS(slmt::integrate(rhs, 0.0, 1.0, {NAN, 0.0}, {}), slmt::Error);
}

TEST_CASE("step budget") {
    slmt::IntegratorOptions opts{1e-12, 1e-12, 5};
    CHECK_THROWS_AS(slmt::integrate(oscillator(50.0), 0.0, 2.0, {1.0, 0.0}, opts), slmt::Error);
}
