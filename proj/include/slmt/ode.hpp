#pragma once

// Adaptive Dormand-Prince 5(4) integrator for the two-component system
// (u, u')' = (u', (q - lambda) u), with the standard continuous extension
// for dense output. Integration runs in either direction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "slmt/error.hpp"

namespace slmt {

struct StateVector {
    double u = 0.0;
    double du = 0.0;

    friend StateVector operator+(StateVector a, StateVector b) { return {a.u + b.u, a.du + b.du}; }
    friend StateVector operator-(StateVector a, StateVector b) { return {a.u - b.u, a.du - b.du}; }
    friend StateVector operator*(double c, StateVector a) { return {c * a.u, c * a.du}; }
    bool finite() const { return std::isfinite(u) && std::isfinite(du); }
};

struct IntegratorOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t max_steps = 2'000'000;
};

struct IntegratorStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

/// Accepted steps of one adaptive run, queryable anywhere in [begin, end].
class DenseTrajectory {
public:
    struct Step {
        double x0;
        double h;
        // Continuous extension coefficients, one set per component.
        std::array<StateVector, 5> rc;
    };

    DenseTrajectory() = default;
    DenseTrajectory(double begin, StateVector init) : begin_(begin), end_(begin), front_(init), back_(init) {}

    double begin() const noexcept { return begin_; }
    double end() const noexcept { return end_; }
    StateVector front() const noexcept { return front_; }
    StateVector back() const noexcept { return back_; }
    const std::vector<Step>& steps() const noexcept { return steps_; }
    bool has_dense() const noexcept { return !steps_.empty() || begin_ == end_; }

    StateVector at(double x) const {
        if (x == begin_) return front_;
        if (x == end_) return back_;
        const bool forward = end_ > begin_;
        const double lo = std::min(begin_, end_), hi = std::max(begin_, end_);
        if (x < lo || x > hi)
            throw Error(ErrorCode::out_of_domain, "dense query x = " + std::to_string(x) + " outside trajectory");
        if (steps_.empty()) throw Error(ErrorCode::out_of_domain, "trajectory stored without dense output");
        // Steps are ordered along the direction of integration.
        auto it = forward ? std::upper_bound(steps_.begin(), steps_.end(), x,
                                             [](double v, const Step& s) { return v < s.x0; })
                          : std::upper_bound(steps_.begin(), steps_.end(), x,
                                             [](double v, const Step& s) { return v > s.x0; });
        const Step& s = it == steps_.begin() ? steps_.front() : *std::prev(it);
        double theta = (x - s.x0) / s.h;
        theta = std::clamp(theta, 0.0, 1.0);
        double t1 = 1.0 - theta;
        const auto& r = s.rc;
        return r[0] + theta * (r[1] + t1 * (r[2] + theta * (r[3] + t1 * r[4])));
    }

    void append(const Step& s) { steps_.push_back(s); }
    void finish(double end, StateVector back) {
        end_ = end;
        back_ = back;
    }
    void drop_dense() { steps_.clear(); steps_.shrink_to_fit(); }

private:
    double begin_ = 0.0;
    double end_ = 0.0;
    StateVector front_{};
    StateVector back_{};
    std::vector<Step> steps_;
};

namespace dp45 {
// Butcher tableau (Dormand & Prince 1980).
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output weights.
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp45

/// Integrates y' = rhs(x, y) from `a` to `b` (b < a allowed) starting at `init`.
/// `rhs` is any callable (double, StateVector) -> StateVector.
template <class Rhs>
DenseTrajectory integrate(Rhs&& rhs, double a, double b, StateVector init, const IntegratorOptions& opts,
                          bool keep_dense = true, double initial_step = 0.0, IntegratorStats* stats = nullptr) {
    using namespace dp45;
    if (!init.finite()) throw Error(ErrorCode::non_finite_state, "non-finite initial state");
    DenseTrajectory traj(a, init);
    if (a == b) return traj;

    const double dir = b > a ? 1.0 : -1.0;
    const double span = std::abs(b - a);
    double h = initial_step > 0.0 ? std::min(initial_step, span) : std::min(span, 0.01);
    h *= dir;

    double x = a;
    StateVector y = init;
    StateVector k1 = rhs(x, y);
    double err_old = 1e-4;
    const double eps = std::numeric_limits<double>::epsilon();
    std::size_t steps = 0;
    bool last = false;

    while (!last) {
        if (++steps > opts.max_steps)
            throw Error(ErrorCode::step_size_underflow, "maximum step count exceeded");
        if (dir * (x + h - b) >= 0.0) {
            h = b - x;
            last = true;
        }
        if (std::abs(h) <= 16.0 * eps * std::max(1.0, std::abs(x)))
            throw Error(ErrorCode::step_size_underflow, "step size underflow at x = " + std::to_string(x));

        StateVector k2 = rhs(x + c2 * h, y + h * (a21 * k1));
        StateVector k3 = rhs(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
        StateVector k4 = rhs(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        StateVector k5 = rhs(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        StateVector k6 = rhs(x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        StateVector y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const double x1 = last ? b : x + h;
        StateVector k7 = rhs(x1, y1);
        StateVector e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double su = opts.abs_tol + opts.rel_tol * std::max(std::abs(y.u), std::abs(y1.u));
        double sd = opts.abs_tol + opts.rel_tol * std::max(std::abs(y.du), std::abs(y1.du));
        double err = std::sqrt(0.5 * ((e.u / su) * (e.u / su) + (e.du / sd) * (e.du / sd)));
        if (!std::isfinite(err) || !y1.finite()) {
            if (!y1.finite() && std::abs(h) < 1e-3 * span)
                throw Error(ErrorCode::non_finite_state, "state blew up near x = " + std::to_string(x));
            h *= 0.1;
            last = false;
            continue;
        }

        if (err <= 1.0) {
            if (keep_dense) {
                DenseTrajectory::Step s;
                s.x0 = x;
                s.h = x1 - x;
                StateVector ydiff = y1 - y;
                StateVector bspl = s.h * k1 - ydiff;
                s.rc[0] = y;
                s.rc[1] = ydiff;
                s.rc[2] = bspl;
                s.rc[3] = ydiff - s.h * k7 - bspl;
                s.rc[4] = s.h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                traj.append(s);
            }
            x = x1;
            y = y1;
            k1 = k7;
            if (stats) ++stats->accepted;
            // PI step-size control (Gustafsson), as in Hairer's DOPRI5.
            double fac = 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_old, 0.4 / 5.0);
            err_old = std::max(err, 1e-4);
            h *= std::clamp(fac, 0.2, 10.0);
        } else {
            if (stats) ++stats->rejected;
            last = false;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
    traj.finish(b, y);
    return traj;
}

/// Fixed-step DP5 over the given mesh (monotone, either direction), no error
/// control. Replaying an adaptive run's mesh makes the result a smooth
/// function of the ODE's parameters.
template <class Rhs>
StateVector integrate_on_mesh(Rhs&& rhs, const std::vector<double>& mesh, StateVector init) {
    using namespace dp45;
    StateVector y = init;
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
        const double x = mesh[i], h = mesh[i + 1] - mesh[i];
        StateVector k1 = rhs(x, y);
        StateVector k2 = rhs(x + c2 * h, y + h * (a21 * k1));
        StateVector k3 = rhs(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
        StateVector k4 = rhs(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        StateVector k5 = rhs(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        StateVector k6 = rhs(x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        if (!y.finite()) throw Error(ErrorCode::non_finite_state, "state blew up on fixed mesh");
    }
    return y;
}

/// Step boundaries of a dense trajectory, begin to end.
inline std::vector<double> trajectory_mesh(const DenseTrajectory& traj) {
    std::vector<double> mesh;
    mesh.reserve(traj.steps().size() + 1);
    for (const auto& s : traj.steps()) mesh.push_back(s.x0);
    mesh.push_back(traj.end());
    if (traj.steps().empty()) mesh.insert(mesh.begin(), traj.begin());
    return mesh;
}

}  // namespace slmt
