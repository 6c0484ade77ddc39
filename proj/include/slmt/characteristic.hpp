#pragma once

// The characteristic function omega(lambda), whose zeros are the eigenvalues,
// and the per-subinterval Wronskians omega_i = W(phi_i, chi_i).

#include <cmath>
#include <limits>
#include <vector>

#include "slmt/shooting.hpp"

namespace slmt {

/// W(f, g; x) = f g' - f' g, one-sided at interfaces.
inline double wronskian_at(const PiecewiseSolution& f, const PiecewiseSolution& g, double x,
                           Side side = Side::interior) {
    if (f.lambda() != g.lambda())
        throw Error(ErrorCode::mismatched_lambda, "Wronskian of solutions for different lambda");
    StateVector a = f.at(x, side), b = g.at(x, side);
    return a.u * b.du - a.du * b.u;
}

/// (beta1' lambda + beta1) u(1) - (beta2' lambda + beta2) u'(1).
inline double right_bc_form(const Problem& problem, double lambda, StateVector at_one) {
    const auto& r = problem.spec().right_bc;
    return (r.beta1_prime * lambda + r.beta1) * at_one.u - (r.beta2_prime * lambda + r.beta2) * at_one.du;
}

/// omega(lambda) = (prod delta_i^2) [(lambda beta1' + beta1) phi(1) - (lambda beta2' + beta2) phi'(1)],
/// from a single phi shot.
inline double omega(const Problem& problem, double lambda, const IntegratorOptions& opts = {}) {
    PiecewiseSolution phi = shoot_phi(problem, lambda, opts, false);
    return problem.delta_product_squared() * right_bc_form(problem, lambda, phi.end_state(phi.piece_count() - 1));
}

struct CharacteristicSample {
    double lambda = 0.0;
    double omega = 0.0;                 // phi-only boundary form
    std::vector<double> omega_i;        // W(phi, chi) at each subinterval midpoint
    std::vector<double> chain_residual; // omega_1 - w_i omega_i
    double chain_residual_max = 0.0;
    double ode_abs_tol = 0.0;
    double ode_rel_tol = 0.0;
};

inline CharacteristicSample omega_per_interval(const Problem& problem, double lambda,
                                               const IntegratorOptions& opts = {}) {
    PiecewiseSolution phi = shoot_phi(problem, lambda, opts, true);
    PiecewiseSolution chi = shoot_chi(problem, lambda, opts, true);
    CharacteristicSample out;
    out.lambda = lambda;
    out.ode_abs_tol = opts.abs_tol;
    out.ode_rel_tol = opts.rel_tol;
    out.omega = problem.delta_product_squared() * right_bc_form(problem, lambda, phi.end_state(phi.piece_count() - 1));
    const auto w = problem.weights();
    for (std::size_t j = 0; j < problem.piece_count(); ++j) {
        double mid = 0.5 * (problem.piece_begin(j) + problem.piece_end(j));
        out.omega_i.push_back(wronskian_at(phi, chi, mid));
    }
    for (std::size_t j = 0; j < problem.piece_count(); ++j) {
        double r = out.omega_i[0] - w[j] * out.omega_i[j];
        out.chain_residual.push_back(r);
        out.chain_residual_max = std::max(out.chain_residual_max, std::abs(r));
    }
    return out;
}

struct DerivativeOptions {
    /// Step; <= 0 picks max(1e-6, 1e-8 |lambda|).
    double h = 0.0;
    bool richardson = true;
};

/// Central difference d omega / d lambda, optionally Richardson-extrapolated
/// from steps h and h/2. All evaluations reuse the step mesh chosen at lambda,
/// so step-size selection does not add noise to the difference quotient.
inline double omega_derivative(const Problem& problem, double lambda, const DerivativeOptions& d = {},
                               const IntegratorOptions& opts = {}) {
    double h = d.h > 0.0 ? d.h : std::max(1e-6, 1e-8 * std::abs(lambda));
    const ShotMesh mesh = phi_mesh(problem, lambda, opts);
    auto w = [&](double l) {
        return problem.delta_product_squared() * right_bc_form(problem, l, phi_end_on_mesh(problem, l, mesh));
    };
    auto central = [&](double hh) { return (w(lambda + hh) - w(lambda - hh)) / (2.0 * hh); };
    double d1 = central(h);
    if (!d.richardson) return d1;
    double d2 = central(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace slmt
