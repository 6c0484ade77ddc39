#pragma once

// The space H = L2(-1, 1) (+) R with inner product
//
//   <F, G> = sum_j w_j int_{Omega_j} f g + (prod delta_i^2 / rho) f1 g1,
//
// the boundary forms at x = 1, and the symmetry (Green's identity) diagnostics.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "slmt/characteristic.hpp"
#include "slmt/quadrature.hpp"

namespace slmt {

/// f is evaluated per subinterval so one-sided values at interfaces are unambiguous.
struct HElement {
    std::function<double(std::size_t piece, double x)> f;
    double f1 = 0.0;
};

/// R1(u) = beta1 u(1) - beta2 u'(1).
inline double boundary_form_R1(const Problem& problem, StateVector at_one) {
    const auto& r = problem.spec().right_bc;
    return r.beta1 * at_one.u - r.beta2 * at_one.du;
}

/// R1'(u) = beta1' u(1) - beta2' u'(1).
inline double boundary_form_R1_prime(const Problem& problem, StateVector at_one) {
    const auto& r = problem.spec().right_bc;
    return r.beta1_prime * at_one.u - r.beta2_prime * at_one.du;
}

inline StateVector value_at_one(const PiecewiseSolution& sol) { return sol.end_state(sol.piece_count() - 1); }

inline HElement element_from_solution(const PiecewiseSolution& sol, double f1) {
    return {[sol](std::size_t j, double x) { return sol.at_piece(j, x).u; }, f1};
}

/// (f, R1'(f)): the member of D(A) built from a solution that satisfies the
/// left and transmission conditions.
inline HElement augmented_element(const Problem& problem, const PiecewiseSolution& sol) {
    return element_from_solution(sol, boundary_form_R1_prime(problem, value_at_one(sol)));
}

/// Composite Gauss-Legendre nodes over every subinterval with the H weights
/// folded in. Panel edges include all non-smooth points of q.
class QuadratureGrid {
public:
    struct Node {
        std::size_t piece;
        double x;
        double weight;
    };

    /// `frequency`: largest oscillation frequency s of the integrands' factors.
    QuadratureGrid(const Problem& problem, double frequency, std::size_t refine = 1, std::size_t order = 16)
        : scalar_weight_(problem.delta_product_squared() / problem.rho()) {
        const auto& rule = gauss_legendre(order);
        const auto w = problem.weights();
        for (std::size_t j = 0; j < problem.piece_count(); ++j) {
            double a = problem.piece_begin(j), b = problem.piece_end(j), L = b - a;
            std::size_t panels = static_cast<std::size_t>(
                std::ceil((10.0 + 2.0 * std::abs(frequency)) * std::max(L, 0.25) / 8.0));
            panels = std::max<std::size_t>(panels, 1) * refine;
            std::vector<double> edges;
            for (std::size_t p = 0; p <= panels; ++p)
                edges.push_back(a + L * static_cast<double>(p) / static_cast<double>(panels));
            for (double bp : problem.potential_breakpoints(j)) edges.push_back(bp);
            std::sort(edges.begin(), edges.end());
            edges.erase(std::unique(edges.begin(), edges.end(),
                                    [](double u, double v) { return std::abs(u - v) < 1e-14; }),
                        edges.end());
            edges.front() = a;
            edges.back() = b;
            for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
                double half = 0.5 * (edges[p + 1] - edges[p]), mid = 0.5 * (edges[p + 1] + edges[p]);
                for (std::size_t k = 0; k < order; ++k)
                    nodes_.push_back({j, mid + half * rule.nodes[k], w[j] * half * rule.weights[k]});
            }
        }
    }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    double scalar_weight() const noexcept { return scalar_weight_; }

    std::vector<double> sample(const HElement& F) const {
        std::vector<double> v(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) v[i] = F.f(nodes_[i].piece, nodes_[i].x);
        return v;
    }

    double dot(const std::vector<double>& f, double f1, const std::vector<double>& g, double g1) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) acc += nodes_[i].weight * f[i] * g[i];
        return acc + scalar_weight_ * f1 * g1;
    }

    double abs_dot(const std::vector<double>& f, double f1, const std::vector<double>& g, double g1) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) acc += nodes_[i].weight * std::abs(f[i] * g[i]);
        return acc + scalar_weight_ * std::abs(f1 * g1);
    }

private:
    double scalar_weight_;
    std::vector<Node> nodes_;
};

struct QuadratureOptions {
    double frequency = 0.0;
    double tolerance = 1e-10;
    std::size_t max_refine = 16;
};

struct InnerProduct {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t refine = 1;
};

/// <F, G>, comparing the rule at refinement r and 2r until the difference is
/// below tolerance relative to int |f g| + |scalar term|.
inline InnerProduct h_inner_product(const HElement& F, const HElement& G, const Problem& problem,
                                    const QuadratureOptions& q = {}) {
    QuadratureGrid coarse(problem, q.frequency, 1);
    double vc = coarse.dot(coarse.sample(F), F.f1, coarse.sample(G), G.f1);
    for (std::size_t r = 2; r <= 2 * q.max_refine; r *= 2) {
        QuadratureGrid fine(problem, q.frequency, r);
        auto fs = fine.sample(F), gs = fine.sample(G);
        double vf = fine.dot(fs, F.f1, gs, G.f1);
        double scale = std::max(fine.abs_dot(fs, F.f1, gs, G.f1), 1e-300);
        double err = std::abs(vf - vc);
        if (err <= q.tolerance * scale) return {vf, err, r};
        vc = vf;
    }
    throw Error(ErrorCode::quadrature_not_converged,
                "inner product did not settle after refinement " + std::to_string(2 * q.max_refine));
}

inline double h_norm(const HElement& F, const Problem& problem, const QuadratureOptions& q = {}) {
    return std::sqrt(h_inner_product(F, F, problem, q).value);
}

struct GreensIdentityReport {
    double lambda_a = 0.0, lambda_b = 0.0;
    /// |<AF, G> - <F, AG>| / ((|lambda_a| + |lambda_b| + 1) ||F|| ||G||).
    double residual = 0.0;
    double raw_difference = 0.0;
    /// |W(f, g; -1)| relative to |f||g'| + |f'||g| there.
    double left_wronskian = 0.0;
    /// max_i |W(h_i - 0) - delta_i^2 W(h_i + 0)| / (|W(h_i - 0)| + scale).
    double interface_wronskian_max = 0.0;
    /// |R1'(f) R1(g) - R1(f) R1'(g) + rho W(f, g; 1)| relative to its terms.
    double boundary_identity = 0.0;
};

namespace detail {
inline double wronskian(StateVector a, StateVector b) { return a.u * b.du - a.du * b.u; }
inline double wronskian_scale(StateVector a, StateVector b) {
    return std::abs(a.u * b.du) + std::abs(a.du * b.u);
}
}  // namespace detail

/// Relative residual of the boundary-form identity
/// R1'(f) R1(g) - R1(f) R1'(g) = -rho W(f, g; 1) for given end values.
inline double boundary_form_identity_residual(const Problem& problem, StateVector f, StateVector g) {
    double r1f = boundary_form_R1(problem, f), r1g = boundary_form_R1(problem, g);
    double rpf = boundary_form_R1_prime(problem, f), rpg = boundary_form_R1_prime(problem, g);
    double lhs = rpf * r1g - r1f * rpg;
    double rhs = -problem.rho() * detail::wronskian(f, g);
    double scale = std::abs(rpf * r1g) + std::abs(r1f * rpg) + problem.rho() * detail::wronskian_scale(f, g);
    return scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
}

/// Builds F = (phi_a, R1'(phi_a)), G = (phi_b, R1'(phi_b)) and compares
/// <AF, G> with <F, AG>, where A(f, R1'(f)) = (tau f, -R1(f)) and tau phi = lambda phi.
inline GreensIdentityReport greens_identity_residual(const Problem& problem, double lambda_a, double lambda_b,
                                                      const IntegratorOptions& opts = {},
                                                      const QuadratureOptions& quad = {}) {
    GreensIdentityReport rep;
    rep.lambda_a = lambda_a;
    rep.lambda_b = lambda_b;
    PiecewiseSolution fa = shoot_phi(problem, lambda_a, opts, true);
    PiecewiseSolution fb = shoot_phi(problem, lambda_b, opts, true);
    StateVector a1 = value_at_one(fa), b1 = value_at_one(fb);
    double Ra = boundary_form_R1(problem, a1), Rb = boundary_form_R1(problem, b1);
    double Rpa = boundary_form_R1_prime(problem, a1), Rpb = boundary_form_R1_prime(problem, b1);

    QuadratureOptions q = quad;
    q.frequency = std::max(q.frequency, std::sqrt(std::max({lambda_a, lambda_b, 0.0})));
    HElement Fa = element_from_solution(fa, 0.0), Fb = element_from_solution(fb, 0.0);
    double L2 = h_inner_product(Fa, Fb, problem, q).value;
    double sw = problem.delta_product_squared() / problem.rho();
    double AFG = lambda_a * L2 + sw * (-Ra) * Rpb;
    double FAG = lambda_b * L2 + sw * Rpa * (-Rb);
    rep.raw_difference = AFG - FAG;

    HElement Ga = augmented_element(problem, fa), Gb = augmented_element(problem, fb);
    double na = std::sqrt(h_inner_product(Ga, Ga, problem, q).value);
    double nb = std::sqrt(h_inner_product(Gb, Gb, problem, q).value);
    double scale = (std::abs(lambda_a) + std::abs(lambda_b) + 1.0) * na * nb;
    rep.residual = scale > 0.0 ? std::abs(rep.raw_difference) / scale : std::abs(rep.raw_difference);

    StateVector l_a = fa.begin_state(0), l_b = fb.begin_state(0);
    double ls = detail::wronskian_scale(l_a, l_b);
    rep.left_wronskian = ls > 0.0 ? std::abs(detail::wronskian(l_a, l_b)) / ls : 0.0;

    const auto& jumps = problem.spec().jumps;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        StateVector am = fa.end_state(i), bm = fb.end_state(i);
        StateVector ap = fa.begin_state(i + 1), bp = fb.begin_state(i + 1);
        double wm = detail::wronskian(am, bm), wp = detail::wronskian(ap, bp);
        double s = detail::wronskian_scale(am, bm);
        double r = s > 0.0 ? std::abs(wm - jumps[i] * jumps[i] * wp) / s : 0.0;
        rep.interface_wronskian_max = std::max(rep.interface_wronskian_max, r);
    }
    rep.boundary_identity = boundary_form_identity_residual(problem, a1, b1);
    return rep;
}

}  // namespace slmt
