#pragma once

// Successive approximation for the Volterra form of phi on each subinterval:
//
//   u(x) = u0 cos sX + (du0 / s) sin sX + (1/s) int_a^x sin s(x - y) q(y) u(y) dy,   X = x - a,
//
// restarted at every h_i from the previous piece's end state divided by delta_i.
// Independent of the Runge-Kutta path; used as a cross-check.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "slmt/quadrature.hpp"
#include "slmt/shooting.hpp"

namespace slmt {

struct PicardOptions {
    std::size_t iterations = 30;
    double tolerance = 1e-13;
    std::size_t order = 16;
    /// Panels per unit length per unit of max(|s|, 1); at least 2 per subinterval.
    double panel_density = 1.0;
    bool throw_on_nonconvergence = true;
};

struct PicardResult {
    PiecewiseSolution solution;
    /// Per iteration, max over all subintervals of max|u_new - u_old| / max|u_new|.
    std::vector<double> residuals;
    bool converged = false;
};

namespace detail {

/// Integration matrix: M[i][k] = int_{-1}^{t_i} l_k(t) dt for the Lagrange
/// basis at the Gauss nodes t.
inline const std::vector<std::vector<double>>& gauss_integration_matrix(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::vector<std::vector<double>>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussNodeInterpolant interp(n);
    const auto& r = interp.rule();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    std::vector<double> e(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        std::fill(e.begin(), e.end(), 0.0);
        e[k] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            double ti = r.nodes[i];
            double half = 0.5 * (ti + 1.0), mid = 0.5 * (ti - 1.0);
            double acc = 0.0;
            for (std::size_t g = 0; g < n; ++g) acc += r.weights[g] * interp(mid + half * r.nodes[g], e.data());
            m[i][k] = half * acc;
        }
    }
    return cache.emplace(n, std::move(m)).first->second;
}

/// Converged Picard data on one subinterval, queryable at any x in [a, b].
struct PicardPiece {
    double a = 0.0, b = 0.0, s = 1.0;
    StateVector init;
    std::size_t order = 16;
    std::vector<double> panel_edges;
    std::vector<double> x, qu;    // nodes and q*u at nodes
    std::vector<double> cum_c, cum_s;  // int_a^{panel start} cos(sY) q u, sin(sY) q u

    StateVector eval(double xp) const {
        const double X = xp - a;
        double C = 0.0, S = 0.0;
        if (xp > a) {
            std::size_t p = static_cast<std::size_t>(
                std::upper_bound(panel_edges.begin(), panel_edges.end(), xp) - panel_edges.begin());
            p = std::clamp<std::size_t>(p, 1, panel_edges.size() - 1) - 1;
            C = cum_c[p];
            S = cum_s[p];
            double pa = panel_edges[p], pb = panel_edges[p + 1];
            if (xp > pa) {
                GaussNodeInterpolant interp(order);
                const auto& r = interp.rule();
                const double* vals = qu.data() + p * order;
                double half = 0.5 * (xp - pa), mid = 0.5 * (xp + pa);
                for (std::size_t g = 0; g < order; ++g) {
                    double y = mid + half * r.nodes[g];
                    double t = (2.0 * y - pa - pb) / (pb - pa);
                    double f = interp(t, vals);
                    C += half * r.weights[g] * std::cos(s * (y - a)) * f;
                    S += half * r.weights[g] * std::sin(s * (y - a)) * f;
                }
            }
        }
        double cs = std::cos(s * X), sn = std::sin(s * X);
        double u = init.u * cs + init.du * sn / s + (sn * C - cs * S) / s;
        double du = -s * init.u * sn + init.du * cs + cs * C + sn * S;
        return {u, du};
    }
};

}  // namespace detail

/// Runs `opts.iterations` sweeps (stopping early once the update is below
/// tolerance) on every subinterval in turn. Requires lambda > 0.
inline PicardResult picard_phi(const Problem& problem, double lambda, const PicardOptions& opts = {}) {
    if (!(lambda > 0.0))
        throw Error(ErrorCode::out_of_domain, "Picard iteration needs lambda = s^2 > 0");
    if (opts.iterations == 0) throw Error(ErrorCode::invalid_config, "Picard needs at least one iteration");
    const double s = std::sqrt(lambda);
    const std::size_t n = opts.order;
    const auto& rule = gauss_legendre(n);
    const auto& M = detail::gauss_integration_matrix(n);
    const auto& jumps = problem.spec().jumps;
    const auto& lbc = problem.spec().left_bc;

    PicardResult result;
    std::vector<SolutionSegment> segs;
    StateVector y{lbc.alpha2, -lbc.alpha1};
    std::vector<double> res_per_iter;
    bool all_converged = true;

    for (std::size_t j = 0; j < problem.piece_count(); ++j) {
        if (j > 0) y = (1.0 / jumps[j - 1]) * y;
        auto piece = std::make_shared<detail::PicardPiece>();
        piece->a = problem.piece_begin(j);
        piece->b = problem.piece_end(j);
        piece->s = s;
        piece->init = y;
        piece->order = n;
        const double L = piece->b - piece->a;

        // Panel edges: uniform, plus every non-smooth point of q.
        std::size_t panels = std::max<std::size_t>(
            2, static_cast<std::size_t>(std::ceil(opts.panel_density * L * std::max(s, 1.0))));
        std::vector<double> edges;
        for (std::size_t p = 0; p <= panels; ++p)
            edges.push_back(piece->a + L * static_cast<double>(p) / static_cast<double>(panels));
        for (double bp : problem.potential_breakpoints(j)) edges.push_back(bp);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end(), [](double u, double v) { return std::abs(u - v) < 1e-14; }),
                    edges.end());
        edges.front() = piece->a;
        edges.back() = piece->b;
        piece->panel_edges = edges;
        const std::size_t P = edges.size() - 1;

        std::vector<double>& xs = piece->x;
        xs.resize(P * n);
        std::vector<double> qv(P * n), cs(P * n), sn(P * n);
        for (std::size_t p = 0; p < P; ++p)
            for (std::size_t k = 0; k < n; ++k) {
                double x = edges[p] + 0.5 * (edges[p + 1] - edges[p]) * (rule.nodes[k] + 1.0);
                xs[p * n + k] = x;
                qv[p * n + k] = problem.q(j, x);
                cs[p * n + k] = std::cos(s * (x - piece->a));
                sn[p * n + k] = std::sin(s * (x - piece->a));
            }

        // Zeroth approximation: the q = 0 solution.
        std::vector<double> u(P * n), u_new(P * n);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = y.u * cs[i] + y.du * sn[i] / s;

        std::vector<double> fc(n), fs(n);
        std::vector<double> cum_c(P + 1), cum_s(P + 1);
        std::size_t it = 0;
        bool converged = false;
        for (; it < opts.iterations; ++it) {
            double diff = 0.0, mag = 0.0;
            cum_c[0] = cum_s[0] = 0.0;
            for (std::size_t p = 0; p < P; ++p) {
                double half = 0.5 * (edges[p + 1] - edges[p]);
                double tc = 0.0, ts = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    std::size_t i = p * n + k;
                    fc[k] = cs[i] * qv[i] * u[i];
                    fs[k] = sn[i] * qv[i] * u[i];
                    tc += rule.weights[k] * fc[k];
                    ts += rule.weights[k] * fs[k];
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double C = cum_c[p], S = cum_s[p];
                    for (std::size_t l = 0; l < n; ++l) {
                        C += half * M[k][l] * fc[l];
                        S += half * M[k][l] * fs[l];
                    }
                    std::size_t i = p * n + k;
                    u_new[i] = y.u * cs[i] + y.du * sn[i] / s + (sn[i] * C - cs[i] * S) / s;
                    diff = std::max(diff, std::abs(u_new[i] - u[i]));
                    mag = std::max(mag, std::abs(u_new[i]));
                }
                cum_c[p + 1] = cum_c[p] + half * tc;
                cum_s[p + 1] = cum_s[p] + half * ts;
            }
            u.swap(u_new);
            double r = mag > 0.0 ? diff / mag : diff;
            if (res_per_iter.size() <= it) res_per_iter.resize(it + 1, 0.0);
            res_per_iter[it] = std::max(res_per_iter[it], r);
            if (r <= opts.tolerance) {
                converged = true;
                ++it;
                break;
            }
        }
        all_converged = all_converged && converged;

        // Freeze q*u from the final iterate; cumulative sums must match it.
        piece->qu.resize(P * n);
        for (std::size_t i = 0; i < u.size(); ++i) piece->qu[i] = qv[i] * u[i];
        piece->cum_c.assign(P + 1, 0.0);
        piece->cum_s.assign(P + 1, 0.0);
        for (std::size_t p = 0; p < P; ++p) {
            double half = 0.5 * (edges[p + 1] - edges[p]);
            double tc = 0.0, ts = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                std::size_t i = p * n + k;
                tc += rule.weights[k] * cs[i] * piece->qu[i];
                ts += rule.weights[k] * sn[i] * piece->qu[i];
            }
            piece->cum_c[p + 1] = piece->cum_c[p] + half * tc;
            piece->cum_s[p + 1] = piece->cum_s[p] + half * ts;
        }

        SolutionSegment seg;
        seg.a = piece->a;
        seg.b = piece->b;
        seg.begin = y;
        seg.end = piece->eval(piece->b);
        seg.eval = [piece](double x) { return piece->eval(x); };
        y = seg.end;
        segs.push_back(std::move(seg));
    }

    result.solution = PiecewiseSolution(SolutionKind::phi, Direction::left_to_right, lambda, std::move(segs));
    result.residuals = std::move(res_per_iter);
    result.converged = all_converged;
    if (!all_converged && opts.throw_on_nonconvergence)
        throw Error(ErrorCode::non_convergence,
                    "Picard update still " + std::to_string(result.residuals.back()) + " after " +
                        std::to_string(opts.iterations) + " iterations");
    return result;
}

}  // namespace slmt
