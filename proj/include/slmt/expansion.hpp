#pragma once

// Orthogonality and eigenfunction expansion checks in H.

#include <algorithm>
#include <cmath>
#include <vector>

#include "slmt/eigensolve.hpp"

namespace slmt {

namespace detail {
inline double max_frequency(const std::vector<Eigenpair>& eigs) {
    double f = 0.0;
    for (const auto& e : eigs) f = std::max(f, e.frequency());
    return f;
}
}  // namespace detail

/// Row-major N x N matrix.
struct Matrix {
    std::size_t n = 0;
    std::vector<double> data;
    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }

    double max_off_diagonal() const {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }
    double max_diagonal_error() const {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs((*this)(i, i) - 1.0));
        return m;
    }
};

/// G_ij = <Phi_i, Phi_j> with Phi_n = (phi_n, R1'(phi_n)), on one grid fine
/// enough for the fastest eigenfunction (refined once further).
inline Matrix gram_matrix(const std::vector<Eigenpair>& eigs, const Problem& problem, std::size_t refine = 2) {
    QuadratureGrid grid(problem, detail::max_frequency(eigs), refine);
    std::vector<std::vector<double>> v(eigs.size());
    detail::parallel_for(eigs.size(), [&](std::size_t i) { v[i] = grid.sample(eigenvector(eigs[i])); });
    Matrix g{eigs.size(), std::vector<double>(eigs.size() * eigs.size())};
    for (std::size_t i = 0; i < eigs.size(); ++i)
        for (std::size_t j = i; j < eigs.size(); ++j)
            g(i, j) = g(j, i) = grid.dot(v[i], eigs[i].f1, v[j], eigs[j].f1);
    return g;
}

struct ExpansionResult {
    std::vector<double> coefficients;
    /// residuals[N-1] = ||F - S_N||_H.
    std::vector<double> residuals;
    double norm2 = 0.0;
    /// Partial sums of c_n^2.
    std::vector<double> parseval;

    /// Largest increase between consecutive residuals (0 when monotone).
    double max_increase() const {
        double m = 0.0;
        for (std::size_t i = 1; i < residuals.size(); ++i) m = std::max(m, residuals[i] - residuals[i - 1]);
        return m;
    }
};

/// c_n = <F, Phi_n>, S_N = sum_{n<N} c_n Phi_n, and ||F - S_N|| for every N,
/// measured directly on the grid.
inline ExpansionResult expand(const HElement& F, const std::vector<Eigenpair>& eigs, const Problem& problem,
                              double target_frequency = 0.0, std::size_t refine = 2) {
    QuadratureGrid grid(problem, std::max(detail::max_frequency(eigs), target_frequency), refine);
    std::vector<std::vector<double>> v(eigs.size());
    detail::parallel_for(eigs.size(), [&](std::size_t i) { v[i] = grid.sample(eigenvector(eigs[i])); });
    const auto f = grid.sample(F);

    ExpansionResult out;
    out.norm2 = grid.dot(f, F.f1, f, F.f1);
    std::vector<double> r = f;
    double r1 = F.f1, psum = 0.0;
    for (std::size_t n = 0; n < eigs.size(); ++n) {
        double c = grid.dot(f, F.f1, v[n], eigs[n].f1);
        out.coefficients.push_back(c);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * v[n][i];
        r1 -= c * eigs[n].f1;
        out.residuals.push_back(std::sqrt(std::max(0.0, grid.dot(r, r1, r, r1))));
        psum += c * c;
        out.parseval.push_back(psum);
    }
    return out;
}

}  // namespace slmt
