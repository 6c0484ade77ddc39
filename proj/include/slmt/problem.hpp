#pragma once

// Problem definition: the potential, the interface points with their jump
// factors, and the two boundary conditions
//
//   -u'' + q u = lambda u                         on the open subintervals,
//   alpha1 u(-1) + alpha2 u'(-1) = 0,
//   (beta1' lambda + beta1) u(1) - (beta2' lambda + beta2) u'(1) = 0,
//   u(h_i - 0) = delta_i u(h_i + 0),  u'(h_i - 0) = delta_i u'(h_i + 0).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "slmt/error.hpp"
#include "slmt/quadrature.hpp"

namespace slmt {

/// Which one-sided value to take when x sits on an interface point.
enum class Side { left, right, interior };

struct ConstantPiece {
    double value = 0.0;
};

/// Power-basis coefficients in the global coordinate x: c0 + c1 x + c2 x^2 + ...
struct PolynomialPiece {
    std::vector<double> coefficients;
};

/// Linear interpolation through (x[i], q[i]); x strictly increasing.
struct SampledPiece {
    std::vector<double> x;
    std::vector<double> q;
};

/// Smooth compactly supported bump, peak value `amplitude` at `center`.
struct BumpPiece {
    double center = 0.0;
    double width = 1.0;
    double amplitude = 1.0;
};

using FunctionPiece = std::variant<ConstantPiece, PolynomialPiece, SampledPiece, BumpPiece>;

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline double eval_sampled(const SampledPiece& p, double x) {
    const auto& xs = p.x;
    if (x <= xs.front()) return p.q.front();
    if (x >= xs.back()) return p.q.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return p.q[i] + t * (p.q[i + 1] - p.q[i]);
}

inline double eval_bump(const BumpPiece& p, double x) {
    double r = (x - p.center) / p.width;
    if (std::abs(r) >= 1.0) return 0.0;
    return p.amplitude * std::exp(1.0 - 1.0 / (1.0 - r * r));
}

}  // namespace detail

inline double evaluate_piece(const FunctionPiece& piece, double x) {
    return std::visit(
        detail::overloaded{
            [](const ConstantPiece& p) { return p.value; },
            [x](const PolynomialPiece& p) {
                double acc = 0.0;
                for (auto c = p.coefficients.rbegin(); c != p.coefficients.rend(); ++c)
                    acc = acc * x + *c;
                return acc;
            },
            [x](const SampledPiece& p) { return detail::eval_sampled(p, x); },
            [x](const BumpPiece& p) { return detail::eval_bump(p, x); },
        },
        piece);
}

/// Points strictly inside (a, b) where the piece is not smooth.
inline std::vector<double> piece_breakpoints(const FunctionPiece& piece, double a, double b) {
    std::vector<double> out;
    if (const auto* s = std::get_if<SampledPiece>(&piece)) {
        for (double x : s->x)
            if (x > a && x < b) out.push_back(x);
    } else if (const auto* bp = std::get_if<BumpPiece>(&piece)) {
        for (double x : {bp->center - bp->width, bp->center + bp->width})
            if (x > a && x < b) out.push_back(x);
    }
    return out;
}

struct IntegralEstimate {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Integral of a piece over [a, b]. Exact for constant, polynomial and
/// sampled (linear interpolant) pieces; composite Gauss-Legendre for bumps.
inline IntegralEstimate integrate_piece(const FunctionPiece& piece, double a, double b) {
    return std::visit(
        detail::overloaded{
            [&](const ConstantPiece& p) { return IntegralEstimate{p.value * (b - a), 0.0}; },
            [&](const PolynomialPiece& p) {
                double acc = 0.0;
                double pa = a, pb = b;
                for (std::size_t k = 0; k < p.coefficients.size(); ++k) {
                    acc += p.coefficients[k] * (pb - pa) / static_cast<double>(k + 1);
                    pa *= a;
                    pb *= b;
                }
                return IntegralEstimate{acc, 0.0};
            },
            [&](const SampledPiece& p) {
                std::vector<double> knots{a};
                for (double x : p.x)
                    if (x > a && x < b) knots.push_back(x);
                knots.push_back(b);
                double acc = 0.0;
                for (std::size_t i = 0; i + 1 < knots.size(); ++i)
                    acc += 0.5 * (knots[i + 1] - knots[i]) *
                           (detail::eval_sampled(p, knots[i]) + detail::eval_sampled(p, knots[i + 1]));
                return IntegralEstimate{acc, 0.0};
            },
            [&](const BumpPiece& p) {
                double lo = std::max(a, p.center - p.width);
                double hi = std::min(b, p.center + p.width);
                if (hi <= lo) return IntegralEstimate{0.0, 0.0};
                auto f = [&p](double x) { return detail::eval_bump(p, x); };
                double coarse = composite_gauss_legendre(f, lo, hi, 32, 16);
                double fine = composite_gauss_legendre(f, lo, hi, 64, 16);
                return IntegralEstimate{fine, std::abs(fine - coarse)};
            },
        },
        piece);
}

/// Upper bound on |piece| over [a, b].
inline double piece_abs_bound(const FunctionPiece& piece, double a, double b) {
    return std::visit(
        detail::overloaded{
            [](const ConstantPiece& p) { return std::abs(p.value); },
            [&](const PolynomialPiece& p) {
                double r = std::max(std::abs(a), std::abs(b));
                double acc = 0.0, rk = 1.0;
                for (double c : p.coefficients) {
                    acc += std::abs(c) * rk;
                    rk *= r;
                }
                return acc;
            },
            [](const SampledPiece& p) {
                double m = 0.0;
                for (double v : p.q) m = std::max(m, std::abs(v));
                return m;
            },
            [](const BumpPiece& p) { return std::abs(p.amplitude); },
        },
        piece);
}

/// Either one piece used on every subinterval, or exactly one piece per subinterval.
struct PiecewiseFunction {
    std::vector<FunctionPiece> pieces;

    static PiecewiseFunction constant(double c) { return {{ConstantPiece{c}}}; }
};

struct LeftBoundary {
    double alpha1 = 1.0;
    double alpha2 = 0.0;
};

struct RightBoundary {
    double beta1 = 0.0;
    double beta2 = 1.0;
    double beta1_prime = 1.0;
    double beta2_prime = 0.0;
};

struct ProblemSpec {
    PiecewiseFunction potential = PiecewiseFunction::constant(0.0);
    std::vector<double> interfaces;
    std::vector<double> jumps;
    LeftBoundary left_bc;
    RightBoundary right_bc;
};

/// A ProblemSpec that passed validation, with the derived constants cached.
/// Immutable after construction.
class Problem {
public:
    explicit Problem(ProblemSpec spec) : spec_(std::move(spec)) { validate_and_cache(); }

    const ProblemSpec& spec() const noexcept { return spec_; }
    std::size_t interface_count() const noexcept { return spec_.interfaces.size(); }
    std::size_t piece_count() const noexcept { return spec_.interfaces.size() + 1; }

    double rho() const noexcept { return rho_; }
    /// w_1 = 1, w_{j+1} = w_j delta_j^2.
    std::span<const double> weights() const noexcept { return weights_; }
    double delta_product() const noexcept { return delta_product_; }
    double delta_product_squared() const noexcept { return weights_.back(); }
    /// Prefix products prod_{i<j} delta_i, one per subinterval.
    std::span<const double> delta_prefix() const noexcept { return delta_prefix_; }
    /// -1, h_1, ..., h_m, 1.
    std::span<const double> nodes() const noexcept { return nodes_; }
    double piece_begin(std::size_t j) const { return nodes_[j]; }
    double piece_end(std::size_t j) const { return nodes_[j + 1]; }

    double q(std::size_t piece, double x) const { return evaluate_piece(potential_piece(piece), x); }
    const FunctionPiece& potential_piece(std::size_t j) const {
        const auto& pp = spec_.potential.pieces;
        return pp.size() == 1 ? pp.front() : pp[j];
    }
    /// Non-smooth points of q strictly inside subinterval j.
    std::span<const double> potential_breakpoints(std::size_t j) const { return breakpoints_[j]; }
    double potential_bound() const noexcept { return q_bound_; }

    /// Subinterval containing x; on an interface the side picks h-0 (left) or h+0 (right).
    std::size_t locate(double x, Side side) const {
        if (!(x >= -1.0 && x <= 1.0))
            throw Error(ErrorCode::out_of_domain, "x = " + std::to_string(x) + " outside [-1, 1]");
        const auto& h = spec_.interfaces;
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (x == h[i]) {
                if (side == Side::left) return i;
                if (side == Side::right) return i + 1;
                throw Error(ErrorCode::out_of_domain,
                            "x = " + std::to_string(x) + " is an interface point; pick a side");
            }
            if (x < h[i]) return i;
        }
        return h.size();
    }

private:
    void validate_and_cache() {
        const auto& s = spec_;
        if (s.left_bc.alpha1 == 0.0 && s.left_bc.alpha2 == 0.0)
            throw Error(ErrorCode::degenerate_left_bc, "alpha1 = alpha2 = 0");
        const auto& r = s.right_bc;
        rho_ = r.beta1_prime * r.beta2 - r.beta1 * r.beta2_prime;
        if (!(rho_ > 0.0))
            throw Error(ErrorCode::rho_not_positive,
                        "rho = beta1' beta2 - beta1 beta2' = " + std::to_string(rho_) + " must be > 0");
        if (s.jumps.size() != s.interfaces.size())
            throw Error(ErrorCode::unordered_interfaces, "need one jump factor per interface");
        for (std::size_t i = 0; i < s.interfaces.size(); ++i) {
            double h = s.interfaces[i];
            if (!(h > -1.0 && h < 1.0))
                throw Error(ErrorCode::unordered_interfaces,
                            "interface " + std::to_string(i) + " = " + std::to_string(h) + " not in (-1, 1)");
            if (i > 0 && !(h > s.interfaces[i - 1]))
                throw Error(ErrorCode::unordered_interfaces, "interfaces must be strictly increasing");
        }
        for (std::size_t i = 0; i < s.jumps.size(); ++i)
            if (s.jumps[i] == 0.0 || !std::isfinite(s.jumps[i]))
                throw Error(ErrorCode::zero_jump_factor, "delta_" + std::to_string(i + 1) + " = 0");

        const std::size_t pieces = s.interfaces.size() + 1;
        nodes_.assign(1, -1.0);
        nodes_.insert(nodes_.end(), s.interfaces.begin(), s.interfaces.end());
        nodes_.push_back(1.0);

        weights_.assign(pieces, 1.0);
        delta_prefix_.assign(pieces, 1.0);
        for (std::size_t i = 0; i < s.jumps.size(); ++i) {
            weights_[i + 1] = weights_[i] * s.jumps[i] * s.jumps[i];
            delta_prefix_[i + 1] = delta_prefix_[i] * s.jumps[i];
        }
        delta_product_ = delta_prefix_.back();

        const auto& pp = s.potential.pieces;
        if (pp.size() != 1 && pp.size() != pieces)
            throw Error(ErrorCode::invalid_potential,
                        "potential needs 1 or " + std::to_string(pieces) + " pieces, got " +
                            std::to_string(pp.size()));
        breakpoints_.clear();
        q_bound_ = 0.0;
        for (std::size_t j = 0; j < pieces; ++j) {
            const FunctionPiece& piece = pp.size() == 1 ? pp.front() : pp[j];
            check_piece(piece, nodes_[j], nodes_[j + 1], j);
            breakpoints_.push_back(piece_breakpoints(piece, nodes_[j], nodes_[j + 1]));
            q_bound_ = std::max(q_bound_, piece_abs_bound(piece, nodes_[j], nodes_[j + 1]));
        }
    }

    static void check_piece(const FunctionPiece& piece, double a, double b, std::size_t j) {
        auto fail = [j](const std::string& msg) {
            throw Error(ErrorCode::invalid_potential, "piece " + std::to_string(j) + ": " + msg);
        };
        if (const auto* sp = std::get_if<SampledPiece>(&piece)) {
            if (sp->x.size() < 2 || sp->x.size() != sp->q.size()) fail("sampled piece needs >= 2 matching (x, q) samples");
            for (std::size_t i = 1; i < sp->x.size(); ++i)
                if (!(sp->x[i] > sp->x[i - 1])) fail("sample abscissae must be strictly increasing");
            if (sp->x.front() > a || sp->x.back() < b) fail("samples do not cover the subinterval");
            for (double v : sp->q)
                if (!std::isfinite(v)) fail("non-finite sample");
        } else if (const auto* bp = std::get_if<BumpPiece>(&piece)) {
            if (!(bp->width > 0.0)) fail("bump width must be positive");
        } else if (const auto* cp = std::get_if<ConstantPiece>(&piece)) {
            if (!std::isfinite(cp->value)) fail("non-finite constant");
        }
    }

    ProblemSpec spec_;
    double rho_ = 0.0;
    double delta_product_ = 1.0;
    double q_bound_ = 0.0;
    std::vector<double> weights_;
    std::vector<double> delta_prefix_;
    std::vector<double> nodes_;
    std::vector<std::vector<double>> breakpoints_;
};

inline Problem validate_problem(ProblemSpec spec) { return Problem(std::move(spec)); }

enum class AsymptoticCase { case1, case2, case3, case4 };

inline std::string_view to_string(AsymptoticCase c) {
    switch (c) {
        case AsymptoticCase::case1: return "Case1";
        case AsymptoticCase::case2: return "Case2";
        case AsymptoticCase::case3: return "Case3";
        case AsymptoticCase::case4: return "Case4";
    }
    return "?";
}

struct CaseClassification {
    AsymptoticCase which;
    bool beta2_prime_nonzero;
    bool alpha2_nonzero;
};

/// Case table: beta2' != 0 selects cases 1-2, alpha2 != 0 selects cases 1, 3.
inline CaseClassification classify_case(const Problem& problem, double zero_tol = 0.0) {
    bool b = std::abs(problem.spec().right_bc.beta2_prime) > zero_tol;
    bool a = std::abs(problem.spec().left_bc.alpha2) > zero_tol;
    AsymptoticCase c = b ? (a ? AsymptoticCase::case1 : AsymptoticCase::case2)
                         : (a ? AsymptoticCase::case3 : AsymptoticCase::case4);
    return {c, b, a};
}

inline double evaluate_potential(const Problem& problem, double x, Side side = Side::interior) {
    return problem.q(problem.locate(x, side), x);
}

struct PotentialMoments {
    double I0 = 0.0;
    double error_estimate = 0.0;
};

/// I0 = integral of q over [-1, 1].
inline PotentialMoments potential_moments(const Problem& problem) {
    PotentialMoments m;
    for (std::size_t j = 0; j < problem.piece_count(); ++j) {
        auto est = integrate_piece(problem.potential_piece(j), problem.piece_begin(j), problem.piece_end(j));
        m.I0 += est.value;
        m.error_estimate += est.error_estimate;
    }
    return m;
}

}  // namespace slmt
