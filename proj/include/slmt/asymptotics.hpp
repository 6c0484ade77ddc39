#pragma once

// Large-s behaviour of omega, of the eigenvalues s_n = sqrt(lambda_n) and of
// the eigenfunctions, in the four boundary-condition cases.
//
// Two variants of the closed forms are provided. `printed` reproduces the
// published coefficients literally. `corrected` (the default) uses what the
// shooting definitions actually give: phi on the last subinterval is the
// continuous-problem solution divided by prod delta_i, so omega carries one
// factor of prod delta_i (not its square), the mean-value term is I0 / 2 with
// no delta factor, and the Case 2 leading term and I0 sign are flipped.
// For prod delta_i = 1 the variants differ only in Case 2.

#include <cmath>
#include <numbers>
#include <string>

#include "slmt/problem.hpp"

namespace slmt {

enum class FormulaVariant { corrected, printed };

inline std::string_view to_string(FormulaVariant v) { return v == FormulaVariant::printed ? "printed" : "corrected"; }

/// Leading term of omega(s^2).
inline double leading_omega(const Problem& problem, double s, FormulaVariant v = FormulaVariant::corrected) {
    const auto& l = problem.spec().left_bc;
    const auto& r = problem.spec().right_bc;
    const double P = v == FormulaVariant::printed ? problem.delta_product_squared() : problem.delta_product();
    switch (classify_case(problem).which) {
        case AsymptoticCase::case1: return r.beta2_prime * l.alpha2 * s * s * s * P * std::sin(2.0 * s);
        case AsymptoticCase::case2: {
            double sign = v == FormulaVariant::printed ? -1.0 : 1.0;
            return sign * r.beta2_prime * l.alpha1 * s * s * P * std::cos(2.0 * s);
        }
        case AsymptoticCase::case3: return r.beta1_prime * l.alpha2 * s * s * P * std::cos(2.0 * s);
        case AsymptoticCase::case4: return -r.beta1_prime * l.alpha1 * s * P * std::sin(2.0 * s);
    }
    return 0.0;
}

enum class EstimateOrder { first, second };

struct EigenvalueEstimate {
    AsymptoticCase which = AsymptoticCase::case4;
    int n = 0;
    FormulaVariant variant = FormulaVariant::corrected;
    double first_order = 0.0;
    double second_order = 0.0;
    /// Bracketed coefficient c, so that second_order = first_order + c / denominator.
    double correction = 0.0;
    double denominator = 0.0;
    double bc_ratio = 0.0;       // beta1'/beta2' (cases 1-2) or beta2/beta1' (cases 3-4)
    double alpha_ratio = 0.0;    // alpha1/alpha2 (cases 1, 3), else 0
    double mean_term = 0.0;      // I0 / 2 (corrected) or I0 / (2 prod delta) (printed)

    double value(EstimateOrder o) const { return o == EstimateOrder::first ? first_order : second_order; }
};

/// Offset of the first-order formula, s_n = pi (n - offset) / 2.
inline double first_order_offset(AsymptoticCase c) {
    switch (c) {
        case AsymptoticCase::case1: return 1.0;
        case AsymptoticCase::case2:
        case AsymptoticCase::case3: return 0.5;
        case AsymptoticCase::case4: return 0.0;
    }
    return 0.0;
}

inline double first_order_s(AsymptoticCase c, double n) { return std::numbers::pi * (n - first_order_offset(c)) / 2.0; }

inline EigenvalueEstimate eigenvalue_estimate(const Problem& problem, int n,
                                              FormulaVariant v = FormulaVariant::corrected, double I0 = NAN) {
    const auto& l = problem.spec().left_bc;
    const auto& r = problem.spec().right_bc;
    EigenvalueEstimate e;
    e.which = classify_case(problem).which;
    e.n = n;
    e.variant = v;
    if (std::isnan(I0)) I0 = potential_moments(problem).I0;
    e.mean_term = v == FormulaVariant::printed ? I0 / (2.0 * problem.delta_product()) : I0 / 2.0;
    const double pi = std::numbers::pi;
    const double off = first_order_offset(e.which);
    e.first_order = pi * (n - off) / 2.0;
    e.denominator = pi * (n - off);

    auto need_alpha2 = [&] {
        if (l.alpha2 == 0.0) throw Error(ErrorCode::undefined_ratio, "alpha1/alpha2 with alpha2 = 0");
        return l.alpha1 / l.alpha2;
    };
    switch (e.which) {
        case AsymptoticCase::case1:
            e.bc_ratio = r.beta1_prime / r.beta2_prime;
            e.alpha_ratio = need_alpha2();
            e.correction = -(e.bc_ratio + e.alpha_ratio - e.mean_term);
            break;
        case AsymptoticCase::case2:
            e.bc_ratio = r.beta1_prime / r.beta2_prime;
            e.correction = v == FormulaVariant::printed ? -(e.bc_ratio + e.mean_term) : -(e.bc_ratio - e.mean_term);
            break;
        case AsymptoticCase::case3:
            if (r.beta1_prime == 0.0) throw Error(ErrorCode::undefined_ratio, "beta2/beta1' with beta1' = 0");
            e.bc_ratio = r.beta2 / r.beta1_prime;
            e.alpha_ratio = need_alpha2();
            e.correction = e.bc_ratio - e.alpha_ratio + e.mean_term;
            break;
        case AsymptoticCase::case4:
            if (r.beta1_prime == 0.0) throw Error(ErrorCode::undefined_ratio, "beta2/beta1' with beta1' = 0");
            e.bc_ratio = r.beta2 / r.beta1_prime;
            e.correction = e.bc_ratio + e.mean_term;
            break;
    }
    if (e.denominator == 0.0)
        throw Error(ErrorCode::undefined_ratio, "index n = " + std::to_string(n) + " makes the correction singular");
    e.second_order = e.first_order + e.correction / e.denominator;
    return e;
}

/// Formula index whose first-order value is nearest to s.
inline int nearest_formula_index(AsymptoticCase c, double s) {
    return static_cast<int>(std::lround(2.0 * s / std::numbers::pi + first_order_offset(c)));
}

/// Leading term of phi(x, lambda_n) on the subinterval containing x
/// (use `side` on an interface).
inline double eigenfunction_estimate(const Problem& problem, int n, double x, Side side = Side::interior) {
    const std::size_t j = problem.locate(x, side);
    const double prefix = problem.delta_prefix()[j];
    const auto& l = problem.spec().left_bc;
    const auto c = classify_case(problem).which;
    const double k = std::numbers::pi * (n - first_order_offset(c));
    const double arg = k * (x + 1.0) / 2.0;
    switch (c) {
        case AsymptoticCase::case1:
        case AsymptoticCase::case3: return l.alpha2 / prefix * std::cos(arg);
        case AsymptoticCase::case2:
        case AsymptoticCase::case4:
            if (k == 0.0) throw Error(ErrorCode::undefined_ratio, "index n = " + std::to_string(n) + " is singular");
            return -2.0 * l.alpha1 / (prefix * k) * std::sin(arg);
    }
    return 0.0;
}

}  // namespace slmt
