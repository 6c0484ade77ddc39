#pragma once

// Gauss-Legendre rules on [-1, 1] and composite rules built from them.

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace slmt {

struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline GaussLegendreRule compute_gauss_legendre(std::size_t n) {
    if (n == 1) return {{0.0}, {2.0}};
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                double dk = static_cast<double>(k);
                double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
                p0 = p1;
                p1 = p2;
            }
            dp = dn * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            double dk = static_cast<double>(k);
            double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
            p0 = p1;
            p1 = p2;
        }
        dp = dn * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace detail

/// Cached n-point rule; thread-safe.
inline const GaussLegendreRule& gauss_legendre(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<GaussLegendreRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussLegendreRule>(detail::compute_gauss_legendre(n));
    return *slot;
}

template <class F>
double composite_gauss_legendre(F&& f, double a, double b, std::size_t panels, std::size_t order) {
    const auto& rule = gauss_legendre(order);
    const double h = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        double mid = a + (static_cast<double>(p) + 0.5) * h;
        double acc = 0.0;
        for (std::size_t k = 0; k < order; ++k) acc += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
        sum += 0.5 * h * acc;
    }
    return sum;
}

/// Barycentric interpolation through values at the nodes of an n-point
/// Gauss-Legendre rule mapped to [a, b].
class GaussNodeInterpolant {
public:
    explicit GaussNodeInterpolant(std::size_t n) : rule_(&gauss_legendre(n)), bary_(n) {
        const auto& t = rule_->nodes;
        for (std::size_t j = 0; j < n; ++j) {
            double w = 1.0;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) w /= (t[j] - t[k]);
            bary_[j] = w;
        }
    }

    std::size_t size() const noexcept { return bary_.size(); }
    const GaussLegendreRule& rule() const noexcept { return *rule_; }

    /// t in [-1, 1]; values at the rule nodes.
    double operator()(double t, const double* values) const {
        const auto& nodes = rule_->nodes;
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            double d = t - nodes[j];
            if (d == 0.0) return values[j];
            double c = bary_[j] / d;
            num += c * values[j];
            den += c;
        }
        return num / den;
    }

private:
    const GaussLegendreRule* rule_;
    std::vector<double> bary_;
};

}  // namespace slmt
