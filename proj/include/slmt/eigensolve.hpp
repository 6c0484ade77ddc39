#pragma once

// Eigenvalues as zeros of omega: sign-change scan, Brent refinement,
// enumeration with completeness and simplicity checks, normalization in H.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <thread>
#include <vector>

#include "slmt/asymptotics.hpp"
#include "slmt/characteristic.hpp"
#include "slmt/hilbert.hpp"

namespace slmt {

namespace detail {

/// Runs body(i) for i in [0, n) on up to hardware_concurrency threads.
/// Results must be written to per-index slots; exceptions are rethrown
/// for the lowest failing index.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace detail

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
};

/// A local minimum of |omega| on the scan grid with no sign change nearby.
struct SuspiciousMinimum {
    double lambda = 0.0;
    double omega = 0.0;
    double local_scale = 0.0;
};

struct ScanSample {
    double lambda;
    double omega;
};

struct ScanResult {
    std::vector<Bracket> brackets;
    std::vector<SuspiciousMinimum> suspicious;
    std::vector<ScanSample> samples;
    double lambda_floor = 0.0;
    double s_max = 0.0;
    bool floor_verified = false;
    std::size_t floor_doublings = 0;
};

/// -(2 max|q| + (|alpha1| / max(|alpha2|, 1) + |beta1| + |beta2| + |beta1'| + |beta2'|)^2 + 10).
inline double default_lambda_floor(const Problem& problem) {
    const auto& l = problem.spec().left_bc;
    const auto& r = problem.spec().right_bc;
    double c = std::abs(l.alpha1) / std::max(std::abs(l.alpha2), 1.0) + std::abs(r.beta1) + std::abs(r.beta2) +
               std::abs(r.beta1_prime) + std::abs(r.beta2_prime);
    return -(2.0 * problem.potential_bound() + c * c + 10.0);
}

struct ScanOptions {
    double s_step = std::numbers::pi / 8.0;
    double lambda_step = 0.25;
    std::size_t min_negative_points = 32;
    /// Dips of |omega| below this fraction of the neighbouring values are rescanned.
    double dip_rescan_ratio = 0.1;
    /// A dip still below this fraction after rescanning is reported as suspicious.
    double suspicious_ratio = 1e-6;
    std::size_t rescan_factor = 10;
    std::size_t max_floor_doublings = 20;
    std::size_t threads = 0;
};

/// Scan of a generic scalar function on an ordered grid, with dip rescans.
template <class F>
void scan_grid(F&& f, const std::vector<double>& grid, const ScanOptions& so, ScanResult& out,
               const std::vector<double>* precomputed = nullptr) {
    std::vector<double> v(grid.size());
    if (precomputed)
        v = *precomputed;
    else
        detail::parallel_for(grid.size(), [&](std::size_t i) { v[i] = f(grid[i]); }, so.threads);
    for (std::size_t i = 0; i < grid.size(); ++i) out.samples.push_back({grid[i], v[i]});

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (v[i] == 0.0) {
            out.brackets.push_back({grid[i], grid[i], 0.0, 0.0});
            continue;
        }
        if (detail::sign_of(v[i]) * detail::sign_of(v[i + 1]) < 0)
            out.brackets.push_back({grid[i], grid[i + 1], v[i], v[i + 1]});
    }
    if (!grid.empty() && v.back() == 0.0) out.brackets.push_back({grid.back(), grid.back(), 0.0, 0.0});

    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        double a = std::abs(v[i - 1]), b = std::abs(v[i]), c = std::abs(v[i + 1]);
        if (!(b < a && b < c) || b == 0.0) continue;
        if (detail::sign_of(v[i - 1]) != detail::sign_of(v[i]) || detail::sign_of(v[i]) != detail::sign_of(v[i + 1]))
            continue;
        double scale = std::max(a, c);
        if (b > so.dip_rescan_ratio * scale) continue;
        // Finer look at [x_{i-1}, x_{i+1}].
        const std::size_t k = 2 * so.rescan_factor;
        std::vector<double> fx(k + 1), fv(k + 1);
        for (std::size_t t = 0; t <= k; ++t)
            fx[t] = grid[i - 1] + (grid[i + 1] - grid[i - 1]) * static_cast<double>(t) / static_cast<double>(k);
        fv.front() = v[i - 1];
        fv.back() = v[i + 1];
        for (std::size_t t = 1; t < k; ++t) fv[t] = f(fx[t]);
        bool found = false;
        double fmin = b, xmin = grid[i];
        for (std::size_t t = 0; t < k; ++t) {
            if (std::abs(fv[t]) < fmin) {
                fmin = std::abs(fv[t]);
                xmin = fx[t];
            }
            if (fv[t] == 0.0 && t > 0) {
                out.brackets.push_back({fx[t], fx[t], 0.0, 0.0});
                found = true;
            } else if (detail::sign_of(fv[t]) * detail::sign_of(fv[t + 1]) < 0) {
                out.brackets.push_back({fx[t], fx[t + 1], fv[t], fv[t + 1]});
                found = true;
            }
        }
        if (!found && fmin < so.suspicious_ratio * scale) out.suspicious.push_back({xmin, fmin, scale});
    }
    std::sort(out.brackets.begin(), out.brackets.end(), [](const Bracket& x, const Bracket& y) { return x.lo < y.lo; });
}

/// Grid uniform in lambda on [lambda_floor, 0) and uniform in s on [0, s_max].
inline std::vector<double> scan_lambda_grid(double lambda_floor, double s_max, const ScanOptions& so) {
    std::vector<double> g;
    if (lambda_floor < 0.0) {
        std::size_t n = std::max(so.min_negative_points,
                                 static_cast<std::size_t>(std::ceil(-lambda_floor / so.lambda_step)));
        for (std::size_t i = 0; i < n; ++i)
            g.push_back(lambda_floor - lambda_floor * static_cast<double>(i) / static_cast<double>(n));
    }
    std::size_t ns = static_cast<std::size_t>(std::ceil(s_max / so.s_step));
    ns = std::max<std::size_t>(ns, 1);
    for (std::size_t i = 0; i <= ns; ++i) {
        double s = s_max * static_cast<double>(i) / static_cast<double>(ns);
        g.push_back(s * s);
    }
    return g;
}

/// Sign-change brackets of omega on [lambda_floor, s_max^2]. The floor is
/// accepted once omega keeps one sign on [2 lambda_floor, lambda_floor];
/// otherwise it is doubled.
inline ScanResult bracket_scan(const Problem& problem, double s_max, std::optional<double> lambda_floor = {},
                               const IntegratorOptions& opts = {}, const ScanOptions& so = {}) {
    if (!(s_max > 0.0)) throw Error(ErrorCode::invalid_config, "s_max must be positive");
    auto f = [&](double l) { return omega(problem, l, opts); };
    double floor = lambda_floor ? *lambda_floor : default_lambda_floor(problem);
    if (floor > 0.0) floor = 0.0;

    ScanResult out;
    out.s_max = s_max;
    for (std::size_t d = 0; d <= so.max_floor_doublings; ++d) {
        if (floor == 0.0) {
            out.floor_verified = false;
            break;
        }
        ScanResult probe;
        std::vector<double> g;
        std::size_t n = std::max(so.min_negative_points,
                                 static_cast<std::size_t>(std::ceil(-floor / so.lambda_step)));
        for (std::size_t i = 0; i <= n; ++i)
            g.push_back(2.0 * floor - floor * static_cast<double>(i) / static_cast<double>(n));
        scan_grid(f, g, so, probe);
        if (probe.brackets.empty() && probe.suspicious.empty()) {
            out.floor_verified = true;
            out.floor_doublings = d;
            break;
        }
        floor *= 2.0;
    }
    out.lambda_floor = floor;
    scan_grid(f, scan_lambda_grid(floor, s_max, so), so, out);
    return out;
}

struct RootOptions {
    /// Stop once the bracket is below rel_tol * max(1, |lambda|).
    double rel_tol = 1e-12;
    std::size_t max_iterations = 200;
};

/// Brent's method on a sign-change bracket of a generic function.
template <class F>
double refine_root(F&& f, const Bracket& br, const RootOptions& ro = {}) {
    if (br.lo == br.hi) return br.lo;
    double a = br.lo, b = br.hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (detail::sign_of(fa) == detail::sign_of(fb))
        throw Error(ErrorCode::lost_bracket, "no sign change on [" + std::to_string(a) + ", " + std::to_string(b) +
                                                 "] after re-evaluation");
    double c = a, fc = fa, d = b - a, e = d;
    for (std::size_t it = 0; it < ro.max_iterations; ++it) {
        if (detail::sign_of(fb) == detail::sign_of(fc)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 0.5 * ro.rel_tol * std::max(1.0, std::abs(b));
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            else
                p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if (!std::isfinite(fb)) throw Error(ErrorCode::lost_bracket, "non-finite function value during refinement");
    }
    return b;
}

inline double refine_root(const Problem& problem, const Bracket& br, const IntegratorOptions& opts = {},
                          const RootOptions& ro = {}) {
    return refine_root([&](double l) { return omega(problem, l, opts); }, br, ro);
}

struct KRatio {
    double k = 0.0;
    /// ||chi - k phi||_w / ||chi||_w.
    double spread = 0.0;
};

/// Weighted least-squares k with chi ~ k phi on the quadrature grid.
inline KRatio k_ratio(const Problem& problem, const PiecewiseSolution& phi, const PiecewiseSolution& chi,
                      double frequency) {
    QuadratureGrid grid(problem, frequency);
    auto p = grid.sample(element_from_solution(phi, 0.0));
    auto c = grid.sample(element_from_solution(chi, 0.0));
    double pp = grid.dot(p, 0.0, p, 0.0), cp = grid.dot(c, 0.0, p, 0.0), cc = grid.dot(c, 0.0, c, 0.0);
    if (!(pp > 0.0) || pp < 1e-280)
        throw Error(ErrorCode::degenerate_phi, "phi has zero weighted norm");
    KRatio out;
    out.k = cp / pp;
    // Direct sum; the expanded form cc - 2k cp + k^2 pp cancels badly.
    double r2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double d = c[i] - out.k * p[i];
        r2 += grid.nodes()[i].weight * d * d;
    }
    out.spread = cc > 0.0 ? std::sqrt(r2 / cc) : 0.0;
    return out;
}

inline KRatio k_ratio(const Problem& problem, double lambda, const IntegratorOptions& opts = {}) {
    auto phi = shoot_phi(problem, lambda, opts, true);
    auto chi = shoot_chi(problem, lambda, opts, true);
    return k_ratio(problem, phi, chi, std::sqrt(std::max(lambda, 0.0)));
}

struct EigenResiduals {
    double omega = 0.0;
    /// |right BC form| / (|(lambda beta1' + beta1) u(1)| + |(lambda beta2' + beta2) u'(1)|), normalized phi.
    double right_bc = 0.0;
    double left_bc = 0.0;
    double transmission_max = 0.0;
    /// Corrected identity  sum w int phi^2 = (omega' - P R1'(phi)) / k.
    double norm_identity = 0.0;
    /// As printed:  sum w int phi^2 = (P / k)(omega' - R1'(phi)).
    double norm_identity_printed = 0.0;
    /// |k R1'(phi) - rho| / rho.
    double substitution = 0.0;
    double k_spread = 0.0;
    /// |omega'| over the median of |omega(lambda_k)| / |lambda_k - lambda_n| nearby.
    double simplicity_margin = 0.0;
};

struct Eigenpair {
    int index = 0;
    int formula_index = 0;
    double lambda = 0.0;
    /// sqrt(lambda) for lambda >= 0, NaN otherwise.
    double s = std::numeric_limits<double>::quiet_NaN();
    /// Normalized: (phi, R1'(phi)) has unit H-norm.
    PiecewiseSolution eigenfunction;
    double normalization = 1.0;
    double f1 = 0.0;
    double k_ratio = 0.0;
    double omega_prime = 0.0;
    /// Sum_j w_j int phi_raw^2 (unnormalized phi).
    double raw_weighted_norm2 = 0.0;
    double raw_R1_prime = 0.0;
    EigenResiduals residuals;

    double frequency() const { return std::sqrt(std::max(lambda, 0.0)); }
};

inline HElement eigenvector(const Eigenpair& e) { return element_from_solution(e.eigenfunction, e.f1); }

struct NormIdentity {
    double lhs = 0.0;
    double rhs_corrected = 0.0;
    double rhs_printed = 0.0;
    double residual = 0.0;
    double residual_printed = 0.0;
    double substitution = 0.0;
};

inline NormIdentity norm_identity(const Problem& problem, double weighted_norm2, double k, double omega_prime,
                                  double R1p) {
    NormIdentity out;
    const double P = problem.delta_product_squared();
    out.lhs = weighted_norm2;
    out.rhs_corrected = (omega_prime - P * R1p) / k;
    out.rhs_printed = P / k * (omega_prime - R1p);
    auto rel = [](double a, double b) {
        double s = std::max(std::abs(a), std::abs(b));
        return s > 0.0 ? std::abs(a - b) / s : 0.0;
    };
    out.residual = rel(out.lhs, out.rhs_corrected);
    out.residual_printed = rel(out.lhs, out.rhs_printed);
    out.substitution = std::abs(k * R1p - problem.rho()) / problem.rho();
    return out;
}

inline NormIdentity norm_identity_residual(const Problem& problem, const Eigenpair& e) {
    return norm_identity(problem, e.raw_weighted_norm2, e.k_ratio, e.omega_prime, e.raw_R1_prime);
}

/// Rescales phi so that (phi, R1'(phi)) has unit H-norm; the first nonzero of
/// (phi(-1), phi'(-1)) is made positive.
inline Eigenpair normalize(const Problem& problem, Eigenpair e, const QuadratureOptions& quad = {}) {
    QuadratureOptions q = quad;
    q.frequency = std::max(q.frequency, e.frequency());
    HElement F = eigenvector(e);
    double n = std::sqrt(h_inner_product(F, F, problem, q).value);
    StateVector left = e.eigenfunction.begin_state(0);
    double first = left.u != 0.0 ? left.u : left.du;
    double c = (first < 0.0 ? -1.0 : 1.0) / n;
    e.eigenfunction = e.eigenfunction.scaled(c);
    e.f1 *= c;
    e.normalization *= c;
    return e;
}

struct WindowCheck {
    double s_lo = 0.0;
    double s_hi = 0.0;
    int computed = 0;
    int predicted = 0;
    bool ok = true;
};

struct SolveOptions {
    IntegratorOptions ode{1e-12, 1e-12};
    RootOptions root;
    ScanOptions scan;
    QuadratureOptions quad;
    DerivativeOptions derivative;
    std::optional<double> lambda_floor;
    double simplicity_threshold = 1e-4;
    /// Throw SuspectedMissedRoot instead of only reporting it.
    bool strict = true;
    /// Skip eigenfunctions and per-root diagnostics (eigenvalues only).
    bool eigenvalues_only = false;
};

struct SolveResult {
    std::vector<Eigenpair> eigenpairs;
    std::vector<WindowCheck> windows;
    std::vector<SuspiciousMinimum> suspicious;
    std::vector<int> simplicity_violations;
    std::vector<int> near_degenerate;
    double lambda_floor = 0.0;
    bool floor_verified = false;
    double s_max = 0.0;
    AsymptoticCase which = AsymptoticCase::case4;

    bool suspected_missed_root() const {
        if (!suspicious.empty() || !simplicity_violations.empty() || !floor_verified) return true;
        for (const auto& w : windows)
            if (!w.ok) return true;
        return false;
    }
};

/// Count of first-order estimates pi (n - offset) / 2, n >= 0, inside [lo, hi).
inline int predicted_count(AsymptoticCase c, double lo, double hi) {
    int count = 0;
    for (int n = 0;; ++n) {
        double s = first_order_s(c, n);
        if (s >= hi) break;
        if (s >= lo) ++count;
    }
    return count;
}

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid - 1), v.end());
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

/// Builds the full eigenpair (normalized eigenfunction and diagnostics) at a refined root.
inline Eigenpair build_eigenpair(const Problem& problem, double lambda, const std::vector<ScanSample>& samples,
                                 const SolveOptions& so) {
    Eigenpair e;
    e.lambda = lambda;
    if (lambda >= 0.0) e.s = std::sqrt(lambda);
    const double freq = std::sqrt(std::max(lambda, 0.0));
    e.residuals.omega = omega(problem, lambda, so.ode);
    e.omega_prime = omega_derivative(problem, lambda, so.derivative, so.ode);

    // Local scale: median of |omega| / |lambda_k - lambda| over scan samples
    // within one asymptotic spacing in s (in lambda below 0 or near it).
    std::vector<double> slopes;
    for (const auto& smp : samples) {
        double ds = std::abs(std::sqrt(std::max(smp.lambda, 0.0)) - freq);
        bool near = lambda < 1.0 || smp.lambda < 0.0 ? std::abs(smp.lambda - lambda) <= 2.0 + 0.5 * std::abs(lambda)
                                                     : ds <= std::numbers::pi / 2.0;
        if (near && smp.lambda != lambda) slopes.push_back(std::abs(smp.omega) / std::abs(smp.lambda - lambda));
    }
    double med = median(slopes);
    e.residuals.simplicity_margin = med > 0.0 ? std::abs(e.omega_prime) / med : std::numeric_limits<double>::infinity();
    if (so.eigenvalues_only) return e;

    PiecewiseSolution phi = shoot_phi(problem, lambda, so.ode, true);
    PiecewiseSolution chi = shoot_chi(problem, lambda, so.ode, true);
    KRatio kr = k_ratio(problem, phi, chi, freq);
    e.k_ratio = kr.k;
    e.residuals.k_spread = kr.spread;

    QuadratureOptions q = so.quad;
    q.frequency = std::max(q.frequency, freq);
    HElement raw = element_from_solution(phi, 0.0);
    e.raw_weighted_norm2 = h_inner_product(raw, raw, problem, q).value;
    e.raw_R1_prime = boundary_form_R1_prime(problem, value_at_one(phi));
    NormIdentity ni = norm_identity(problem, e.raw_weighted_norm2, e.k_ratio, e.omega_prime, e.raw_R1_prime);
    e.residuals.norm_identity = ni.residual;
    e.residuals.norm_identity_printed = ni.residual_printed;
    e.residuals.substitution = ni.substitution;

    e.eigenfunction = phi;
    e.f1 = e.raw_R1_prime;
    e = normalize(problem, std::move(e), q);

    const auto& r = problem.spec().right_bc;
    StateVector one = value_at_one(e.eigenfunction);
    double t1 = (r.beta1_prime * lambda + r.beta1) * one.u, t2 = (r.beta2_prime * lambda + r.beta2) * one.du;
    e.residuals.right_bc = std::abs(t1 - t2) / std::max(std::abs(t1) + std::abs(t2), 1e-300);
    const auto& l = problem.spec().left_bc;
    StateVector left = e.eigenfunction.begin_state(0);
    double l1 = l.alpha1 * left.u, l2 = l.alpha2 * left.du;
    e.residuals.left_bc = std::abs(l1 + l2) / std::max(std::abs(l1) + std::abs(l2), 1e-300);
    const auto& jumps = problem.spec().jumps;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        StateVector m = e.eigenfunction.end_state(i), p = e.eigenfunction.begin_state(i + 1);
        double ru = std::abs(m.u - jumps[i] * p.u) / std::max(std::abs(m.u) + std::abs(m.du), 1e-300);
        double rd = std::abs(m.du - jumps[i] * p.du) / std::max(std::abs(m.u) + std::abs(m.du), 1e-300);
        e.residuals.transmission_max = std::max({e.residuals.transmission_max, ru, rd});
    }
    return e;
}

}  // namespace detail

/// The n_max lowest eigenvalues with eigenfunctions and diagnostics.
inline SolveResult find_eigenvalues(const Problem& problem, int n_max, const SolveOptions& so = {}) {
    if (n_max < 1) throw Error(ErrorCode::invalid_config, "n_max >= 1 required");
    SolveResult res;
    res.which = classify_case(problem).which;
    const double pi = std::numbers::pi;
    const double window = 10.0 * pi;
    // The first-order count drifts by about |c| / (pi s) per window, c being
    // the second-order coefficient; windows start where that is below 1/2.
    double window_start = pi + pi / 8.0;
    try {
        double c = eigenvalue_estimate(problem, 1000).correction;
        window_start = std::max(window_start, 2.0 * std::abs(c) / pi);
    } catch (const Error&) {
    }
    double s_max = std::max(first_order_s(res.which, n_max + 2) + pi / 2.0, window_start + window + pi / 2.0);

    ScanResult scan = bracket_scan(problem, s_max, so.lambda_floor, so.ode, so.scan);
    while (static_cast<int>(scan.brackets.size()) < n_max + 1) {
        // Extend the s range; the negative part is unchanged.
        double s_new = s_max + window;
        ScanResult ext;
        std::vector<double> g;
        std::size_t ns = static_cast<std::size_t>(std::ceil((s_new - s_max) / so.scan.s_step));
        for (std::size_t i = 0; i <= ns; ++i) {
            double s = s_max + (s_new - s_max) * static_cast<double>(i) / static_cast<double>(ns);
            g.push_back(s * s);
        }
        scan_grid([&](double l) { return omega(problem, l, so.ode); }, g, so.scan, ext);
        scan.brackets.insert(scan.brackets.end(), ext.brackets.begin(), ext.brackets.end());
        scan.samples.insert(scan.samples.end(), ext.samples.begin(), ext.samples.end());
        scan.suspicious.insert(scan.suspicious.end(), ext.suspicious.begin(), ext.suspicious.end());
        s_max = s_new;
        scan.s_max = s_max;
        if (s_max > 1e4) break;
    }
    res.lambda_floor = scan.lambda_floor;
    res.floor_verified = scan.floor_verified;
    res.s_max = s_max;
    res.suspicious = scan.suspicious;

    std::vector<double> roots(scan.brackets.size());
    detail::parallel_for(
        roots.size(), [&](std::size_t i) { roots[i] = refine_root(problem, scan.brackets[i], so.ode, so.root); },
        so.scan.threads);
    std::sort(roots.begin(), roots.end());

    // Completeness, using all roots found below s_max.
    for (double lo = window_start; lo + window <= s_max - pi / 2.0; lo += window) {
        WindowCheck w;
        w.s_lo = lo;
        w.s_hi = lo + window;
        for (double l : roots)
            if (l >= 0.0 && std::sqrt(l) >= lo && std::sqrt(l) < w.s_hi) ++w.computed;
        w.predicted = predicted_count(res.which, lo, w.s_hi);
        w.ok = std::abs(w.computed - w.predicted) <= 1;
        res.windows.push_back(w);
    }

    const std::size_t count = std::min<std::size_t>(roots.size(), static_cast<std::size_t>(n_max));
    res.eigenpairs.resize(count);
    detail::parallel_for(
        count,
        [&](std::size_t i) { res.eigenpairs[i] = detail::build_eigenpair(problem, roots[i], scan.samples, so); },
        so.scan.threads);
    for (std::size_t i = 0; i < count; ++i) {
        auto& e = res.eigenpairs[i];
        e.index = static_cast<int>(i);
        e.formula_index = nearest_formula_index(res.which, e.frequency());
        if (e.residuals.simplicity_margin < so.simplicity_threshold) res.simplicity_violations.push_back(e.index);
        if (i > 0 && e.lambda - res.eigenpairs[i - 1].lambda <= 1e-10 * std::max(1.0, std::abs(e.lambda)))
            res.near_degenerate.push_back(e.index);
    }
    if (static_cast<int>(count) < n_max) {
        WindowCheck w;
        w.s_lo = 0.0;
        w.s_hi = s_max;
        w.computed = static_cast<int>(roots.size());
        w.predicted = n_max;
        w.ok = false;
        res.windows.push_back(w);
    }

    if (so.strict && res.suspected_missed_root()) {
        std::string why;
        for (const auto& w : res.windows)
            if (!w.ok)
                why += " window s in [" + std::to_string(w.s_lo) + ", " + std::to_string(w.s_hi) + "): " +
                       std::to_string(w.computed) + " roots vs " + std::to_string(w.predicted) + " predicted;";
        for (const auto& m : res.suspicious) why += " near-zero dip at lambda = " + std::to_string(m.lambda) + ";";
        for (int i : res.simplicity_violations) why += " small |omega'| at n = " + std::to_string(i) + ";";
        if (!res.floor_verified) why += " lambda floor not verified;";
        throw Error(ErrorCode::suspected_missed_root, why);
    }
    return res;
}

}  // namespace slmt
