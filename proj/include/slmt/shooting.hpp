#pragma once

// Piecewise solutions of -u'' + q u = lambda u and the two shooting
// solutions phi (from x = -1) and chi (from x = 1).

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "slmt/ode.hpp"
#include "slmt/problem.hpp"

namespace slmt {

enum class SolutionKind { phi, chi, other };
enum class Direction { left_to_right, right_to_left };

/// Where the initial state of integrate_segment is given.
enum class InitAt { a, b };

/// Adaptive run over [a, b] inside subinterval `piece`, stopping exactly at
/// every non-smooth point of q. Returns the trajectory oriented along the
/// direction of integration.
inline DenseTrajectory integrate_segment(const Problem& problem, double lambda, std::size_t piece, double a,
                                         double b, StateVector init, InitAt at, const IntegratorOptions& opts = {},
                                         bool keep_dense = true) {
    if (piece >= problem.piece_count())
        throw Error(ErrorCode::out_of_domain, "piece index " + std::to_string(piece) + " out of range");
    const double lo = problem.piece_begin(piece), hi = problem.piece_end(piece);
    if (!(a >= lo && b <= hi && a <= b))
        throw Error(ErrorCode::out_of_domain, "segment not inside one subinterval closure");
    const FunctionPiece& qp = problem.potential_piece(piece);
    auto rhs = [&qp, lambda](double x, StateVector y) {
        return StateVector{y.du, (evaluate_piece(qp, x) - lambda) * y.u};
    };

    std::vector<double> stops{a};
    for (double x : problem.potential_breakpoints(piece))
        if (x > a && x < b) stops.push_back(x);
    stops.push_back(b);
    if (at == InitAt::b) std::reverse(stops.begin(), stops.end());

    DenseTrajectory out(stops.front(), init);
    StateVector y = init;
    for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
        DenseTrajectory part = integrate(rhs, stops[k], stops[k + 1], y, opts, keep_dense);
        for (const auto& st : part.steps()) out.append(st);
        y = part.back();
    }
    out.finish(stops.back(), y);
    return out;
}

/// One subinterval's piece of a piecewise solution. `begin`/`end` are the
/// one-sided states at a+0 and b-0; `eval` gives (u, u') inside.
struct SolutionSegment {
    double a = 0.0;
    double b = 0.0;
    StateVector begin;
    StateVector end;
    std::function<StateVector(double)> eval;
};

class PiecewiseSolution {
public:
    PiecewiseSolution() = default;
    PiecewiseSolution(SolutionKind kind, Direction dir, double lambda, std::vector<SolutionSegment> segments)
        : kind_(kind), direction_(dir), lambda_(lambda), segments_(std::move(segments)) {}

    SolutionKind kind() const noexcept { return kind_; }
    Direction direction() const noexcept { return direction_; }
    double lambda() const noexcept { return lambda_; }
    double scale() const noexcept { return scale_; }
    std::size_t piece_count() const noexcept { return segments_.size(); }
    const SolutionSegment& segment(std::size_t j) const { return segments_[j]; }
    bool has_dense() const noexcept { return !segments_.empty() && static_cast<bool>(segments_.front().eval); }

    /// State at h_j + 0 (start of piece j) and h_{j+1} - 0 (end of piece j).
    StateVector begin_state(std::size_t j) const { return scale_ * segments_[j].begin; }
    StateVector end_state(std::size_t j) const { return scale_ * segments_[j].end; }

    std::size_t locate(double x, Side side) const {
        if (segments_.empty() || !(x >= segments_.front().a && x <= segments_.back().b))
            throw Error(ErrorCode::out_of_domain, "x = " + std::to_string(x) + " outside solution domain");
        for (std::size_t j = 0; j + 1 < segments_.size(); ++j) {
            double h = segments_[j].b;
            if (x == h) {
                if (side == Side::left) return j;
                if (side == Side::right) return j + 1;
                throw Error(ErrorCode::out_of_domain,
                            "x = " + std::to_string(x) + " is an interface point; pick a side");
            }
            if (x < h) return j;
        }
        return segments_.size() - 1;
    }

    StateVector at(double x, Side side = Side::interior) const { return at_piece(locate(x, side), x); }

    StateVector at_piece(std::size_t j, double x) const {
        const auto& s = segments_[j];
        if (x == s.a) return scale_ * s.begin;
        if (x == s.b) return scale_ * s.end;
        if (!s.eval) throw Error(ErrorCode::out_of_domain, "solution stored without dense output");
        return scale_ * s.eval(x);
    }

    PiecewiseSolution scaled(double c) const {
        PiecewiseSolution out = *this;
        out.scale_ *= c;
        return out;
    }

private:
    SolutionKind kind_ = SolutionKind::other;
    Direction direction_ = Direction::left_to_right;
    double lambda_ = 0.0;
    double scale_ = 1.0;
    std::vector<SolutionSegment> segments_;
};

namespace detail {

inline SolutionSegment make_segment(DenseTrajectory traj, bool keep_dense) {
    SolutionSegment s;
    s.a = std::min(traj.begin(), traj.end());
    s.b = std::max(traj.begin(), traj.end());
    const bool forward = traj.end() >= traj.begin();
    s.begin = forward ? traj.front() : traj.back();
    s.end = forward ? traj.back() : traj.front();
    if (keep_dense) {
        auto p = std::make_shared<const DenseTrajectory>(std::move(traj));
        s.eval = [p](double x) { return p->at(x); };
    }
    return s;
}

}  // namespace detail

/// phi_lambda: (u, u')(-1) = (alpha2, -alpha1); the state is divided by
/// delta_i when crossing h_i.
inline PiecewiseSolution shoot_phi(const Problem& problem, double lambda, const IntegratorOptions& opts = {},
                                   bool dense = true) {
    const auto& bc = problem.spec().left_bc;
    const auto& jumps = problem.spec().jumps;
    std::vector<SolutionSegment> segs;
    segs.reserve(problem.piece_count());
    StateVector y{bc.alpha2, -bc.alpha1};
    for (std::size_t j = 0; j < problem.piece_count(); ++j) {
        if (j > 0) y = (1.0 / jumps[j - 1]) * y;
        auto traj = integrate_segment(problem, lambda, j, problem.piece_begin(j), problem.piece_end(j), y,
                                      InitAt::a, opts, dense);
        y = traj.back();
        segs.push_back(detail::make_segment(std::move(traj), dense));
    }
    return PiecewiseSolution(SolutionKind::phi, Direction::left_to_right, lambda, std::move(segs));
}

/// chi_lambda: (u, u')(1) = (beta2' lambda + beta2, beta1' lambda + beta1);
/// the state is multiplied by delta_i when crossing h_i leftwards.
inline PiecewiseSolution shoot_chi(const Problem& problem, double lambda, const IntegratorOptions& opts = {},
                                   bool dense = true) {
    const auto& bc = problem.spec().right_bc;
    const auto& jumps = problem.spec().jumps;
    const std::size_t n = problem.piece_count();
    std::vector<SolutionSegment> segs(n);
    StateVector y{bc.beta2_prime * lambda + bc.beta2, bc.beta1_prime * lambda + bc.beta1};
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t j = n - 1 - k;
        if (k > 0) y = jumps[j] * y;
        auto traj = integrate_segment(problem, lambda, j, problem.piece_begin(j), problem.piece_end(j), y,
                                      InitAt::b, opts, dense);
        y = traj.back();
        segs[j] = detail::make_segment(std::move(traj), dense);
    }
    return PiecewiseSolution(SolutionKind::chi, Direction::right_to_left, lambda, std::move(segs));
}

/// Per-subinterval step meshes of an adaptive phi shot.
struct ShotMesh {
    std::vector<std::vector<double>> pieces;
};

inline ShotMesh phi_mesh(const Problem& problem, double lambda, const IntegratorOptions& opts = {}) {
    const auto& bc = problem.spec().left_bc;
    const auto& jumps = problem.spec().jumps;
    ShotMesh mesh;
    StateVector y{bc.alpha2, -bc.alpha1};
    for (std::size_t j = 0; j < problem.piece_count(); ++j) {
        if (j > 0) y = (1.0 / jumps[j - 1]) * y;
        auto traj = integrate_segment(problem, lambda, j, problem.piece_begin(j), problem.piece_end(j), y,
                                      InitAt::a, opts, true);
        y = traj.back();
        mesh.pieces.push_back(trajectory_mesh(traj));
    }
    return mesh;
}

/// phi(1-0) computed on a frozen mesh from phi_mesh.
inline StateVector phi_end_on_mesh(const Problem& problem, double lambda, const ShotMesh& mesh) {
    const auto& bc = problem.spec().left_bc;
    const auto& jumps = problem.spec().jumps;
    StateVector y{bc.alpha2, -bc.alpha1};
    for (std::size_t j = 0; j < problem.piece_count(); ++j) {
        if (j > 0) y = (1.0 / jumps[j - 1]) * y;
        const FunctionPiece& qp = problem.potential_piece(j);
        auto rhs = [&qp, lambda](double x, StateVector v) {
            return StateVector{v.du, (evaluate_piece(qp, x) - lambda) * v.u};
        };
        y = integrate_on_mesh(rhs, mesh.pieces[j], y);
    }
    return y;
}

/// CSV rows x,u,du with `samples` points per subinterval (endpoints included,
/// one-sided at interfaces).
inline void write_trajectory_csv(std::ostream& os, const PiecewiseSolution& sol, std::size_t samples = 101) {
    if (samples < 2) samples = 2;
    auto old = os.precision(17);
    os << "x,u,du\n";
    for (std::size_t j = 0; j < sol.piece_count(); ++j) {
        const auto& s = sol.segment(j);
        for (std::size_t i = 0; i < samples; ++i) {
            double x = s.a + (s.b - s.a) * static_cast<double>(i) / static_cast<double>(samples - 1);
            if (i == samples - 1) x = s.b;
            StateVector y = sol.at_piece(j, x);
            os << x << ',' << y.u << ',' << y.du << '\n';
        }
    }
    os.precision(old);
}

}  // namespace slmt
