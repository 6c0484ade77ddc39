// The jump factor delta rescales phi on the right of the interface but
// leaves the spectrum unchanged; the H-norm weights absorb the rescaling.

#include <cstdio>

#include <slmt/slmt.hpp>

int main() {
    slmt::ProblemSpec spec;
    spec.potential = {{slmt::PolynomialPiece{{1.0, -2.0, 3.0}}}};
    spec.interfaces = {0.25};
    spec.left_bc = {0.3, 1.0};
    spec.right_bc = {0.5, 1.0, 1.0, 0.0};

    std::printf("%6s %20s %20s %14s %14s\n", "delta", "lambda_0", "lambda_4", "phi0(1)", "omega'(l0)");
    for (double delta : {0.5, 1.0, 2.0, 3.0}) {
        spec.jumps = {delta};
        slmt::Problem problem(spec);
        auto res = slmt::find_eigenvalues(problem, 5);
        const auto& e0 = res.eigenpairs[0];
        double raw_end = slmt::shoot_phi(problem, e0.lambda).end_state(1).u;
        std::printf("%6.2f %20.14f %20.14f %14.6f %14.6f\n", delta, e0.lambda, res.eigenpairs[4].lambda, raw_end,
                    e0.omega_prime);
    }
}
