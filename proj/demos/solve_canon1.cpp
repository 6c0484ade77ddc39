// Lowest eigenvalues of the reference problem
//   -u'' = lambda u on [-1, 0) and (0, 1], u(-1) = 0, lambda u(1) = u'(1),
// with continuous transmission at 0, next to the roots of -s sin 2s + cos 2s.

#include <cmath>
#include <cstdio>

#include <slmt/slmt.hpp>

int main() {
    slmt::ProblemSpec spec;
    spec.interfaces = {0.0};
    spec.jumps = {1.0};
    spec.left_bc = {1.0, 0.0};
    spec.right_bc = {0.0, 1.0, 1.0, 0.0};
    slmt::Problem problem(spec);

    auto res = slmt::find_eigenvalues(problem, 10);
    std::printf("%3s %22s %22s %12s\n", "n", "lambda", "s", "-s sin2s+cos2s");
    for (const auto& e : res.eigenpairs) {
        double g = -e.s * std::sin(2 * e.s) + std::cos(2 * e.s);
        std::printf("%3d %22.15f %22.15f %12.2e\n", e.index, e.lambda, e.s, g);
    }
}
