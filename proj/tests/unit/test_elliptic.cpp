#include "doctest.h"
#include "oracles.hpp"

#include "nozzle/elliptic.hpp"
#include "nozzle/errors.hpp"

#include <cmath>
#include <random>

using namespace nozzle;
using oracle::pi;

namespace {

double cos3(double x1, double x2, double x3) { return std::cos(pi * x1) * std::cos(pi * x2) * std::cos(pi * x3); }

Grid cube(int n) { return Grid::make(1.0, n, n, n); }

double manufactured_error(int n) {
    const Grid g = cube(n);
    auto problem = ConormalProblem::laplace(g);
    problem.source = sample(g, [](double x1, double x2, double x3) { return -3 * pi * pi * cos3(x1, x2, x3); });
    const auto phi = solve_conormal(problem, SolverOptions{1e-12, 0});
    auto exact = sample(g, cos3);
    subtract_mean(exact);
    return max_abs_diff(phi, exact);
}

// Source built by applying the discrete operator to phi, so phi is the exact discrete solution.
ConormalProblem operator_problem(const ScalarField& lambda, const ScalarField& phi) {
    const Grid& g = lambda.grid;
    ConormalProblem p;
    p.lambda = lambda;
    const FluxOperator op(lambda);
    std::vector<double> y(g.size());
    op.apply(phi.values, y);
    ScalarField s(g);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) s(i, j, k) = -y[g.index(i, j, k)] / g.volume(i, j, k);
    p.source = s;
    return p;
}

}  // namespace

TEST_SUITE("elliptic") {

TEST_CASE("trivial data gives zero") {
    const auto phi = solve_conormal(ConormalProblem::laplace(cube(9)));
    CHECK(max_abs(phi) == 0.0);
}

TEST_CASE("operator-applied solution is recovered") {
    const Grid g = cube(9);
    const auto lambda = sample(g, [](double x1, double x2, double x3) { return 1.0 + 0.3 * cos3(x1, x2, x3); });
    auto exact = sample(g, [](double x1, double x2, double x3) { return std::sin(x1) * std::cos(pi * x2) + x3 * x3; });
    subtract_mean(exact);
    const auto p = operator_problem(lambda, exact);
    SolveStats stats;
    const auto phi = solve_conormal(p, SolverOptions{1e-13, 0}, nullptr, &stats);
    CHECK(max_abs_diff(phi, exact) <= 1e-8);
    CHECK(stats.iterations > 0);
    CHECK(std::abs(mean(phi)) <= 1e-14);
}

TEST_CASE("manufactured conormal problem converges at second order") {
    const double e9 = manufactured_error(9), e17 = manufactured_error(17), e33 = manufactured_error(33);
    CHECK(e9 / e17 >= 3.6);
    CHECK(e9 / e17 <= 4.4);
    CHECK(e17 / e33 >= 3.6);
    CHECK(e17 / e33 <= 4.4);
}

TEST_CASE("conormal flux data and divergence-form source") {
    // phi = x1^2/2 on [0,1]: d(phi)/dn = -0 at the inlet, 1 at the outlet, Laplace = 1.
    const Grid g = Grid::make(1.0, 17, 5, 5);
    auto p = ConormalProblem::laplace(g);
    p.source = ScalarField(g, 1.0);
    p.flux_minus = PlaneField(g, 0.0);
    p.flux_plus = PlaneField(g, 1.0);
    const auto phi = solve_conormal(p, SolverOptions{1e-13, 0});
    auto exact = sample(g, [](double x1, double, double) { return 0.5 * x1 * x1; });
    subtract_mean(exact);
    CHECK(max_abs_diff(phi, exact) <= 1e-3);

    // Same problem with the source in divergence form F = (x1, 0, 0) and zero extra flux.
    ConormalProblem q = ConormalProblem::laplace(g);
    VectorField F(g);
    F[0] = sample(g, [](double x1, double, double) { return x1; });
    q.rhs_div = F;
    const auto phi2 = solve_conormal(q, SolverOptions{1e-13, 0});
    CHECK(max_abs_diff(phi2, exact) <= 1e-3);
}

TEST_CASE("incompatible data is rejected") {
    const Grid g = cube(9);
    auto p = ConormalProblem::laplace(g);
    p.source = ScalarField(g, 1.0);
    CHECK_THROWS_AS(solve_conormal(p), SolvabilityError);
}

TEST_CASE("iteration cap reports non-convergence") {
    const Grid g = cube(17);
    auto p = ConormalProblem::laplace(g);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-1, 1);
    ScalarField s(g);
    for (auto& v : s.values) v = d(rng);
    subtract_mean(s);
    p.source = s;
    CHECK_THROWS_AS(solve_conormal(p, SolverOptions{1e-14, 2}), ConvergenceError);
}

TEST_CASE("residual is linear in the perturbation") {
    const Grid g = cube(9);
    auto exact = sample(g, cos3);
    subtract_mean(exact);
    const auto p = operator_problem(ScalarField(g, 1.0), exact);
    const auto r0 = residual(p, exact);
    CHECK(r0.max_interior <= 1e-12);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1, 1);
    ScalarField noise(g);
    for (auto& v : noise.values) v = d(rng);
    const auto r1 = residual(p, add(exact, noise, 1e-3));
    const auto r2 = residual(p, add(exact, noise, 2e-3));
    CHECK(r2.max_interior / r1.max_interior == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(r2.max_flux / r1.max_flux == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("mixed Dirichlet Poisson") {
    // -Laplace(q) = 2 pi^2 sin(pi x1) sin(pi x2): Dirichlet on x1 faces and x2 walls (odd), Neumann on x3 walls.
    const auto err = [](int n) {
        const Grid g = cube(n);
        const auto exact = sample(g, [](double x1, double x2, double) { return std::sin(pi * x1) * std::sin(pi * x2); },
                                  Parity{-1, 1});
        ScalarField src = exact;
        for (auto& v : src.values) v *= 2 * pi * pi;
        return max_abs_diff(solve_poisson_mixed(src, true, SolverOptions{1e-13, 0}), exact);
    };
    const double e9 = err(9), e17 = err(17);
    CHECK(e9 / e17 >= 3.6);
    CHECK(e9 / e17 <= 4.4);
}

}
