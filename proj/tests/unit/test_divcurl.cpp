#include "doctest.h"
#include "oracles.hpp"

#include "nozzle/divcurl.hpp"
#include "nozzle/errors.hpp"

#include <cmath>

using namespace nozzle;
using oracle::pi;

namespace {

// q* = (0, 0, sin(pi x1) sin(pi x2)) on the unit cube: u* = curl q*, w* = curl u*.
VectorField u_star(const Grid& g) {
    VectorField u(g, kPolarParity);
    u[0] = sample(g, [](double x1, double x2, double) { return pi * std::sin(pi * x1) * std::cos(pi * x2); }, kPolarParity[0]);
    u[1] = sample(g, [](double x1, double x2, double) { return -pi * std::cos(pi * x1) * std::sin(pi * x2); }, kPolarParity[1]);
    u[2] = ScalarField(g, 0.0, kPolarParity[2]);
    return u;
}

VectorField w_star(const Grid& g) {
    VectorField w(g, kAxialParity);
    w[2] = sample(g, [](double x1, double x2, double) { return 2 * pi * pi * std::sin(pi * x1) * std::sin(pi * x2); },
                  kAxialParity[2]);
    return w;
}

ScalarField wavy_lambda(const Grid& g) {
    return sample(g, [](double x1, double x2, double x3) {
        return 1.0 + 0.1 * std::cos(pi * x1) * std::cos(pi * x2) * std::cos(pi * x3);
    });
}

Grid cube(int n) { return Grid::make(1.0, n, n, n); }

}  // namespace

TEST_SUITE("divcurl") {

TEST_CASE("manufactured potential satisfies its boundary conditions") {
    // n x q* = 0: q3 vanishes on x1 = 0, 1 and x2 = 0, 1; q1 = q2 = 0 everywhere; div q* = d3 q3 = 0.
    for (double t = 0.0; t <= 1.0; t += 0.125) {
        CHECK(std::abs(std::sin(pi * 0.0) * std::sin(pi * t)) == 0.0);
        CHECK(std::abs(std::sin(pi * 1.0) * std::sin(pi * t)) <= 1e-15);
    }
}

TEST_CASE("unit weight recovers u* at second order") {
    const auto err = [](int n) {
        const Grid g = cube(n);
        const auto sol = solve_div_curl(DivCurlProblem{ScalarField(g, 1.0), w_star(g), std::nullopt});
        CHECK(sol.residual_div <= 1e-10);
        CHECK(sol.residual_flux <= 1e-12);
        return max_abs_diff(sol.u, u_star(g));
    };
    const double e9 = err(9), e17 = err(17);
    CHECK(oracle::order(e9, e17) >= 1.8);
}

TEST_CASE("variable weight: residuals of all three equations") {
    const auto res = [](int n) {
        const Grid g = cube(n);
        return solve_div_curl(DivCurlProblem{wavy_lambda(g), w_star(g), std::nullopt});
    };
    const auto s9 = res(9), s17 = res(17);
    CHECK(s9.picard_iters > 1);
    CHECK(s17.residual_div <= 1e-9);
    CHECK(s17.residual_flux <= 1e-12);
    CHECK(oracle::order(s9.residual_curl, s17.residual_curl) >= 1.8);
    const auto flux = face_fluxes(wavy_lambda(cube(17)), s17.u);
    for (double f : flux) CHECK(std::abs(f) <= 1e-8);
}

TEST_CASE("irrotational problem reduces to the conormal solve") {
    const Grid g = cube(9);
    VectorField v(g, kPolarParity);
    v[0] = ScalarField(g, 1.0, kPolarParity[0]);
    const auto sol = solve_div_curl(DivCurlProblem{ScalarField(g, 2.0), VectorField(g, kAxialParity), v});
    CHECK(max_abs_diff(sol.u[0], ScalarField(g, 0.5)) <= 1e-10);
    CHECK(max_abs(sol.u[1]) + max_abs(sol.u[2]) <= 1e-10);
    CHECK(max_abs(sol.q) == 0.0);
}

TEST_CASE("vortical part is linear in the vorticity") {
    const Grid g = cube(9);
    const auto rho = wavy_lambda(g);
    auto half = w_star(g);
    for (int a = 0; a < 3; ++a)
        for (auto& x : half[a].values) x *= 0.5;
    const auto W1 = solve_vortical_W(rho, w_star(g)).u;
    const auto W2 = solve_vortical_W(rho, half).u;
    CHECK(max_abs(W2) / max_abs(W1) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("invalid data is rejected") {
    const Grid g = cube(9);
    auto lam = ScalarField(g, 1.0);
    lam(3, 3, 3) = 0.0;
    CHECK_THROWS_AS(solve_div_curl(DivCurlProblem{lam, w_star(g), std::nullopt}), InvalidDataError);

    // Tangential vorticity on the x2 walls.
    VectorField w(g, kAxialParity);
    w[2] = sample(g, [](double x1, double, double) { return std::sin(pi * x1); }, kAxialParity[2]);
    CHECK_THROWS_AS(solve_div_curl(DivCurlProblem{ScalarField(g, 1.0), w, std::nullopt}), InvalidDataError);

    // Strongly non-solenoidal w.
    VectorField w2(g, kAxialParity);
    w2[0] = sample(g, [](double x1, double x2, double x3) { return x1 * std::sin(pi * x2) * std::sin(pi * x3); },
                   kAxialParity[0]);
    CHECK_THROWS_AS(solve_div_curl(DivCurlProblem{ScalarField(g, 1.0), w2, std::nullopt}), InvalidDataError);
}

}
