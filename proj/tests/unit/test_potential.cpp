#include "doctest.h"
#include "oracles.hpp"

#include "nozzle/errors.hpp"
#include "nozzle/potential.hpp"

#include <cmath>

using namespace nozzle;

namespace {

BoundaryData data(const Grid& g, double a2 = 0.0, double a3 = 0.0) {
    BoundaryFamilyParams p;
    p.a2 = a2;
    p.a3 = a3;
    return boundary_family(g, p, 1.5);
}

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("uniform flux gives the uniform 1D state") {
    const GasModel gas;
    const double q = oracle::q_default(0.5);
    const double rho = oracle::rho_default(q * q);
    CHECK(q == doctest::Approx(0.347296355).epsilon(1e-9));
    CHECK(rho == doctest::Approx(1.439692621).epsilon(1e-9));
    for (int n : {9, 17}) {
        const Grid g = Grid::make(1.0, n, n, n);
        const auto sol = solve_potential(gas, data(g), 0.5, 10);
        CHECK(max_abs_diff(sol.u[0], ScalarField(g, q)) <= 1e-6);
        CHECK(max_abs(sol.u[1]) <= 1e-10);
        CHECK(max_abs(sol.u[2]) <= 1e-10);
        CHECK(max_abs_diff(sol.rho, ScalarField(g, rho)) <= 1e-5);
        CHECK(max_mach(gas, sol) == doctest::Approx(q / std::sqrt(rho)).epsilon(1e-6));
        CHECK(max_mach(gas, sol) == doctest::Approx(0.28944452).epsilon(1e-6));
        CHECK(check_positivity_u1(sol.u).min_u1 == doctest::Approx(q).epsilon(1e-6));
    }
}

TEST_CASE("mass balance across cross sections") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto d = data(g, 0.2, 0.1);
    const auto sol = solve_potential(GasModel{}, d, 0.5, 10);
    const double target = -0.5 * plane_integral(g, d.f_minus);
    for (double f : cross_section_fluxes(sol.phi, sol.rho)) CHECK(f == doctest::Approx(target).epsilon(1e-8));
}

TEST_CASE("perturbed data keeps u1 positive") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto sol = solve_potential(GasModel{}, data(g, 0.2), 0.5, 10);
    const auto pos = check_positivity_u1(sol.u);
    CHECK(pos.min_u1 > 0.0);
    CHECK(sol.mach_max < 1.0);
}

TEST_CASE("truncation is inactive away from sonic") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto d = data(g, 0.2);
    const auto a = solve_potential(GasModel{}, d, 0.4, 0);
    const auto b = solve_potential(GasModel{}, d, 0.4, 10);
    CHECK(a.max_speed_sq < 0.9);
    CHECK(max_abs_diff(a.phi, b.phi) <= 1e-8);
}

TEST_CASE("Mach number rises toward 1 as theta approaches 1") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto d = data(g);
    double prev = 0.0;
    for (double th : {0.5, 0.8, 0.95, 0.99}) {
        const double mach = max_mach(GasModel{}, solve_potential(GasModel{}, d, th, 0));
        const double q = oracle::q_default(th);
        CHECK(mach == doctest::Approx(q / std::sqrt(oracle::rho_default(q * q))).epsilon(1e-6));
        CHECK(mach > prev);
        prev = mach;
    }
    CHECK(prev > 0.85);
}

TEST_CASE("supercritical flux without truncation fails to converge") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    CHECK_THROWS_AS(solve_potential(GasModel{}, data(g), 1.2, 0, PicardOptions{1e-9, 0.7, 300, {1e-11, 0}}),
                    ConvergenceError);
}

TEST_CASE("critical theta for uniform data") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const double oracle4 = oracle::theta_critical(4);
    CHECK(oracle4 == doctest::Approx(0.974279).epsilon(1e-6));
    CHECK(oracle::theta_critical(20) == doctest::Approx(0.999046).epsilon(1e-6));
    const auto res = find_critical_theta(GasModel{}, data(g), 4);
    CHECK_FALSE(res.open);
    CHECK(res.bracket.first <= oracle4 + 1e-9);
    CHECK(res.bracket.second >= oracle4 - 1e-9);
    CHECK(res.bracket.second - res.bracket.first <= 1e-3);
    double prev = 0.0;
    for (const auto& s : res.mach_trace) {
        if (!s.converged || s.theta == 0.0) continue;
        CHECK(s.mach_max > prev);
        prev = s.mach_max;
    }
}

TEST_CASE("warm start reproduces the cold solution") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto d = data(g, 0.2);
    const auto cold = solve_potential(GasModel{}, d, 0.5, 10);
    const auto warm = solve_potential(GasModel{}, d, 0.5, 10, PicardOptions{}, &cold.phi);
    CHECK(warm.picard_iters <= 2);
    CHECK(max_abs_diff(warm.phi, cold.phi) <= 1e-8 * max_abs(cold.phi));
}

TEST_CASE("solution respects the x2 mirror") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    BoundaryFamilyParams p;
    p.a2 = 0.2;
    p.a3 = 0.1;
    const auto d = boundary_family(g, p, 1.5);
    const auto a = solve_potential(GasModel{}, d, 0.5, 10, PicardOptions{1e-11, 0.7, 2000, {1e-13, 0}});
    const auto b = solve_potential(GasModel{}, mirror_x2(d), 0.5, 10, PicardOptions{1e-11, 0.7, 2000, {1e-13, 0}});
    CHECK(max_abs_diff(mirror_x2(a.u), b.u) <= 1e-9);
}

}
