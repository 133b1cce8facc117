#include "doctest.h"
#include "oracles.hpp"

#include "nozzle/errors.hpp"
#include "nozzle/potential.hpp"
#include "nozzle/transport.hpp"

#include <cmath>

using namespace nozzle;
using oracle::pi;

namespace {

VectorField uniform(const Grid& g, double q) {
    VectorField u(g);
    u[0] = ScalarField(g, q, kPolarParity[0]);
    u[1] = ScalarField(g, 0.0, kPolarParity[1]);
    u[2] = ScalarField(g, 0.0, kPolarParity[2]);
    return u;
}

BoundaryData family(const Grid& g, double a2, double eps_k, double eps_b) {
    BoundaryFamilyParams p;
    p.a2 = a2;
    p.eps_kappa = eps_k;
    p.eps_B = eps_b;
    p.theta_bar = 0.5;
    return boundary_family(g, p, 1.5);
}

// d(sin^2(pi x2) sin^2(pi x3)) / dx2 and / dx3.
double dS(int axis, double x2, double x3) {
    const double s2 = std::sin(pi * x2), s3 = std::sin(pi * x3);
    return axis == 2 ? pi * std::sin(2 * pi * x2) * s3 * s3 : pi * s2 * s2 * std::sin(2 * pi * x3);
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("uniform flow pulls back B0 unchanged") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto d = family(g, 0.0, 0.0, 0.01);
    const auto B = bernoulli_field(d, trace_field(uniform(g, 0.5)));
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) CHECK(B(i, j, k) == doctest::Approx(d.B0(j, k)).epsilon(1e-12));
}

TEST_CASE("inlet vorticity from B0 gradient") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const double eps = 0.01, q = 0.5;
    const auto l0 = vorticity_initial(family(g, 0.0, 0.0, eps), uniform(g, q));
    for (int j = 0; j < g.n2; ++j)
        for (int k = 0; k < g.n3; ++k) {
            CHECK(l0[0](j, k) == 0.0);
            CHECK(l0[1](j, k) == doctest::Approx(eps * dS(3, g.x2(j), g.x3(k)) / q).epsilon(1e-12));
            CHECK(l0[2](j, k) == doctest::Approx(-eps * dS(2, g.x2(j), g.x3(k)) / q).epsilon(1e-12));
        }
    CHECK(l0[1].parity == kAxialParity[1]);
}

TEST_CASE("inlet vorticity carries the normal component") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto d = family(g, 0.0, 0.02, 0.0);
    const auto l0 = vorticity_initial(d, uniform(g, 0.5));
    CHECK(l0[0](3, 5) == doctest::Approx(-d.kappa(3, 5)));
}

TEST_CASE("scalar surrogate matches the exponential at fourth order") {
    const double v = 1.3;
    const auto M = [&](double) { return std::array<double, 9>{v, 0, 0, 0, v, 0, 0, 0, v}; };
    const double exact = std::exp(-v);
    const double e1 = std::abs(integrate_linear(M, {1, 0, 0}, 0.0, 0.25, 4)[0] - exact);
    const double e2 = std::abs(integrate_linear(M, {1, 0, 0}, 0.0, 0.125, 8)[0] - exact);
    const double e3 = std::abs(integrate_linear(M, {1, 0, 0}, 0.0, 0.0625, 16)[0] - exact);
    CHECK(oracle::order(e1, e2) == doctest::Approx(4.0).epsilon(0.05));
    CHECK(oracle::order(e2, e3) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("uniform flow carries Lambda0 unchanged") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto d = family(g, 0.0, 0.01, 0.01);
    const auto u = uniform(g, 0.5);
    for (const auto& V : transport_matrix(u)) CHECK(max_abs(V) == 0.0);
    const auto l0 = vorticity_initial(d, u);
    const auto st = transport_vorticity(u, l0);
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j)
                for (int k = 0; k < g.n3; ++k) CHECK(st.omega[a](i, j, k) == doctest::Approx(l0[a](j, k)).epsilon(1e-12));
    CHECK(max_abs(divergence(st.omega)) <= 1e-10);
}

TEST_CASE("irrotational inlet data gives exactly zero vorticity") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto d = family(g, 0.2, 0.0, 0.0);
    const auto bg = solve_potential(GasModel{}, d, 1.0, 0);
    const auto st = transport_vorticity(bg.u, vorticity_initial(d, bg.u));
    for (int a = 0; a < 3; ++a)
        for (double v : st.omega[a].values) CHECK(v == 0.0);
}

TEST_CASE("vorticity constraints on a non-uniform flow") {
    const auto run = [](int n) {
        const Grid g = Grid::make(1.0, n, n, n);
        const auto d = family(g, 0.2, 0.01, 0.01);
        const auto bg = solve_potential(GasModel{}, d, 1.0, 0);
        const auto st = transport_vorticity(bg.u, vorticity_initial(d, bg.u));
        return check_vorticity_constraints(st.omega, bg.u);
    };
    const auto c9 = run(9), c17 = run(17);
    CHECK(c9.wall_tangential <= 1e-12);
    CHECK(c17.wall_tangential <= 1e-12);
    CHECK(c9.div_max / c17.div_max >= 3.0);
    CHECK(c9.transport_residual / c17.transport_residual >= 3.0);
}

TEST_CASE("Lambda0 and omega scale linearly with the data") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto d1 = family(g, 0.2, 0.01, 0.01);
    const auto d2 = family(g, 0.2, 0.02, 0.02);
    const auto bg = solve_potential(GasModel{}, d1, 1.0, 0);
    const auto w1 = transport_vorticity(bg.u, vorticity_initial(d1, bg.u)).omega;
    const auto w2 = transport_vorticity(bg.u, vorticity_initial(d2, bg.u)).omega;
    CHECK(max_abs(w2) / max_abs(w1) == doctest::Approx(2.0).epsilon(1e-10));
}

}
