#include "doctest.h"
#include "oracles.hpp"

#include "nozzle/boundary.hpp"
#include "nozzle/errors.hpp"
#include "nozzle/grid.hpp"

#include <cmath>

using namespace nozzle;
using oracle::pi;

namespace {

double gradient_error(int n) {
    const Grid g = Grid::make(1.0, n, n, n);
    const auto phi = sample(g, [](double, double x2, double) { return std::cos(pi * x2); });
    const auto exact = sample(g, [](double, double x2, double) { return -pi * std::sin(pi * x2); });
    return max_abs_diff(gradient(phi)[1], exact);
}

double x1_derivative_error(int n) {
    const Grid g = Grid::make(2.0, n, 5, 5);
    const auto f = sample(g, [](double x1, double, double) { return std::sin(1.3 * x1) + x1 * x1 * x1; });
    const auto exact = sample(g, [](double x1, double, double) { return 1.3 * std::cos(1.3 * x1) + 3 * x1 * x1; });
    return max_abs_diff(partial(f, 0), exact);
}

}  // namespace

TEST_SUITE("grid_fields") {

TEST_CASE("grid construction") {
    const Grid g = Grid::make(2.0, 5, 9, 17);
    CHECK(g.h1 == 0.5);
    CHECK(g.x1(4) == 2.0);
    CHECK(g.x2(8) == 1.0);
    CHECK(g.size() == 5u * 9u * 17u);
    CHECK_THROWS_AS(Grid::make(0.0, 5, 5, 5), DomainError);
    CHECK_THROWS_AS(Grid::make(1.0, 2, 5, 5), DomainError);
    double vol = 0.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) vol += g.volume(i, j, k);
    CHECK(vol == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("reflection folding and ghosts") {
    CHECK(fold_coordinate(-0.25).t == doctest::Approx(0.25));
    CHECK(fold_coordinate(-0.25).sign == -1);
    CHECK(fold_coordinate(1.25).t == doctest::Approx(0.75));
    CHECK(fold_coordinate(2.25).sign == 1);
    CHECK(fold_index(-1, 5).index == 1);
    CHECK(fold_index(5, 5).index == 3);

    const Grid g = Grid::make(1.0, 3, 5, 5);
    const auto odd = sample(g, [](double, double x2, double) { return x2 * (1 - x2); }, Parity{-1, 1});
    CHECK(odd.ghost(1, -1, 2) == doctest::Approx(-odd(1, 1, 2)));
    CHECK(odd.ghost(1, 5, 2) == doctest::Approx(-odd(1, 3, 2)));
    const auto even = sample(g, [](double, double x2, double) { return std::cos(pi * x2); });
    CHECK(even.ghost(0, -2, 0) == doctest::Approx(even(0, 2, 0)));
}

TEST_CASE("gradient is second order") {
    const double e9 = gradient_error(9), e17 = gradient_error(17);
    const double p = oracle::order(e9, e17);
    CHECK(p >= 1.9);
    CHECK(p <= 2.1);
}

TEST_CASE("x1 boundary derivative is second order") {
    const double p = oracle::order(x1_derivative_error(9), x1_derivative_error(17));
    CHECK(p >= 1.9);
    CHECK(p <= 2.2);
    // Exact for quadratics at the boundary nodes.
    const Grid g = Grid::make(1.0, 6, 3, 3);
    const auto f = sample(g, [](double x1, double, double) { return 2 * x1 * x1 - 1; });
    CHECK(partial(f, 0, 0, 1, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(partial(f, 0, 5, 1, 1) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("discrete curl grad vanishes") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto phi = sample(g, [](double x1, double x2, double) { return std::cos(pi * x1) * std::cos(pi * x2); });
    CHECK(max_abs(curl(gradient(phi))) <= 1e-10);
    const auto psi = sample(g, [](double x1, double x2, double x3) {
        return std::sin(2 * x1) * std::cos(pi * x2) * std::cos(2 * pi * x3);
    });
    CHECK(max_abs(curl(gradient(psi))) <= 1e-10);
}

TEST_CASE("parities of derived fields") {
    const Grid g = Grid::make(1.0, 5, 5, 5);
    const auto phi = sample(g, [](double x1, double x2, double x3) { return x1 * std::cos(pi * x2) * std::cos(pi * x3); });
    const auto u = gradient(phi);
    CHECK(u.parity() == kPolarParity);
    CHECK(curl(u).parity() == kAxialParity);
    CHECK(derivative_parity(Parity{-1, 1}, 1) == Parity{1, 1});
}

TEST_CASE("trilinear interpolation") {
    const Grid g = Grid::make(1.0, 3, 5, 3);
    const auto f = sample(g, [](double, double x2, double) { return x2 * x2; });
    // Centre of the cell [0.25, 0.5]: average of the node values = x^2 + h^2/4.
    CHECK(interpolate(f, {0.3, 0.375, 0.6}) == doctest::Approx(0.375 * 0.375 + 0.25 * 0.25 / 4).epsilon(1e-15));
    const auto lin = sample(g, [](double x1, double x2, double x3) { return 1 + 2 * x1 - x2 + 0.5 * x3; });
    CHECK(interpolate(lin, {0.31, 0.77, 0.12}) == doctest::Approx(1 + 0.62 - 0.77 + 0.06).epsilon(1e-14));
    CHECK_THROWS_AS(interpolate(f, {1.5, 0.5, 0.5}), DomainError);
    // Nodes reproduced exactly by both variants.
    CHECK(interpolate(f, g.node(1, 2, 1)) == f(1, 2, 1));
    CHECK(interpolate_cubic(f, g.node(1, 2, 1)) == f(1, 2, 1));
    // Cubic variant is exact for quadratics in x2 away from the walls.
    CHECK(interpolate_cubic(f, {0.3, 0.4, 0.6}) == doctest::Approx(0.16).epsilon(1e-14));
}

TEST_CASE("extend_reflect") {
    const Grid g = Grid::make(1.0, 3, 9, 9);
    const auto f = sample(g, [](double, double x2, double) { return x2 * (1 - x2); }, Parity{-1, 1});
    const auto ext = extend_reflect(f, Parity{-1, 1});
    CHECK(ext({0.5, -0.25, 0.5}) == doctest::Approx(-0.1875).epsilon(1e-14));
    CHECK(ext({0.5, 1.25, 0.5}) == doctest::Approx(-0.1875).epsilon(1e-14));
    CHECK(ext({0.5, 2.25, 0.5}) == doctest::Approx(0.1875).epsilon(1e-14));
}

TEST_CASE("mirror and swap") {
    const Grid g = Grid::make(1.0, 5, 5, 5);
    const auto phi = sample(g, [](double x1, double x2, double x3) { return x1 + x2 * x2 + 2 * x3; });
    const auto m = mirror_x2(phi);
    CHECK(m(1, 0, 2) == phi(1, 4, 2));
    auto u = gradient(phi);
    const auto mu = mirror_x2(u);
    CHECK(mu[1](1, 1, 2) == doctest::Approx(-u[1](1, 3, 2)));
    CHECK(max_abs_diff(mirror_x2(mirror_x2(u)), u) == 0.0);
    CHECK(max_abs_diff(swap_x2_x3(swap_x2_x3(phi)), phi) == 0.0);
}

TEST_CASE("boundary family") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    BoundaryFamilyParams p;
    p.a2 = 0.2;
    const auto d = boundary_family(g, p, 1.5);
    const auto [lo, hi] = std::minmax_element(d.f_minus.values.begin(), d.f_minus.values.end());
    CHECK(*lo == doctest::Approx(-1.2).epsilon(1e-15));
    CHECK(*hi == doctest::Approx(-0.8).epsilon(1e-15));
    CHECK(std::abs(d.compatibility_defect()) <= 1e-14);
    CHECK_NOTHROW(d.validate());

    p.a2 = 0.6;
    p.a3 = 0.5;
    CHECK_THROWS_AS(boundary_family(g, p, 1.5), InvalidDataError);

    p = {};
    p.eps_kappa = 0.1;
    p.eps_B = 0.1;
    const auto dk = boundary_family(g, p, 1.5);
    CHECK_NOTHROW(dk.validate());
    CHECK(dk.B0(4, 4) == doctest::Approx(1.6));
    CHECK(dk.B0(0, 4) == 1.5);
    CHECK(dk.kappa(0, 3) == 0.0);

    auto bad = boundary_family(g, BoundaryFamilyParams{}, 1.5);
    bad.f_plus(4, 4) *= 1.5;
    CHECK_THROWS_AS(bad.validate(), InvalidDataError);
    CHECK(bad.scaled_flux(2.0).f_minus(1, 1) == doctest::Approx(2 * bad.f_minus(1, 1)));
}

}
