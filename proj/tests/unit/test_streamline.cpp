#include "doctest.h"
#include "oracles.hpp"

#include "nozzle/errors.hpp"
#include "nozzle/streamline.hpp"

#include <cmath>
#include <functional>

using namespace nozzle;

namespace {

VectorField field(const Grid& g, double u1, const std::function<double(double, double, double)>& u2) {
    VectorField u(g);
    u[0] = ScalarField(g, u1, kPolarParity[0]);
    u[1] = sample(g, u2, kPolarParity[1]);
    u[2] = ScalarField(g, 0.0, kPolarParity[2]);
    return u;
}

}  // namespace

TEST_SUITE("streamline") {

TEST_CASE("velocity ratio uses the odd extension") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto U = extend_velocity_ratio(field(g, 1.0, [](double, double x2, double) { return x2 * (1 - x2); }));
    CHECK(U(0.5, -0.25, 0.5)[0] == doctest::Approx(-0.1875).epsilon(1e-14));
    CHECK(U(0.5, 0.25, 0.5)[0] == doctest::Approx(0.1875).epsilon(1e-14));
    CHECK(U(0.5, 0.3, 0.5)[1] == 0.0);
}

TEST_CASE("non-positive u1 is degenerate") {
    const Grid g = Grid::make(1.0, 5, 5, 5);
    auto u = field(g, 1.0, [](double, double, double) { return 0.0; });
    u[0](2, 2, 2) = -0.1;
    CHECK_THROWS_AS(extend_velocity_ratio(u), DegeneracyError);
}

TEST_CASE("constant slope is traced exactly") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const double alpha = 0.1;
    const auto U = extend_velocity_ratio(field(g, 1.0, [&](double, double, double) { return alpha; }));
    const auto tr = trace_to_inlet(U, {0.75, 0.5, 0.5});
    CHECK(tr.gamma2 == doctest::Approx(0.5 - alpha * 0.75).epsilon(1e-13));
    CHECK(tr.gamma3 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tr.s.front() == 0.0);
    CHECK(tr.s.back() == 0.75);
    CHECK(tr.richardson <= 1e-13);
}

TEST_CASE("exponential path matches the closed form at RK4 order") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const auto U = extend_velocity_ratio(field(g, 1.0, [](double, double x2, double) { return x2 - 0.5; }));
    const double x1 = 0.8, x2 = 0.55;
    const double exact = 0.5 + (x2 - 0.5) * std::exp(-x1);
    const auto coarse = trace_to_inlet(U, {x1, x2, 0.5}, TraceOptions{1e-2, 1e6});
    const auto fine = trace_to_inlet(U, {x1, x2, 0.5}, TraceOptions{1e-5, 1e6});
    const double hc = coarse.s[1] - coarse.s[0], hf = fine.s[1] - fine.s[0];
    const double ec = std::abs(coarse.gamma2 - exact), ef = std::abs(fine.gamma2 - exact);
    CHECK(ec <= 0.05 * std::pow(hc, 4));
    CHECK(ef <= 0.05 * std::pow(hf, 4));
    CHECK(std::abs(trace_to_inlet(U, {x1, x2, 0.5}).gamma2 - exact) <= 1e-10);
}

TEST_CASE("cell-aligned step counts") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    CHECK(trace_steps(g, 0.0, 0.0, 1e-8) == 0);
    const int n = trace_steps(g, 1.0, 0.0, 1e-8);
    CHECK(n % (4 * (g.n1 - 1)) == 0);
    CHECK(1.0 / n <= std::pow(1e-8, 0.25) + 1e-15);
    CHECK(trace_steps(g, 0.3, 0.0, 1e-8) % 4 == 0);
}

TEST_CASE("trace_field folds feet back into the section") {
    const Grid g = Grid::make(1.0, 9, 9, 9);
    const double alpha = 0.1;
    const auto feet = trace_field(field(g, 1.0, [&](double, double, double) { return alpha; }));
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                CHECK(feet.gamma2(i, j, k) >= 0.0);
                CHECK(feet.gamma2(i, j, k) <= 1.0);
                const double x2 = g.x2(j), foot = x2 - alpha * g.x1(i);
                if (std::min(x2, foot) < 2 * g.h2 || std::max(x2, foot) > 1 - 2 * g.h2) continue;
                CHECK(feet.gamma2(i, j, k) == doctest::Approx(foot).epsilon(1e-12));
            }
    // Inlet nodes are their own feet.
    CHECK(feet.gamma2(0, 3, 4) == g.x2(3));
    CHECK(feet.gamma3(0, 3, 4) == g.x3(4));
}

}
