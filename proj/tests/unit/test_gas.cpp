#include "doctest.h"
#include "oracles.hpp"

#include "nozzle/errors.hpp"
#include "nozzle/gas.hpp"

#include <cmath>

using namespace nozzle;

namespace {

const GasModel kDefault{};
const GasModel kAir{1.4, 1.0, 5.0};

// h(rho) = 3.5 rho^0.4 for gamma 1.4, A 1.
double rho_air(double q_sq) {
    return oracle::bisect([&](double r) { return 3.5 * std::pow(r, 0.4) - (5.0 - 0.5 * q_sq); }, 1e-9, 100.0);
}

}  // namespace

TEST_SUITE("gas") {

TEST_CASE("validation") {
    CHECK_NOTHROW(kDefault.validate());
    CHECK_THROWS_AS((GasModel{0.9, 0.5, 1.5}.validate()), DomainError);
    CHECK_THROWS_AS((GasModel{1.0, 0.5, 1.5}.validate()), DomainError);
    CHECK_THROWS_AS((GasModel{2.0, 0.0, 1.5}.validate()), DomainError);
    CHECK_THROWS_AS((Truncation{1}.validate()), DomainError);
}

TEST_CASE("sound speed") {
    CHECK(sound_speed(kAir, 1.0) == doctest::Approx(std::sqrt(1.4)).epsilon(1e-15));
    CHECK(sound_speed(kDefault, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(sound_speed(kDefault, 0.0), DomainError);
    CHECK_THROWS_AS(sound_speed(kDefault, -1.0), DomainError);
}

TEST_CASE("density from speed") {
    CHECK(density_from_speed(kDefault, 0.0, 1.5) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(density_from_speed(kDefault, 1.0, 1.5) == doctest::Approx(1.0).epsilon(1e-14));
    // Oracle value frozen from the bisection above.
    const double r = rho_air(1.0);
    CHECK(r == doctest::Approx(1.874395244).epsilon(1e-9));
    CHECK(density_from_speed(kAir, 1.0, 5.0) == doctest::Approx(r).epsilon(1e-12));
    CHECK_THROWS_AS(density_from_speed(kDefault, 3.0, 1.5), OutOfRangeError);
    CHECK_THROWS_AS(density_from_speed(kDefault, 4.0, 1.5), OutOfRangeError);
}

TEST_CASE("enthalpy inversion round trip") {
    for (double rho : {1e-3, 0.2, 1.0, 3.7}) {
        CHECK(kAir.density_from_enthalpy(kAir.enthalpy(rho)) == doctest::Approx(rho).epsilon(1e-12));
        CHECK(kDefault.density_from_enthalpy(kDefault.enthalpy(rho)) == doctest::Approx(rho).epsilon(1e-12));
    }
}

TEST_CASE("critical speed") {
    CHECK(critical_speed(GasModel{2.0, 0.5, 3.0}, 3.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(critical_speed(kDefault, 1.5) == doctest::Approx(1.0).epsilon(1e-12));
    const double oracle = oracle::bisect(
        [](double q) { return q - std::sqrt(1.4 * std::pow(rho_air(q * q), 0.4)); }, 1e-6, std::sqrt(10.0) - 1e-9);
    CHECK(oracle == doctest::Approx(1.2909944).epsilon(1e-7));
    CHECK(critical_speed(kAir, 5.0) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("mass flux and its subsonic inverse") {
    const double q_half = oracle::q_default(0.5);
    CHECK(q_half == doctest::Approx(0.347296355).epsilon(1e-9));
    CHECK(mass_flux(kDefault, 1.0, 1.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mass_flux(kDefault, q_half, 1.5) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(subsonic_speed_from_flux(kDefault, 1.0, 1.5) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(subsonic_speed_from_flux(kDefault, 0.5, 1.5) == doctest::Approx(q_half).epsilon(1e-12));
    CHECK(subsonic_speed_from_flux(kDefault, 0.0, 1.5) == 0.0);
    CHECK_THROWS_AS(subsonic_speed_from_flux(kDefault, 1.01, 1.5), InfeasibleError);
    for (double j : {0.05, 0.3, 0.7, 0.95})
        CHECK(mass_flux(kAir, subsonic_speed_from_flux(kAir, j, 5.0), 5.0) == doctest::Approx(j).epsilon(1e-11));
}

TEST_CASE("truncation map") {
    const Truncation t{10};
    CHECK(t.zeta(0.5) == 0.5);
    CHECK(t.zeta(0.9) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(t.zeta(0.95) == doctest::Approx(1.0 - 2.0 / 30.0).epsilon(1e-15));
    CHECK(t.zeta(2.0) == doctest::Approx(t.plateau()).epsilon(1e-15));
    // Quintic blend evaluated by hand at the bridge midpoint t = 1/2.
    const double p = 0.5 + 2.0 / 3.0 / 8.0 - 2.0 / 16.0 + 1.0 / 32.0;
    const double zeta_mid = 0.9 + 0.05 * p;
    CHECK(t.zeta(0.925) == doctest::Approx(zeta_mid).epsilon(1e-15));
    CHECK(truncated_density(kDefault, t, 0.925) == doctest::Approx(1.0377604).epsilon(1e-7));

    // Monotone and C1 across the bridge.
    double prev = t.zeta(0.0);
    for (int i = 1; i <= 5000; ++i) {
        const double s = 1.2 * i / 5000.0;
        const double z = t.zeta(s);
        CHECK(z >= prev);
        prev = z;
        const double h = 1e-6;
        if (s > h && std::abs(s - 0.9) > 2 * h && std::abs(s - 0.95) > 2 * h)
            CHECK(t.zeta_derivative(s) == doctest::Approx((t.zeta(s + h) - t.zeta(s - h)) / (2 * h)).epsilon(1e-5));
    }
    CHECK(t.zeta_derivative(0.9) == doctest::Approx(1.0));
    CHECK(t.zeta_derivative(0.95) == doctest::Approx(0.0));
}

TEST_CASE("truncated density never sonic") {
    for (int m : {2, 4, 10, 50}) {
        const Truncation t{m};
        for (double q_sq : {0.0, 0.5, 1.0, 2.0, 10.0}) {
            const double rho = truncated_density(kDefault, t, q_sq);
            CHECK(rho >= oracle::rho_default(t.plateau()) - 1e-15);
            CHECK(truncated_density_derivative(kDefault, t, q_sq) <= 0.0);
        }
    }
    const Truncation t{10};
    const double h = 1e-6;
    CHECK(truncated_density_derivative(kDefault, t, 0.93) ==
          doctest::Approx((truncated_density(kDefault, t, 0.93 + h) - truncated_density(kDefault, t, 0.93 - h)) / (2 * h))
              .epsilon(1e-6));
}

}
