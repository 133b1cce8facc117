#pragma once

// Isentropic gamma-law gas: p(rho) = A rho^gamma.
//
// The enthalpy is h(rho) = gamma A / (gamma - 1) rho^(gamma - 1), i.e. the
// integral of p'(s)/s taken from zero, so h(0+) = 0 and states with
// B - |u|^2/2 <= 0 are vacuum. Other pressure laws only need to supply
// pressure/sound_speed/enthalpy/enthalpy_derivative; density_from_enthalpy
// inverts h numerically and does not rely on the closed form.

namespace nozzle {

struct GasModel {
    double gamma = 2.0;
    double entropy_const = 0.5;
    double bernoulli_const = 1.5;

    /// Throws DomainError unless gamma > 1, A > 0 and B > 0.
    void validate() const;

    double pressure(double rho) const;
    double sound_speed(double rho) const;
    double enthalpy(double rho) const;
    /// dh/drho = p'(rho) / rho.
    double enthalpy_derivative(double rho) const;
    /// H = h^{-1} by safeguarded Newton, relative tolerance 1e-13.
    double density_from_enthalpy(double h) const;
};

/// Density-clipping map zeta_m: identity below 1 - 1/m, constant 1 - 2/(3m)
/// above 1 - 1/(2m), joined by a C2 quintic with zeta' = (1-t)^2 (5t^2+2t+1) >= 0.
struct Truncation {
    int m = 0;

    void validate() const;
    double lower() const { return 1.0 - 1.0 / m; }
    double upper() const { return 1.0 - 1.0 / (2.0 * m); }
    double plateau() const { return 1.0 - 2.0 / (3.0 * m); }

    double zeta(double s) const;
    double zeta_derivative(double s) const;
};

double sound_speed(const GasModel& gas, double rho);

/// rho = H(B - q^2/2). Throws OutOfRangeError when the argument leaves h's range.
double density_from_speed(const GasModel& gas, double q_sq, double bernoulli);

/// Speed q with q = c(H(B - q^2/2)).
double critical_speed(const GasModel& gas, double bernoulli);

/// rho(q^2) q.
double mass_flux(const GasModel& gas, double q, double bernoulli);

/// Inverse of mass_flux on the subsonic branch [0, c*].
double subsonic_speed_from_flux(const GasModel& gas, double flux, double bernoulli);

/// rho(c*^2 zeta_m(q^2 / c*^2)) with the model's Bernoulli constant. For the
/// default gas c* = 1 and this is rho(zeta_m(q^2)).
double truncated_density(const GasModel& gas, const Truncation& trunc, double q_sq);
/// Same with c*^2 supplied by the caller (hot loops).
double truncated_density(const GasModel& gas, const Truncation& trunc, double q_sq, double c_star_sq);

/// d/ds of rho(zeta_m(s)); used by tests and Picard diagnostics.
double truncated_density_derivative(const GasModel& gas, const Truncation& trunc, double q_sq);
double truncated_density_derivative(const GasModel& gas, const Truncation& trunc, double q_sq, double c_star_sq);

}  // namespace nozzle
