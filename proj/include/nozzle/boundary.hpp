#pragma once

#include "nozzle/grid.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nozzle {

/// Values on an x1 = const plane (nodes j, k), with the same reflection parity rules as grid fields.
struct PlaneField {
    int n2 = 0;
    int n3 = 0;
    std::vector<double> values;
    Parity parity = kEven;

    PlaneField() = default;
    PlaneField(const Grid& g, double fill = 0.0, Parity p = kEven);

    double& operator()(int j, int k) { return values[static_cast<std::size_t>(j) * n3 + k]; }
    double operator()(int j, int k) const { return values[static_cast<std::size_t>(j) * n3 + k]; }
    double ghost(int j, int k) const;
    double h2() const { return 1.0 / (n2 - 1); }
    double h3() const { return 1.0 / (n3 - 1); }

    /// Bilinear interpolation of the reflection-extended plane field.
    double interpolate(double x2, double x3) const;
    /// Bicubic (four-point Lagrange) interpolation of the reflection-extended plane field.
    double interpolate_cubic(double x2, double x3) const;
    /// Fourth-order central difference along x2 (axis 1) or x3 (axis 2) using reflection ghosts.
    double tangential_derivative(int axis, int j, int k) const;
};

void enforce_parity(PlaneField& f);
PlaneField plane_of(const ScalarField& f, int i);

template <class F>
PlaneField sample_plane(const Grid& g, F&& f, Parity p = kEven) {
    PlaneField out(g, 0.0, p);
    for (int j = 0; j < g.n2; ++j)
        for (int k = 0; k < g.n3; ++k) out(j, k) = f(g.x2(j), g.x3(k));
    return out;
}

/// Closed-form inlet/outlet data. Derivatives of B0 are exact, which keeps
/// first-order noise out of the inlet vorticity.
struct AnalyticBoundary {
    std::function<double(double, double)> B0;
    std::function<double(double, double)> dB0_dx2;
    std::function<double(double, double)> dB0_dx3;
    std::function<double(double, double)> kappa;
};

/// Normal momentum flux f = rho u.n on the inlet (negative) and outlet
/// (positive), normal vorticity kappa and Bernoulli function B0 on the inlet.
/// f on the walls is zero and not stored.
struct BoundaryData {
    Grid grid;
    PlaneField f_minus;
    PlaneField f_plus;
    PlaneField kappa;
    PlaneField B0;
    double bernoulli_ref = 1.5;
    std::optional<AnalyticBoundary> analytic;

    /// Trapezoid integral of f over the inlet and outlet planes.
    double compatibility_defect() const;
    /// Scale used to judge compatibility: integral of |f| over both planes.
    double flux_scale() const;

    /// Throws InvalidDataError on: compatibility defect above tol_compat * scale,
    /// f >= 0 somewhere on the inlet or f <= 0 on the outlet, non-zero edge normal
    /// derivative of f or B0, kappa != 0 or B0 != B_ref on the inlet edges.
    void validate(double tol_compat = 1e-12) const;

    /// Returns data with f scaled by factor (kappa and B0 unchanged).
    BoundaryData scaled_flux(double factor) const;

    /// Inlet B0 at (x2, x3) through the analytic form when present.
    double B0_at(double x2, double x3) const;
    double dB0(int axis, int j, int k) const;
    double kappa_at_node(int j, int k) const;
};

struct BoundaryFamilyParams {
    double a2 = 0.0;
    double a3 = 0.0;
    double eps_kappa = 0.0;
    double eps_B = 0.0;
    /// Base flux magnitude multiplying the cosine profile.
    double theta_bar = 1.0;
};

/// f(0,.) = -theta_bar (1 + a2 cos(pi x2) + a3 cos(pi x3)), f(L,.) the same with
/// positive sign rescaled to exact discrete compatibility, kappa = eps_k sin sin,
/// B0 = B_ref + eps_B sin^2 sin^2. Throws InvalidDataError if |a2| + |a3| >= 1.
BoundaryData boundary_family(const Grid& g, const BoundaryFamilyParams& params, double bernoulli_ref);

/// Mirror x2 -> 1 - x2 of boundary data; kappa (a normal vorticity) changes sign.
BoundaryData mirror_x2(const BoundaryData& data);

}  // namespace nozzle
