#pragma once

// Bernoulli function and vorticity carried along streamlines from the inlet.
//
// With V = (div u I - (grad u)^T) / u1, i.e. V_ab = (div u delta_ab - d_b u_a) / u1,
// the vorticity obeys d(Lambda)/ds = -V Lambda along each streamline, starting
// from Lambda0 on the inlet:
//
//   Lambda0 = (-kappa, (d3 B0 - kappa u2) / u1, -(kappa u3 + d2 B0) / u1),
//
// which is the inlet trace of u x omega = grad B with omega . e1 = -kappa.

#include "nozzle/boundary.hpp"
#include "nozzle/grid.hpp"
#include "nozzle/streamline.hpp"

#include <array>

namespace nozzle {

/// B(x) = B0(gamma2(x), gamma3(x)); analytic B0 when the data carries it.
ScalarField bernoulli_field(const BoundaryData& data, const FootPoints& feet);

using InletVector = std::array<PlaneField, 3>;

/// Lambda0 on the inlet nodes with vorticity (axial) parity. Throws DegeneracyError when u1 <= u1_floor on the inlet.
InletVector vorticity_initial(const BoundaryData& data, const VectorField& u, double u1_floor = 1e-8);

struct VorticityState {
    VectorField omega;
    InletVector lambda0;
    /// Largest Richardson estimate of the transport integration.
    double richardson = 0.0;
};

/// V on the grid, row-major (a, b); parity of entry (a, b) is that of d_b u_a.
std::array<ScalarField, 9> transport_matrix(const VectorField& u);

/// RK4 of d(Lambda)/ds = -V Lambda along each backward-traced streamline.
/// Paths are re-traced per node; the step is twice the trace step so that the
/// trace samples serve as RK4 midpoints, with a Richardson check at four times
/// the trace step. Lambda0 = 0 gives omega = 0 without integrating.
VorticityState transport_vorticity(const VectorField& u, const InletVector& lambda0, const TraceOptions& options = {},
                                   double u1_floor = 1e-8);

/// Integrates d(Lambda)/ds = -M(s) Lambda from s0 with n RK4 steps of size h
/// (M callable as M(s) -> 3x3 row-major). Exposed for ODE order tests.
template <class MatrixAt>
std::array<double, 3> integrate_linear(MatrixAt&& M, std::array<double, 3> y, double s0, double h, int n) {
    auto rhs = [](const std::array<double, 9>& m, const std::array<double, 3>& v) {
        return std::array<double, 3>{-(m[0] * v[0] + m[1] * v[1] + m[2] * v[2]),
                                     -(m[3] * v[0] + m[4] * v[1] + m[5] * v[2]),
                                     -(m[6] * v[0] + m[7] * v[1] + m[8] * v[2])};
    };
    for (int step = 0; step < n; ++step) {
        const double s = s0 + step * h;
        const auto Ma = M(s);
        const auto Mb = M(s + 0.5 * h);
        const auto Mc = M(s + h);
        const auto k1 = rhs(Ma, y);
        std::array<double, 3> t;
        for (int c = 0; c < 3; ++c) t[c] = y[c] + 0.5 * h * k1[c];
        const auto k2 = rhs(Mb, t);
        for (int c = 0; c < 3; ++c) t[c] = y[c] + 0.5 * h * k2[c];
        const auto k3 = rhs(Mb, t);
        for (int c = 0; c < 3; ++c) t[c] = y[c] + h * k3[c];
        const auto k4 = rhs(Mc, t);
        for (int c = 0; c < 3; ++c) y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    return y;
}

struct VorticityDiagnostics {
    double div_max = 0.0;
    /// Largest tangential component of omega on the x2 and x3 walls.
    double wall_tangential = 0.0;
    /// max |(u.grad) omega + omega div u - (omega.grad) u|.
    double transport_residual = 0.0;
};

VorticityDiagnostics check_vorticity_constraints(const VectorField& omega, const VectorField& u);

}  // namespace nozzle
