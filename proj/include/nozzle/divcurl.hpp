#pragma once

// Weighted div-curl system on the box:
//
//   div(lambda u) = div v,   curl u = w,   lambda u.n = v.n on the boundary,
//
// solved as u = grad(phi_hat) + curl(q) / lambda. phi_hat comes from the
// conormal problem with coefficient lambda and source div v. The vector
// potential satisfies n x q = 0 and div q = 0 on the boundary and is found by
// Picard iteration on
//
//   -Laplace(q) = lambda w - lambda grad(1/lambda) x curl(q),
//
// one scalar mixed Dirichlet/Neumann Poisson problem per component.

#include "nozzle/elliptic.hpp"
#include "nozzle/grid.hpp"

#include <optional>
#include <vector>

namespace nozzle {

struct DivCurlProblem {
    ScalarField lambda;
    /// Axial (vorticity) parity.
    VectorField w;
    /// Polar parity; nullopt means v = 0.
    std::optional<VectorField> v;
};

struct DivCurlOptions {
    /// Picard stop: ||q^{k+1} - q^k||_inf <= tol ||q^{k+1}||_inf.
    double tol = 1e-10;
    double relax = 0.8;
    int max_iter = 200;
    SolverOptions linear{1e-12, 0};
    /// Divergence of w accepted up to div_ratio * max_a ||d_a w_a||.
    double div_ratio = 0.1;
};

struct DivCurlSolution {
    VectorField u;
    ScalarField phi_hat;
    VectorField q;
    int picard_iters = 0;
    std::vector<double> history;
    /// max |div(lambda u) - div v| (nodal stencil).
    double residual_div = 0.0;
    /// max |curl u - w|.
    double residual_curl = 0.0;
    /// max |lambda u.n - v.n| over all boundary nodes.
    double residual_flux = 0.0;
};

/// Throws InvalidDataError when lambda <= 0, w has a tangential trace on the
/// walls or a divergence beyond tolerance; ConvergenceError when the Picard
/// loop does not settle within max_iter.
DivCurlSolution solve_div_curl(const DivCurlProblem& problem, const DivCurlOptions& options = {},
                               const VectorField* initial_q = nullptr);

/// Vortical velocity W: div(rho W) = 0, curl W = omega, rho W.n = 0.
DivCurlSolution solve_vortical_W(const ScalarField& rho, const VectorField& omega, const DivCurlOptions& options = {},
                                 const VectorField* initial_q = nullptr);

/// Net flux of lambda u through each of the six faces (trapezoid rule), ordered
/// x1 = 0, x1 = L, x2 = 0, x2 = 1, x3 = 0, x3 = 1, with outward normals.
std::array<double, 6> face_fluxes(const ScalarField& lambda, const VectorField& u);

}  // namespace nozzle
