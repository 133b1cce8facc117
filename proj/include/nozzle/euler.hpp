#pragma once

// Fixed-point map u -> grad(phi) + W for the steady Euler system:
//   1. trace streamlines of u back to the inlet and pull back B0,
//   2. transport the inlet vorticity along them,
//   3. check the vorticity constraints,
//   4. W from the div-curl system with lambda = H(B - |u|^2/2), w = omega, v = 0,
//   6. phi from div(H(B - |grad phi + W|^2/2) grad phi) = 0 with flux f,
// iterated from the background potential flow.

#include "nozzle/boundary.hpp"
#include "nozzle/divcurl.hpp"
#include "nozzle/gas.hpp"
#include "nozzle/potential.hpp"
#include "nozzle/streamline.hpp"
#include "nozzle/transport.hpp"

#include <optional>
#include <vector>

namespace nozzle {

struct EulerConfig {
    /// Admissible-set radius as a fraction of sigma0 = min background u1.
    double sigma_fraction = 0.5;
    double fp_tol = 1e-8;
    int max_outer = 30;
    /// Blending factor alpha in (1 - alpha) u + alpha T(u); halved on guard violation.
    double underrelax = 1.0;
    double min_underrelax = 1.0 / 64.0;
    double u1_floor = 1e-8;
    TraceOptions trace{};
    PicardOptions picard{1e-11, 1.0, 2000, SolverOptions{1e-12, 0}};
    DivCurlOptions divcurl{};
};

/// Background flow: untruncated potential solution with the data's flux.
PotentialSolution background_flow(const GasModel& gas, const BoundaryData& data, const EulerConfig& cfg = {});

struct MapResult {
    VectorField v;
    ScalarField phi;
    ScalarField B;
    ScalarField rho;
    VectorField omega;
    VectorField W;
    VectorField q;
    VorticityDiagnostics vorticity;
};

/// Warm starts carried between applications of the map.
struct MapWarmStart {
    const ScalarField* phi = nullptr;
    const VectorField* q = nullptr;
};

/// Checks min u1 > sigma0/2 and ||u - background||_inf <= sigma; throws AdmissibilityError.
void check_admissible(const VectorField& u, const VectorField& background, const EulerConfig& cfg);

/// One application of the map (steps 1, 2, 3, 4, 6). Guards are checked on u_n first.
MapResult fixed_point_map(const VectorField& u_n, const VectorField& background, const BoundaryData& data,
                          const GasModel& gas, const EulerConfig& cfg, const MapWarmStart& warm = {});

/// Picard for div(H(B - |grad phi + W|^2/2) grad phi) = 0 with conormal data f.
PicardResult solve_nonlinear_potential(const ScalarField& B, const VectorField& W, const BoundaryData& data,
                                       const GasModel& gas, const PicardOptions& options = {},
                                       const ScalarField* initial = nullptr);

/// The seven Euler residuals, each in the max norm and in the volume-weighted
/// RMS norm (area-weighted on the inlet/outlet planes for the plane residuals).
struct EulerResiduals {
    static constexpr int kCount = 7;
    std::array<double, kCount> max{};
    std::array<double, kCount> rms{};

    static std::array<const char*, kCount> names() {
        return {"mass", "bernoulli_transport", "vorticity_transport", "momentum", "inlet_compatibility",
                "boundary_flux", "curl_consistency"};
    }
};

struct EulerSolution {
    VectorField u;
    ScalarField rho;
    ScalarField B;
    VectorField omega;
    VectorField W;
    ScalarField phi;
    VectorField background;
    /// ||u^n - u^{n-1}||_inf per outer iteration.
    std::vector<double> history;
    /// Blending factor used at each iteration.
    std::vector<double> relax;
    bool converged = false;
    int iterations = 0;
    double sigma0 = 0.0;
    EulerResiduals residuals;
    VorticityDiagnostics vorticity;
};

/// Iterates the map from u0 (default: background) until the update is below
/// fp_tol. Non-convergence is reported through `converged` and the history.
EulerSolution run_euler(const BoundaryData& data, const GasModel& gas, const EulerConfig& cfg = {},
                        const VectorField* u0 = nullptr);

/// Residuals of the Euler system on the nodes (all by the grid's derivative stencils):
/// div(rho u), u.grad B, the vorticity transport equation, u x curl(u) - grad B,
/// the tangential inlet identity (u x omega).tau = grad(B).tau, rho u.n - f on the
/// inlet/outlet, and curl(u) - omega.
EulerResiduals verify_euler_residuals(const EulerSolution& sol, const BoundaryData& data);

}  // namespace nozzle
