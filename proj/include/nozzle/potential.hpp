#pragma once

// Truncated nonlinear potential problem
//
//   div(rho_m(|grad phi|^2) grad phi) = 0,   rho_m grad(phi).n = theta f on the inlet/outlet,
//
// solved by Picard iteration with a frozen scalar coefficient, plus the
// critical flux multiplier search built on it.

#include "nozzle/boundary.hpp"
#include "nozzle/elliptic.hpp"
#include "nozzle/gas.hpp"
#include "nozzle/grid.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace nozzle {

struct PicardOptions {
    /// Stop when ||psi - phi^k||_inf <= tol * max(||psi||_inf, tiny).
    double tol = 1e-9;
    /// phi^{k+1} = (1 - relax) phi^k + relax psi.
    double relax = 0.7;
    int max_iter = 2000;
    SolverOptions linear{1e-11, 0};
};

struct PotentialSolution {
    ScalarField phi;
    VectorField u;
    ScalarField rho;
    double theta = 0.0;
    /// Truncation index; 0 means the untruncated density law.
    int m = 0;
    /// max over nodes of |grad phi|^2.
    double max_speed_sq = 0.0;
    double mach_max = 0.0;
    int picard_iters = 0;
    std::vector<double> history;
};

/// Density law evaluated on the current velocity: fills rho from grad(phi).
using DensityLaw = std::function<void(const VectorField& grad_phi, ScalarField& rho)>;

struct PicardResult {
    ScalarField phi;
    ScalarField rho;
    int iterations = 0;
    std::vector<double> history;
};

/// Generic frozen-coefficient Picard loop for div(rho grad phi) = 0 with
/// conormal data rho d(phi)/dn = g on the x1 faces. Throws ConvergenceError
/// with the update history on stagnation, divergence or density failure.
PicardResult solve_picard(const Grid& g, const DensityLaw& density, const PlaneField& g_minus,
                          const PlaneField& g_plus, const PicardOptions& options,
                          const ScalarField* initial = nullptr);

/// m = 0 selects the untruncated law rho = H(B - |grad phi|^2/2).
PotentialSolution solve_potential(const GasModel& gas, const BoundaryData& data, double theta, int m,
                                  const PicardOptions& options = {}, const ScalarField* initial = nullptr);

/// max |u| / c(rho) with rho re-evaluated without truncation where admissible.
double max_mach(const GasModel& gas, const PotentialSolution& sol);

struct MachSample {
    double theta;
    double mach_max;
    double max_speed_sq;
    bool converged;
};

struct CriticalThetaResult {
    int m = 0;
    double theta_star = 0.0;
    /// Final bisection interval: predicate holds at lo, fails at hi.
    std::pair<double, double> bracket{0.0, 0.0};
    std::vector<MachSample> mach_trace;
    /// True when the predicate never failed up to theta_max.
    bool open = false;
};

struct CriticalOptions {
    double bis_tol = 1e-3;
    double theta_start = 0.25;
    double theta_max = 4.0;
    PicardOptions picard{};
};

/// Bisection on M_m(theta) / c*^2 <= 1 - 1/m. Picard failure counts as predicate failure.
CriticalThetaResult find_critical_theta(const GasModel& gas, const BoundaryData& data, int m,
                                        const CriticalOptions& options = {});

struct PositivityReport {
    double min_u1 = 0.0;
    Point location;
};

PositivityReport check_positivity_u1(const VectorField& u);

/// Finite-volume mass flux rho_f (phi_{i+1} - phi_i)/h1 through each of the n1 - 1
/// dual x1 face planes, with rho_f the arithmetic face mean.
std::vector<double> cross_section_fluxes(const ScalarField& phi, const ScalarField& rho);

/// Trapezoid integral of f over a plane.
double plane_integral(const Grid& g, const PlaneField& f);

}  // namespace nozzle
