#pragma once

// Finite-volume solver for div(lambda grad phi) = s + div F on the vertex grid.
//
// Every node owns its trapezoid dual cell. Interior faces carry the flux
// lambda_f (phi_nb - phi) / h with lambda_f the arithmetic mean of the two
// nodes; wall faces carry no flux (the reflection ghosts make that exact);
// inlet/outlet faces carry the conormal data lambda d(phi)/dn = F.n + g.
// Integrating over a dual cell gives the symmetric system K phi = b with
//
//   (K phi)_n = sum_faces c_f (phi_n - phi_nb),
//   b_n       = sum_{x1 faces} g A - sum_faces F_f . n_out A_f - s_n V_n.

#include "nozzle/boundary.hpp"
#include "nozzle/grid.hpp"

#include <optional>
#include <vector>

namespace nozzle {

struct SolverOptions {
    /// Stop when ||b - K x||_inf <= tol ||b||_inf.
    double tol = 1e-10;
    /// 0 selects 20 * cbrt(N) * 100.
    int max_iter = 0;
};

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> history;
};

struct ConormalProblem {
    ScalarField lambda;
    /// Source in divergence form; nullopt means F = 0.
    std::optional<VectorField> rhs_div;
    /// Scalar source density s; nullopt means s = 0.
    std::optional<ScalarField> source;
    /// Extra outward conormal flux g on the inlet and outlet planes; empty planes mean zero.
    PlaneField flux_minus;
    PlaneField flux_plus;

    /// Builds a problem with lambda = 1 and no sources on the grid.
    static ConormalProblem laplace(const Grid& g);
    const Grid& grid() const { return lambda.grid; }
};

/// Matrix-free conormal (and mixed Dirichlet) operator with precomputed face coefficients.
class FluxOperator {
public:
    /// Conormal operator: Neumann on every face.
    explicit FluxOperator(const ScalarField& lambda);
    /// Unit-coefficient operator with homogeneous Dirichlet nodes on the faces
    /// whose flags are set: inlet/outlet when dirichlet_x1, and the x2 or x3
    /// walls when the corresponding parity is odd.
    FluxOperator(const Grid& g, bool dirichlet_x1, Parity parity);

    const Grid& grid() const { return grid_; }
    bool singular() const { return !has_dirichlet_; }
    bool is_dirichlet(std::size_t n) const { return has_dirichlet_ && dirichlet_[n]; }

    /// y = K x (Dirichlet rows/cols act as identity-free zero rows).
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
    const std::vector<double>& diagonal() const { return diag_; }

private:
    void build(const ScalarField* lambda);

    Grid grid_;
    std::vector<double> c1_, c2_, c3_;  // coefficient of the +x_a face of each node
    std::vector<double> diag_;
    std::vector<char> dirichlet_;
    bool has_dirichlet_ = false;
};

/// Jacobi-preconditioned CG. For singular operators b must be compatible; the
/// result is projected to zero trapezoid mean. Throws ConvergenceError.
std::vector<double> conjugate_gradient(const FluxOperator& op, const std::vector<double>& b,
                                       const std::vector<double>* initial, const SolverOptions& options,
                                       SolveStats* stats = nullptr);

/// Right-hand side b of the dual-cell system.
std::vector<double> assemble_rhs(const ConormalProblem& problem);

/// Solves the conormal problem; output has zero trapezoid mean.
/// Throws SolvabilityError when |sum b| > 1e-10 sum |b|, ConvergenceError on iteration cap.
ScalarField solve_conormal(const ConormalProblem& problem, const SolverOptions& options = {},
                           const ScalarField* initial = nullptr, SolveStats* stats = nullptr);

struct ConormalResidual {
    /// Defect density (per unit volume) at nodes off the inlet/outlet planes.
    ScalarField interior;
    /// Flux defect (per unit area) at inlet/outlet nodes; zero elsewhere.
    ScalarField flux;
    double max_interior = 0.0;
    double max_flux = 0.0;
};

/// Exact discrete defect b - K phi split into interior and boundary parts.
ConormalResidual residual(const ConormalProblem& problem, const ScalarField& phi);

/// Solves -Laplace(q) = source with homogeneous Dirichlet data on the faces
/// selected as in the mixed FluxOperator and zero Neumann data elsewhere.
ScalarField solve_poisson_mixed(const ScalarField& source, bool dirichlet_x1, const SolverOptions& options = {},
                                const ScalarField* initial = nullptr, SolveStats* stats = nullptr);

}  // namespace nozzle
