#include "nozzle/divcurl.hpp"

#include "nozzle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nozzle {

namespace {

void validate(const DivCurlProblem& p, double div_ratio) {
    const Grid& g = p.lambda.grid;
    if (!(p.w.grid == g) || (p.v && !(p.v->grid == g))) throw InvalidDataError("div-curl fields live on different grids");
    for (double v : p.lambda.values)
        if (!(v > 0.0)) throw InvalidDataError("div-curl coefficient lambda must be positive");
    if (p.w.parity() != kAxialParity) throw InvalidDataError("w must carry vorticity parity");
    if (p.v && p.v->parity() != kPolarParity) throw InvalidDataError("v must carry velocity parity");

    const double scale = max_abs(p.w);
    if (scale == 0.0) return;
    double tangential = 0.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                if (g.on_wall2(j)) tangential = std::max({tangential, std::abs(p.w[0](i, j, k)), std::abs(p.w[2](i, j, k))});
                if (g.on_wall3(k)) tangential = std::max({tangential, std::abs(p.w[0](i, j, k)), std::abs(p.w[1](i, j, k))});
            }
    if (tangential > 1e-12 * scale) {
        std::ostringstream os;
        os << "w has tangential trace " << tangential << " on the walls";
        throw InvalidDataError(os.str());
    }
    double dmax = 0.0;
    for (int a = 0; a < 3; ++a) dmax = std::max(dmax, max_abs(partial(p.w[a], a)));
    const double div = max_abs(divergence(p.w));
    if (div > div_ratio * dmax + 1e-14 * scale) {
        std::ostringstream os;
        os << "w is not divergence free: max |div w| = " << div << " against " << dmax;
        throw InvalidDataError(os.str());
    }
}

bool is_constant(const ScalarField& f) {
    return std::all_of(f.values.begin(), f.values.end(), [&](double v) { return v == f.values[0]; });
}

}  // namespace

std::array<double, 6> face_fluxes(const ScalarField& lambda, const VectorField& u) {
    const Grid& g = u.grid;
    std::array<double, 6> out{};
    auto w = [](int idx, int n) { return (idx == 0 || idx == n - 1) ? 0.5 : 1.0; };
    for (int j = 0; j < g.n2; ++j)
        for (int k = 0; k < g.n3; ++k) {
            const double A = g.plane_area(j, k);
            out[0] -= A * lambda(0, j, k) * u[0](0, j, k);
            out[1] += A * lambda(g.n1 - 1, j, k) * u[0](g.n1 - 1, j, k);
        }
    for (int i = 0; i < g.n1; ++i)
        for (int k = 0; k < g.n3; ++k) {
            const double A = w(i, g.n1) * w(k, g.n3) * g.h1 * g.h3;
            out[2] -= A * lambda(i, 0, k) * u[1](i, 0, k);
            out[3] += A * lambda(i, g.n2 - 1, k) * u[1](i, g.n2 - 1, k);
        }
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const double A = w(i, g.n1) * w(j, g.n2) * g.h1 * g.h2;
            out[4] -= A * lambda(i, j, 0) * u[2](i, j, 0);
            out[5] += A * lambda(i, j, g.n3 - 1) * u[2](i, j, g.n3 - 1);
        }
    return out;
}

DivCurlSolution solve_div_curl(const DivCurlProblem& problem, const DivCurlOptions& options, const VectorField* initial_q) {
    validate(problem, options.div_ratio);
    const Grid& g = problem.lambda.grid;
    const ScalarField& lam = problem.lambda;
    DivCurlSolution sol;

    // Scalar potential.
    sol.phi_hat = ScalarField(g, 0.0);
    if (problem.v && max_abs(*problem.v) > 0.0) {
        ConormalProblem cp;
        cp.lambda = lam;
        cp.rhs_div = *problem.v;
        cp.flux_minus = PlaneField(g);
        cp.flux_plus = PlaneField(g);
        sol.phi_hat = solve_conormal(cp, options.linear);
    }

    // Vector potential.
    ScalarField inv(g, 0.0);
    for (std::size_t n = 0; n < g.size(); ++n) inv.values[n] = 1.0 / lam.values[n];
    const VectorField grad_inv = gradient(inv);
    const bool constant = is_constant(lam);
    VectorField lw = scale(problem.w, lam);

    sol.q = initial_q ? *initial_q : VectorField(g, kAxialParity);
    if (max_abs(problem.w) == 0.0 && !initial_q) {
        sol.picard_iters = 0;
    } else {
        for (int it = 1;; ++it) {
            VectorField src = lw;
            if (!constant) {
                const VectorField coupling = scale(cross(grad_inv, curl(sol.q)), lam);
                src = add(lw, coupling, -1.0);
            }
            VectorField next(g, kAxialParity);
            for (int c = 0; c < 3; ++c) {
                src[c].parity = kAxialParity[c];
                next[c] = solve_poisson_mixed(src[c], c != 0, options.linear, &sol.q[c]);
            }
            const double diff = max_abs_diff(next, sol.q);
            const double size = max_abs(next);
            const double rel = size > 0.0 ? diff / size : 0.0;
            sol.history.push_back(rel);
            sol.picard_iters = it;
            if (constant || rel <= options.tol) {
                sol.q = std::move(next);
                break;
            }
            if (!std::isfinite(rel) || it >= options.max_iter) {
                std::ostringstream os;
                os << "vector potential Picard stalled at relative update " << rel << " after " << it << " iterations";
                throw ConvergenceError(os.str(), sol.history);
            }
            for (int c = 0; c < 3; ++c)
                for (std::size_t n = 0; n < g.size(); ++n)
                    sol.q[c].values[n] += options.relax * (next[c].values[n] - sol.q[c].values[n]);
        }
    }
    enforce_parity(sol.q);

    sol.u = add(gradient(sol.phi_hat), scale(curl(sol.q), inv));
    enforce_parity(sol.u);

    // Residuals of the three equations.
    VectorField lu = scale(sol.u, lam);
    VectorField flux_defect = lu;
    if (problem.v) flux_defect = add(lu, *problem.v, -1.0);
    sol.residual_div = max_abs(divergence(flux_defect));
    sol.residual_curl = max_abs_diff(curl(sol.u), problem.w);
    double rf = 0.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                if (i == 0 || i == g.n1 - 1) rf = std::max(rf, std::abs(flux_defect[0](i, j, k)));
                if (g.on_wall2(j)) rf = std::max(rf, std::abs(flux_defect[1](i, j, k)));
                if (g.on_wall3(k)) rf = std::max(rf, std::abs(flux_defect[2](i, j, k)));
            }
    sol.residual_flux = rf;
    return sol;
}

DivCurlSolution solve_vortical_W(const ScalarField& rho, const VectorField& omega, const DivCurlOptions& options,
                                 const VectorField* initial_q) {
    DivCurlProblem p;
    p.lambda = rho;
    p.w = omega;
    return solve_div_curl(p, options, initial_q);
}

}  // namespace nozzle
