#include "nozzle/euler.hpp"

#include "nozzle/errors.hpp"
#include "nozzle/parallel.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <sstream>

namespace nozzle {

namespace {

double min_u1(const VectorField& u) {
    return *std::min_element(u[0].values.begin(), u[0].values.end());
}

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string(stage) + ": " + e.what(), e.history());
    } catch (const DegeneracyError& e) {
        throw DegeneracyError(std::string(stage) + ": " + e.what());
    } catch (const IntegrationError& e) {
        throw IntegrationError(std::string(stage) + ": " + e.what());
    } catch (const InvalidDataError& e) {
        throw InvalidDataError(std::string(stage) + ": " + e.what());
    }
}

ScalarField density_field(const GasModel& gas, const ScalarField& B, const VectorField& u) {
    ScalarField rho(B.grid, 0.0);
    for (std::size_t n = 0; n < rho.size(); ++n) {
        const auto v = u.at(n);
        rho.values[n] = density_from_speed(gas, v[0] * v[0] + v[1] * v[1] + v[2] * v[2], B.values[n]);
    }
    return rho;
}

}  // namespace

PotentialSolution background_flow(const GasModel& gas, const BoundaryData& data, const EulerConfig& cfg) {
    return staged("background", [&] { return solve_potential(gas, data, 1.0, 0, cfg.picard); });
}

void check_admissible(const VectorField& u, const VectorField& background, const EulerConfig& cfg) {
    const double sigma0 = min_u1(background);
    const double m = min_u1(u);
    if (!(m > 0.5 * sigma0)) {
        std::ostringstream os;
        os << "iterate has min u1 = " << m << ", not above sigma0/2 = " << 0.5 * sigma0;
        throw AdmissibilityError(os.str(), m);
    }
    const double dist = max_abs_diff(u, background);
    const double sigma = cfg.sigma_fraction * sigma0;
    if (!(dist <= sigma)) {
        std::ostringstream os;
        os << "iterate is " << dist << " from the background flow, beyond sigma = " << sigma;
        throw AdmissibilityError(os.str(), dist);
    }
}

PicardResult solve_nonlinear_potential(const ScalarField& B, const VectorField& W, const BoundaryData& data,
                                       const GasModel& gas, const PicardOptions& options, const ScalarField* initial) {
    const Grid& g = B.grid;
    const DensityLaw law = [&](const VectorField& grad, ScalarField& rho) {
        rho = ScalarField(g, 0.0);
        parallel_for(g.size(), [&](std::size_t n) {
            double q_sq = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double v = grad[c].values[n] + W[c].values[n];
                q_sq += v * v;
            }
            rho.values[n] = density_from_speed(gas, q_sq, B.values[n]);
        });
    };
    return solve_picard(g, law, data.f_minus, data.f_plus, options, initial);
}

MapResult fixed_point_map(const VectorField& u_n, const VectorField& background, const BoundaryData& data,
                          const GasModel& gas, const EulerConfig& cfg, const MapWarmStart& warm) {
    check_admissible(u_n, background, cfg);
    MapResult r;
    const FootPoints feet = staged("streamlines", [&] { return trace_field(u_n, cfg.trace, cfg.u1_floor); });
    r.B = bernoulli_field(data, feet);
    const InletVector lambda0 = staged("inlet vorticity", [&] { return vorticity_initial(data, u_n, cfg.u1_floor); });
    r.omega = staged("vorticity transport",
                     [&] { return transport_vorticity(u_n, lambda0, cfg.trace, cfg.u1_floor).omega; });
    r.vorticity = check_vorticity_constraints(r.omega, u_n);
    r.rho = density_field(gas, r.B, u_n);
    const DivCurlSolution dc = staged("vortical part", [&] { return solve_vortical_W(r.rho, r.omega, cfg.divcurl, warm.q); });
    r.W = dc.u;
    r.q = dc.q;
    PicardResult pr =
        staged("nonlinear potential", [&] { return solve_nonlinear_potential(r.B, r.W, data, gas, cfg.picard, warm.phi); });
    r.phi = std::move(pr.phi);
    r.v = add(gradient(r.phi), r.W);
    enforce_parity(r.v);
    return r;
}

EulerSolution run_euler(const BoundaryData& data, const GasModel& gas, const EulerConfig& cfg, const VectorField* u0) {
    gas.validate();
    data.validate();
    if (!(cfg.sigma_fraction > 0.0 && cfg.sigma_fraction < 1.0)) throw DomainError("sigma_fraction must lie in (0, 1)");
    if (!(cfg.underrelax > 0.0 && cfg.underrelax <= 1.0)) throw DomainError("underrelax must lie in (0, 1]");
    EulerSolution sol;
    const PotentialSolution bg = background_flow(gas, data, cfg);
    sol.background = bg.u;
    sol.sigma0 = min_u1(bg.u);
    if (!(sol.sigma0 > cfg.u1_floor)) throw DegeneracyError("background flow has no positive u1 margin");

    VectorField u = u0 ? *u0 : bg.u;
    ScalarField phi = bg.phi;
    VectorField q;
    bool have_q = false;
    double alpha = cfg.underrelax;
    MapResult last;
    for (int it = 1; it <= cfg.max_outer; ++it) {
        MapWarmStart warm{&phi, have_q ? &q : nullptr};
        last = fixed_point_map(u, sol.background, data, gas, cfg, warm);
        phi = last.phi;
        q = last.q;
        have_q = true;
        VectorField next;
        while (true) {
            next = alpha == 1.0 ? last.v : add(scale(u, ScalarField(u.grid, 1.0 - alpha)), last.v, alpha);
            try {
                check_admissible(next, sol.background, cfg);
                break;
            } catch (const AdmissibilityError&) {
                if (alpha * 0.5 < cfg.min_underrelax) throw;
                alpha *= 0.5;
            }
        }
        const double diff = max_abs_diff(next, u);
        sol.history.push_back(diff);
        sol.relax.push_back(alpha);
        sol.iterations = it;
        u = std::move(next);
        if (!std::isfinite(diff)) break;
        if (diff <= cfg.fp_tol) {
            sol.converged = true;
            break;
        }
    }
    sol.u = std::move(u);
    sol.B = last.B;
    sol.omega = last.omega;
    sol.W = last.W;
    sol.phi = last.phi;
    sol.vorticity = last.vorticity;
    sol.rho = density_field(gas, sol.B, sol.u);
    sol.residuals = verify_euler_residuals(sol, data);
    return sol;
}

namespace {

// Running max / weighted mean-square accumulator.
struct Norms {
    double max = 0.0;
    double sum = 0.0;
    double weight = 0.0;
    void add(double value, double w) {
        max = std::max(max, std::abs(value));
        sum += w * value * value;
        weight += w;
    }
    double rms() const { return weight > 0.0 ? std::sqrt(sum / weight) : 0.0; }
};

Norms volume_norms(const Grid& g, const std::function<double(std::size_t)>& value) {
    Norms nm;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) nm.add(value(g.index(i, j, k)), g.volume(i, j, k));
    return nm;
}

}  // namespace

EulerResiduals verify_euler_residuals(const EulerSolution& sol, const BoundaryData& data) {
    const Grid& g = sol.u.grid;
    const VectorField& u = sol.u;
    const VectorField& w = sol.omega;
    EulerResiduals r;
    std::array<Norms, EulerResiduals::kCount> nm;

    const ScalarField mass = divergence(scale(u, sol.rho));
    nm[0] = volume_norms(g, [&](std::size_t n) { return mass.values[n]; });

    const VectorField gradB = gradient(sol.B);
    const ScalarField ub = dot(u, gradB);
    nm[1] = volume_norms(g, [&](std::size_t n) { return ub.values[n]; });

    std::array<std::array<ScalarField, 3>, 3> dw;
    std::array<std::array<ScalarField, 3>, 3> du;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            dw[a][b] = partial(w[a], b);
            du[a][b] = partial(u[a], b);
        }
    const VectorField curl_u = curl(u);
    const VectorField uxc = cross(u, curl_u);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                const std::size_t n = g.index(i, j, k);
                const double V = g.volume(i, j, k);
                const double divu = du[0][0].values[n] + du[1][1].values[n] + du[2][2].values[n];
                double vt = 0.0;
                double mom = 0.0;
                double cc = 0.0;
                for (int a = 0; a < 3; ++a) {
                    double t = w[a].values[n] * divu;
                    for (int b = 0; b < 3; ++b) t += u[b].values[n] * dw[a][b].values[n] - w[b].values[n] * du[a][b].values[n];
                    vt += t * t;
                    const double m = uxc[a].values[n] - gradB[a].values[n];
                    mom += m * m;
                    const double c = curl_u[a].values[n] - w[a].values[n];
                    cc += c * c;
                }
                nm[2].add(std::sqrt(vt), V);
                nm[3].add(std::sqrt(mom), V);
                nm[6].add(std::sqrt(cc), V);
            }

    const VectorField uxw = cross(u, w);
    for (int j = 0; j < g.n2; ++j)
        for (int k = 0; k < g.n3; ++k) {
            const double A = g.plane_area(j, k);
            const double t2 = uxw[1](0, j, k) - gradB[1](0, j, k);
            const double t3 = uxw[2](0, j, k) - gradB[2](0, j, k);
            nm[4].add(std::hypot(t2, t3), A);
            const double in = -sol.rho(0, j, k) * u[0](0, j, k);
            const double out = sol.rho(g.n1 - 1, j, k) * u[0](g.n1 - 1, j, k);
            nm[5].add(in - data.f_minus(j, k), A);
            nm[5].add(out - data.f_plus(j, k), A);
        }
    for (int c = 0; c < EulerResiduals::kCount; ++c) {
        r.max[c] = nm[c].max;
        r.rms[c] = nm[c].rms();
    }
    return r;
}

}  // namespace nozzle
