#include "nozzle/potential.hpp"

#include "nozzle/errors.hpp"
#include "nozzle/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nozzle {

namespace {

PlaneField scaled(const PlaneField& f, double s) {
    PlaneField out = f;
    for (double& v : out.values) v *= s;
    return out;
}

void fill_density(const VectorField& grad, ScalarField& rho, const std::function<double(double)>& law) {
    rho = ScalarField(grad.grid, 0.0);
    parallel_for(grad.grid.size(), [&](std::size_t n) {
        const auto v = grad.at(n);
        rho.values[n] = law(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    });
}

}  // namespace

PicardResult solve_picard(const Grid& g, const DensityLaw& density, const PlaneField& g_minus,
                          const PlaneField& g_plus, const PicardOptions& options, const ScalarField* initial) {
    if (!(options.relax > 0.0 && options.relax <= 1.0)) throw DomainError("Picard relaxation must lie in (0, 1]");
    PicardResult res;
    res.phi = initial ? *initial : ScalarField(g, 0.0);
    res.phi.parity = kEven;
    ConormalProblem problem;
    problem.flux_minus = g_minus;
    problem.flux_plus = g_plus;

    double best = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= options.max_iter; ++it) {
        const VectorField grad = gradient(res.phi);
        try {
            density(grad, problem.lambda);
        } catch (const OutOfRangeError& e) {
            std::ostringstream os;
            os << "Picard iterate left the subsonic density range at iteration " << it << ": " << e.what();
            throw ConvergenceError(os.str(), res.history);
        }
        const ScalarField psi = solve_conormal(problem, options.linear, &res.phi);
        const double diff = max_abs_diff(psi, res.phi);
        const double size = max_abs(psi);
        const double rel = size > 0.0 ? diff / size : (diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        res.history.push_back(rel);
        res.iterations = it;
        if (!std::isfinite(rel) || (it > 50 && rel > 1e3 * best)) {
            throw ConvergenceError("Picard iteration diverged", res.history);
        }
        best = std::min(best, rel);
        if (rel <= options.tol) {
            res.phi = psi;
            density(gradient(res.phi), res.rho);
            return res;
        }
        for (std::size_t n = 0; n < psi.size(); ++n)
            res.phi.values[n] += options.relax * (psi.values[n] - res.phi.values[n]);
    }
    std::ostringstream os;
    os << "Picard iteration did not reach " << options.tol << " in " << options.max_iter << " iterations (last "
       << res.history.back() << ")";
    throw ConvergenceError(os.str(), res.history);
}

PotentialSolution solve_potential(const GasModel& gas, const BoundaryData& data, double theta, int m,
                                  const PicardOptions& options, const ScalarField* initial) {
    gas.validate();
    if (!(theta >= 0.0)) throw DomainError("flux multiplier theta must be non-negative");
    const Grid& g = data.grid;

    std::function<double(double)> law;
    if (m == 0) {
        law = [&gas](double q_sq) { return density_from_speed(gas, q_sq, gas.bernoulli_const); };
    } else {
        const Truncation trunc{m};
        trunc.validate();
        const double c = critical_speed(gas, gas.bernoulli_const);
        const double c2 = c * c;
        law = [&gas, trunc, c2](double q_sq) { return truncated_density(gas, trunc, q_sq, c2); };
    }
    const DensityLaw density = [&law](const VectorField& grad, ScalarField& rho) { fill_density(grad, rho, law); };

    PicardResult pr = solve_picard(g, density, scaled(data.f_minus, theta), scaled(data.f_plus, theta), options, initial);

    PotentialSolution sol;
    sol.phi = std::move(pr.phi);
    sol.u = gradient(sol.phi);
    sol.rho = std::move(pr.rho);
    sol.theta = theta;
    sol.m = m;
    sol.picard_iters = pr.iterations;
    sol.history = std::move(pr.history);
    sol.max_speed_sq = max_abs(speed_squared(sol.u));
    sol.mach_max = max_mach(gas, sol);
    return sol;
}

double max_mach(const GasModel& gas, const PotentialSolution& sol) {
    double mach = 0.0;
    const std::size_t N = sol.u.grid.size();
    for (std::size_t n = 0; n < N; ++n) {
        const auto v = sol.u.at(n);
        const double q_sq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        double rho = sol.rho.values[n];
        if (gas.bernoulli_const - 0.5 * q_sq > 0.0) rho = density_from_speed(gas, q_sq, gas.bernoulli_const);
        mach = std::max(mach, std::sqrt(q_sq) / gas.sound_speed(rho));
    }
    return mach;
}

CriticalThetaResult find_critical_theta(const GasModel& gas, const BoundaryData& data, int m,
                                        const CriticalOptions& options) {
    Truncation{m}.validate();
    if (!(options.bis_tol > 0.0)) throw DomainError("bisection tolerance must be positive");
    if (!(options.theta_start > 0.0 && options.theta_max >= options.theta_start)) {
        throw DomainError("need 0 < theta_start <= theta_max");
    }
    const double c = critical_speed(gas, gas.bernoulli_const);
    const double limit = (1.0 - 1.0 / m) * c * c;

    CriticalThetaResult res;
    res.m = m;
    res.mach_trace.push_back({0.0, 0.0, 0.0, true});

    double lo = 0.0;
    ScalarField lo_phi(data.grid, 0.0);
    auto warm = [&](double theta) {
        ScalarField w = lo_phi;
        if (lo > 0.0)
            for (double& v : w.values) v *= theta / lo;
        return w;
    };
    auto predicate = [&](double theta, ScalarField& phi_out) {
        const ScalarField w = warm(theta);
        try {
            PotentialSolution sol = solve_potential(gas, data, theta, m, options.picard, &w);
            res.mach_trace.push_back({theta, sol.mach_max, sol.max_speed_sq, true});
            phi_out = std::move(sol.phi);
            return sol.max_speed_sq <= limit;
        } catch (const ConvergenceError&) {
            res.mach_trace.push_back({theta, std::numeric_limits<double>::quiet_NaN(),
                                      std::numeric_limits<double>::quiet_NaN(), false});
            return false;
        }
    };

    double hi = std::min(options.theta_start, options.theta_max);
    ScalarField phi;
    while (true) {
        if (!predicate(hi, phi)) break;
        lo = hi;
        lo_phi = phi;
        if (hi >= options.theta_max) {
            res.open = true;
            res.theta_star = options.theta_max;
            res.bracket = {options.theta_max, std::numeric_limits<double>::infinity()};
            return res;
        }
        hi = std::min(2.0 * hi, options.theta_max);
    }
    while (hi - lo > options.bis_tol) {
        const double mid = 0.5 * (lo + hi);
        if (predicate(mid, phi)) {
            lo = mid;
            lo_phi = phi;
        } else {
            hi = mid;
        }
    }
    res.bracket = {lo, hi};
    res.theta_star = 0.5 * (lo + hi);
    std::sort(res.mach_trace.begin(), res.mach_trace.end(),
              [](const MachSample& a, const MachSample& b) { return a.theta < b.theta; });
    return res;
}

PositivityReport check_positivity_u1(const VectorField& u) {
    const Grid& g = u.grid;
    PositivityReport rep;
    rep.min_u1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k)
                if (u[0](i, j, k) < rep.min_u1) {
                    rep.min_u1 = u[0](i, j, k);
                    rep.location = g.node(i, j, k);
                }
    return rep;
}

std::vector<double> cross_section_fluxes(const ScalarField& phi, const ScalarField& rho) {
    const Grid& g = phi.grid;
    std::vector<double> out(g.n1 - 1, 0.0);
    for (int i = 0; i + 1 < g.n1; ++i) {
        double acc = 0.0;
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                const double lam = 0.5 * (rho(i, j, k) + rho(i + 1, j, k));
                acc += lam * (phi(i + 1, j, k) - phi(i, j, k)) / g.h1 * g.plane_area(j, k);
            }
        out[i] = acc;
    }
    return out;
}

double plane_integral(const Grid& g, const PlaneField& f) {
    double acc = 0.0;
    for (int j = 0; j < g.n2; ++j)
        for (int k = 0; k < g.n3; ++k) acc += g.plane_area(j, k) * f(j, k);
    return acc;
}

}  // namespace nozzle
