#include "nozzle/transport.hpp"

#include "nozzle/errors.hpp"
#include "nozzle/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nozzle {

ScalarField bernoulli_field(const BoundaryData& data, const FootPoints& feet) {
    const Grid& g = feet.gamma2.grid;
    ScalarField B(g, 0.0);
    const double tol = 1e-12;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double a = feet.gamma2.values[n];
        const double b = feet.gamma3.values[n];
        if (!(a >= -tol && a <= 1.0 + tol && b >= -tol && b <= 1.0 + tol)) {
            std::ostringstream os;
            os << "foot point (" << a << ", " << b << ") lies outside the inlet";
            throw IntegrationError(os.str());
        }
        B.values[n] = data.B0_at(a, b);
    }
    return B;
}

InletVector vorticity_initial(const BoundaryData& data, const VectorField& u, double u1_floor) {
    const Grid& g = u.grid;
    InletVector lam{PlaneField(g, 0.0, kAxialParity[0]), PlaneField(g, 0.0, kAxialParity[1]),
                    PlaneField(g, 0.0, kAxialParity[2])};
    for (int j = 0; j < g.n2; ++j)
        for (int k = 0; k < g.n3; ++k) {
            const double u1 = u[0](0, j, k);
            if (!(u1 > u1_floor)) {
                std::ostringstream os;
                os << "inlet u1 = " << u1 << " at (" << g.x2(j) << ", " << g.x3(k) << ") is not above the floor";
                throw DegeneracyError(os.str());
            }
            const double kap = data.kappa_at_node(j, k);
            const double u2 = u[1](0, j, k);
            const double u3 = u[2](0, j, k);
            lam[0](j, k) = -kap;
            lam[1](j, k) = (data.dB0(2, j, k) - kap * u2) / u1;
            lam[2](j, k) = -(kap * u3 + data.dB0(1, j, k)) / u1;
        }
    for (auto& p : lam) enforce_parity(p);
    return lam;
}

std::array<ScalarField, 9> transport_matrix(const VectorField& u) {
    const Grid& g = u.grid;
    const ScalarField div = divergence(u);
    std::array<ScalarField, 9> V;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            ScalarField d = partial(u[a], b);
            for (std::size_t n = 0; n < g.size(); ++n) {
                const double diag = a == b ? div.values[n] : 0.0;
                d.values[n] = (diag - d.values[n]) / u[0].values[n];
            }
            enforce_parity(d);
            V[3 * a + b] = std::move(d);
        }
    return V;
}

VorticityState transport_vorticity(const VectorField& u, const InletVector& lambda0, const TraceOptions& options,
                                   double u1_floor) {
    const Grid& g = u.grid;
    VorticityState st;
    st.omega = VectorField(g, kAxialParity);
    st.lambda0 = lambda0;

    double scale = 0.0;
    for (const auto& p : lambda0)
        for (double v : p.values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return st;

    const VelocityRatio U = extend_velocity_ratio(u, u1_floor);
    const std::array<ScalarField, 9> V = transport_matrix(u);
    const double limit = options.accept_factor * options.rk_tol * scale;
    std::vector<double> richardson(g.size(), 0.0);

    parallel_for(g.size(), [&](std::size_t n) {
        const int k = static_cast<int>(n % g.n3);
        const int j = static_cast<int>((n / g.n3) % g.n2);
        const int i = static_cast<int>(n / (static_cast<std::size_t>(g.n2) * g.n3));
        if (i == 0) {
            for (int c = 0; c < 3; ++c) st.omega[c].values[n] = lambda0[c](j, k);
            return;
        }
        TraceOptions loose = options;
        loose.accept_factor = std::numeric_limits<double>::infinity();
        const StreamlineTrace tr = trace_to_inlet(U, g.node(i, j, k), loose);
        const int steps = static_cast<int>(tr.s.size()) - 1;
        std::vector<std::array<double, 9>> Vs(tr.s.size());
        for (std::size_t q = 0; q < tr.s.size(); ++q) {
            const Point p{tr.s[q], tr.X2[q], tr.X3[q]};
            for (int e = 0; e < 9; ++e) Vs[q][e] = interpolate_cubic(V[e], p);
        }
        const double delta = tr.s[1] - tr.s[0];
        auto M = [&](double s) {
            const auto q = static_cast<std::size_t>(std::lround((s - tr.s[0]) / delta));
            return Vs[std::min(q, Vs.size() - 1)];
        };
        std::array<double, 3> y0;
        for (int c = 0; c < 3; ++c) y0[c] = lambda0[c].interpolate_cubic(tr.foot2, tr.foot3);
        const auto fine = integrate_linear(M, y0, tr.s[0], 2.0 * delta, steps / 2);
        const auto coarse = integrate_linear(M, y0, tr.s[0], 4.0 * delta, steps / 4);
        double r = 0.0;
        for (int c = 0; c < 3; ++c) {
            st.omega[c].values[n] = fine[c];
            r = std::max(r, std::abs(fine[c] - coarse[c]));
        }
        richardson[n] = std::max(r, tr.richardson * scale);
    });
    enforce_parity(st.omega);
    const auto worst = std::max_element(richardson.begin(), richardson.end());
    st.richardson = *worst;
    if (st.richardson > limit) {
        std::ostringstream os;
        os << "vorticity transport step-halving check " << st.richardson << " exceeds " << limit;
        throw IntegrationError(os.str());
    }
    return st;
}

VorticityDiagnostics check_vorticity_constraints(const VectorField& omega, const VectorField& u) {
    const Grid& g = omega.grid;
    VorticityDiagnostics d;
    d.div_max = max_abs(divergence(omega));
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                if (g.on_wall2(j))
                    d.wall_tangential = std::max({d.wall_tangential, std::abs(omega[0](i, j, k)), std::abs(omega[2](i, j, k))});
                if (g.on_wall3(k))
                    d.wall_tangential = std::max({d.wall_tangential, std::abs(omega[0](i, j, k)), std::abs(omega[1](i, j, k))});
            }
    std::array<std::array<ScalarField, 3>, 3> dw;
    std::array<std::array<ScalarField, 3>, 3> du;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            dw[a][b] = partial(omega[a], b);
            du[a][b] = partial(u[a], b);
        }
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double divu = du[0][0].values[n] + du[1][1].values[n] + du[2][2].values[n];
        for (int a = 0; a < 3; ++a) {
            double r = omega[a].values[n] * divu;
            for (int b = 0; b < 3; ++b)
                r += u[b].values[n] * dw[a][b].values[n] - omega[b].values[n] * du[a][b].values[n];
            d.transport_residual = std::max(d.transport_residual, std::abs(r));
        }
    }
    return d;
}

}  // namespace nozzle
