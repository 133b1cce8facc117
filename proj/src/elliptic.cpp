#include "nozzle/elliptic.hpp"

#include "nozzle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nozzle {

namespace {

double node_weight(int idx, int n) { return (idx == 0 || idx == n - 1) ? 0.5 : 1.0; }

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
    return s;
}

}  // namespace

ConormalProblem ConormalProblem::laplace(const Grid& g) {
    ConormalProblem p;
    p.lambda = ScalarField(g, 1.0);
    p.flux_minus = PlaneField(g);
    p.flux_plus = PlaneField(g);
    return p;
}

FluxOperator::FluxOperator(const ScalarField& lambda) : grid_(lambda.grid) {
    for (double v : lambda.values) {
        if (!(v > 0.0)) throw DomainError("conormal coefficient lambda must be positive");
    }
    build(&lambda);
}

FluxOperator::FluxOperator(const Grid& g, bool dirichlet_x1, Parity parity) : grid_(g) {
    dirichlet_.assign(g.size(), 0);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                const bool d = (dirichlet_x1 && (i == 0 || i == g.n1 - 1)) ||
                               (parity.x2 < 0 && (j == 0 || j == g.n2 - 1)) ||
                               (parity.x3 < 0 && (k == 0 || k == g.n3 - 1));
                if (d) {
                    dirichlet_[g.index(i, j, k)] = 1;
                    has_dirichlet_ = true;
                }
            }
    build(nullptr);
}

void FluxOperator::build(const ScalarField* lambda) {
    const Grid& g = grid_;
    c1_.assign(g.size(), 0.0);
    c2_.assign(g.size(), 0.0);
    c3_.assign(g.size(), 0.0);
    diag_.assign(g.size(), 0.0);
    auto lam = [&](std::size_t a, std::size_t b) {
        return lambda ? 0.5 * (lambda->values[a] + lambda->values[b]) : 1.0;
    };
    for (int i = 0; i < g.n1; ++i) {
        const double w1 = node_weight(i, g.n1);
        for (int j = 0; j < g.n2; ++j) {
            const double w2 = node_weight(j, g.n2);
            for (int k = 0; k < g.n3; ++k) {
                const double w3 = node_weight(k, g.n3);
                const std::size_t n = g.index(i, j, k);
                if (i + 1 < g.n1) {
                    const std::size_t m = g.index(i + 1, j, k);
                    c1_[n] = lam(n, m) * w2 * w3 * g.h2 * g.h3 / g.h1;
                    diag_[n] += c1_[n];
                    diag_[m] += c1_[n];
                }
                if (j + 1 < g.n2) {
                    const std::size_t m = g.index(i, j + 1, k);
                    c2_[n] = lam(n, m) * w1 * w3 * g.h1 * g.h3 / g.h2;
                    diag_[n] += c2_[n];
                    diag_[m] += c2_[n];
                }
                if (k + 1 < g.n3) {
                    const std::size_t m = g.index(i, j, k + 1);
                    c3_[n] = lam(n, m) * w1 * w2 * g.h1 * g.h2 / g.h3;
                    diag_[n] += c3_[n];
                    diag_[m] += c3_[n];
                }
            }
        }
    }
    if (has_dirichlet_) {
        for (std::size_t n = 0; n < g.size(); ++n)
            if (dirichlet_[n]) diag_[n] = 1.0;
    }
}

void FluxOperator::apply(const std::vector<double>& x, std::vector<double>& y) const {
    const Grid& g = grid_;
    y.assign(g.size(), 0.0);
    const std::size_t s1 = static_cast<std::size_t>(g.n2) * g.n3;
    const std::size_t s2 = static_cast<std::size_t>(g.n3);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                const std::size_t n = g.index(i, j, k);
                const double xn = x[n];
                if (i + 1 < g.n1) {
                    const double d = c1_[n] * (xn - x[n + s1]);
                    y[n] += d;
                    y[n + s1] -= d;
                }
                if (j + 1 < g.n2) {
                    const double d = c2_[n] * (xn - x[n + s2]);
                    y[n] += d;
                    y[n + s2] -= d;
                }
                if (k + 1 < g.n3) {
                    const double d = c3_[n] * (xn - x[n + 1]);
                    y[n] += d;
                    y[n + 1] -= d;
                }
            }
    if (has_dirichlet_) {
        for (std::size_t n = 0; n < y.size(); ++n)
            if (dirichlet_[n]) y[n] = 0.0;
    }
}

namespace {

void project_zero_mean(const Grid& g, std::vector<double>& x) {
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                const double w = g.volume(i, j, k);
                num += w * x[g.index(i, j, k)];
                den += w;
            }
    const double m = num / den;
    for (double& v : x) v -= m;
}

}  // namespace

std::vector<double> conjugate_gradient(const FluxOperator& op, const std::vector<double>& b_in,
                                       const std::vector<double>* initial, const SolverOptions& options,
                                       SolveStats* stats) {
    const Grid& g = op.grid();
    const std::size_t N = g.size();
    std::vector<double> b = b_in;
    for (std::size_t n = 0; n < N; ++n)
        if (op.is_dirichlet(n)) b[n] = 0.0;

    const int max_iter =
        options.max_iter > 0 ? options.max_iter : static_cast<int>(2000.0 * std::cbrt(static_cast<double>(N)));
    SolveStats local;
    SolveStats& st = stats ? *stats : local;
    st = SolveStats{};

    std::vector<double> x = initial ? *initial : std::vector<double>(N, 0.0);
    for (std::size_t n = 0; n < N; ++n)
        if (op.is_dirichlet(n)) x[n] = 0.0;

    const double bnorm = max_abs(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return x;
    }
    const double target = options.tol * bnorm;
    const auto& diag = op.diagonal();

    std::vector<double> r(N), z(N), p(N), Ap(N);
    op.apply(x, Ap);
    for (std::size_t n = 0; n < N; ++n) r[n] = b[n] - Ap[n];
    double rnorm = max_abs(r);
    st.history.push_back(rnorm / bnorm);
    int it = 0;
    while (rnorm > target && it < max_iter) {
        for (std::size_t n = 0; n < N; ++n) z[n] = r[n] / diag[n];
        p = z;
        double rz = dot(r, z);
        // Inner sweep; restarted from the true residual every 200 iterations to limit drift.
        for (int inner = 0; inner < 200 && it < max_iter; ++inner, ++it) {
            op.apply(p, Ap);
            const double pAp = dot(p, Ap);
            if (!(pAp > 0.0)) break;
            const double alpha = rz / pAp;
            for (std::size_t n = 0; n < N; ++n) {
                x[n] += alpha * p[n];
                r[n] -= alpha * Ap[n];
            }
            rnorm = max_abs(r);
            st.history.push_back(rnorm / bnorm);
            if (rnorm <= target) {
                ++it;
                break;
            }
            for (std::size_t n = 0; n < N; ++n) z[n] = r[n] / diag[n];
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t n = 0; n < N; ++n) p[n] = z[n] + beta * p[n];
        }
        op.apply(x, Ap);
        for (std::size_t n = 0; n < N; ++n) r[n] = b[n] - Ap[n];
        rnorm = max_abs(r);
    }
    st.iterations = it;
    st.relative_residual = rnorm / bnorm;
    if (rnorm > target) {
        std::ostringstream os;
        os << "conjugate gradient stalled at relative residual " << rnorm / bnorm << " after " << it
           << " iterations";
        throw ConvergenceError(os.str(), st.history);
    }
    if (op.singular()) project_zero_mean(g, x);
    return x;
}

std::vector<double> assemble_rhs(const ConormalProblem& problem) {
    const Grid& g = problem.grid();
    std::vector<double> b(g.size(), 0.0);
    const bool has_minus = !problem.flux_minus.values.empty();
    const bool has_plus = !problem.flux_plus.values.empty();
    for (int j = 0; j < g.n2; ++j)
        for (int k = 0; k < g.n3; ++k) {
            const double A = g.plane_area(j, k);
            if (has_minus) b[g.index(0, j, k)] += problem.flux_minus(j, k) * A;
            if (has_plus) b[g.index(g.n1 - 1, j, k)] += problem.flux_plus(j, k) * A;
        }
    if (problem.rhs_div) {
        const VectorField& F = *problem.rhs_div;
        for (int i = 0; i < g.n1; ++i) {
            const double w1 = node_weight(i, g.n1);
            for (int j = 0; j < g.n2; ++j) {
                const double w2 = node_weight(j, g.n2);
                for (int k = 0; k < g.n3; ++k) {
                    const double w3 = node_weight(k, g.n3);
                    const std::size_t n = g.index(i, j, k);
                    if (i + 1 < g.n1) {
                        const std::size_t m = g.index(i + 1, j, k);
                        const double flux = 0.5 * (F[0].values[n] + F[0].values[m]) * w2 * w3 * g.h2 * g.h3;
                        b[n] -= flux;
                        b[m] += flux;
                    }
                    if (j + 1 < g.n2) {
                        const std::size_t m = g.index(i, j + 1, k);
                        const double flux = 0.5 * (F[1].values[n] + F[1].values[m]) * w1 * w3 * g.h1 * g.h3;
                        b[n] -= flux;
                        b[m] += flux;
                    }
                    if (k + 1 < g.n3) {
                        const std::size_t m = g.index(i, j, k + 1);
                        const double flux = 0.5 * (F[2].values[n] + F[2].values[m]) * w1 * w2 * g.h1 * g.h2;
                        b[n] -= flux;
                        b[m] += flux;
                    }
                }
            }
        }
    }
    if (problem.source) {
        const ScalarField& s = *problem.source;
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j)
                for (int k = 0; k < g.n3; ++k) b[g.index(i, j, k)] -= s(i, j, k) * g.volume(i, j, k);
    }
    return b;
}

ScalarField solve_conormal(const ConormalProblem& problem, const SolverOptions& options, const ScalarField* initial,
                           SolveStats* stats) {
    const Grid& g = problem.grid();
    std::vector<double> b = assemble_rhs(problem);
    double sum = 0.0;
    double scale = 0.0;
    for (double v : b) {
        sum += v;
        scale += std::abs(v);
    }
    if (std::abs(sum) > 1e-10 * scale) {
        std::ostringstream os;
        os << "conormal data incompatible: net flux " << sum << " against scale " << scale;
        throw SolvabilityError(os.str(), sum);
    }
    // Remove the round-off defect with a volume-weighted constant source.
    double total_volume = 0.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) total_volume += g.volume(i, j, k);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) b[g.index(i, j, k)] -= sum * g.volume(i, j, k) / total_volume;

    const FluxOperator op(problem.lambda);
    ScalarField phi(g);
    phi.values = conjugate_gradient(op, b, initial ? &initial->values : nullptr, options, stats);
    return phi;
}

ConormalResidual residual(const ConormalProblem& problem, const ScalarField& phi) {
    const Grid& g = problem.grid();
    const std::vector<double> b = assemble_rhs(problem);
    const FluxOperator op(problem.lambda);
    std::vector<double> Kphi;
    op.apply(phi.values, Kphi);
    ConormalResidual res{ScalarField(g), ScalarField(g)};
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                const std::size_t n = g.index(i, j, k);
                const double r = b[n] - Kphi[n];
                if (i == 0 || i == g.n1 - 1) {
                    res.flux.values[n] = r / g.plane_area(j, k);
                    res.max_flux = std::max(res.max_flux, std::abs(res.flux.values[n]));
                } else {
                    res.interior.values[n] = r / g.volume(i, j, k);
                    res.max_interior = std::max(res.max_interior, std::abs(res.interior.values[n]));
                }
            }
    return res;
}

ScalarField solve_poisson_mixed(const ScalarField& source, bool dirichlet_x1, const SolverOptions& options,
                                const ScalarField* initial, SolveStats* stats) {
    const Grid& g = source.grid;
    const FluxOperator op(g, dirichlet_x1, source.parity);
    std::vector<double> b(g.size());
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) b[g.index(i, j, k)] = source(i, j, k) * g.volume(i, j, k);
    if (op.singular()) {
        double sum = 0.0;
        for (double v : b) sum += v;
        double total = 0.0;
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j)
                for (int k = 0; k < g.n3; ++k) total += g.volume(i, j, k);
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j)
                for (int k = 0; k < g.n3; ++k) b[g.index(i, j, k)] -= sum * g.volume(i, j, k) / total;
    }
    ScalarField q(g, 0.0, source.parity);
    q.values = conjugate_gradient(op, b, initial ? &initial->values : nullptr, options, stats);
    return q;
}

}  // namespace nozzle
