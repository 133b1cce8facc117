#include "nozzle/verify.hpp"

#include "nozzle/boundary.hpp"
#include "nozzle/config.hpp"
#include "nozzle/divcurl.hpp"
#include "nozzle/elliptic.hpp"
#include "nozzle/errors.hpp"
#include "nozzle/euler.hpp"
#include "nozzle/gas.hpp"
#include "nozzle/io.hpp"
#include "nozzle/potential.hpp"
#include "nozzle/streamline.hpp"
#include "nozzle/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace nozzle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
double bisect(F&& f, double a, double b, int iters = 200) {
    double fa = f(a);
    for (int it = 0; it < iters; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

BoundaryData family(const Grid& g, double a2, double eps_k, double eps_b, double theta_bar) {
    BoundaryFamilyParams p;
    p.a2 = a2;
    p.eps_kappa = eps_k;
    p.eps_B = eps_b;
    p.theta_bar = theta_bar;
    return boundary_family(g, p, 1.5);
}

Grid cube(int n) { return Grid::make(1.0, n, n, n); }

// Manufactured vector potential q* = (0, 0, sin(pi x1) sin(pi x2)).
VectorField manufactured_u(const Grid& g) {
    VectorField u(g, kPolarParity);
    u[0] = sample(g, [](double x1, double x2, double) { return kPi * std::sin(kPi * x1) * std::cos(kPi * x2); },
                  kPolarParity[0]);
    u[1] = sample(g, [](double x1, double x2, double) { return -kPi * std::cos(kPi * x1) * std::sin(kPi * x2); },
                  kPolarParity[1]);
    u[2] = ScalarField(g, 0.0, kPolarParity[2]);
    return u;
}

VectorField manufactured_w(const Grid& g) {
    VectorField w(g, kAxialParity);
    w[0] = ScalarField(g, 0.0, kAxialParity[0]);
    w[1] = ScalarField(g, 0.0, kAxialParity[1]);
    w[2] = sample(g, [](double x1, double x2, double) { return 2.0 * kPi * kPi * std::sin(kPi * x1) * std::sin(kPi * x2); },
                  kAxialParity[2]);
    return w;
}

double cube_cos(double x1, double x2, double x3) {
    return std::cos(kPi * x1) * std::cos(kPi * x2) * std::cos(kPi * x3);
}

class Battery {
public:
    Battery(const BatteryOptions& opts, BatteryResult& out) : opts_(opts), out_(out) {
        if (!opts_.fixture_path.empty()) load_fixtures();
    }

    bool full() const { return opts_.level == "full"; }

    /// Runs fn() -> observed and appends a row.
    template <class F>
    void row(const std::string& module, const std::string& oracle, double lo, double hi, F&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        VerifyRow r{module, oracle, kNaN, lo, hi, false, 0.0};
        try {
            r.observed = fn();
            r.pass = std::isfinite(r.observed) && r.observed >= lo && r.observed <= hi;
        } catch (const std::exception& e) {
            out_.tables.push_back(module + " / " + oracle + ": " + e.what());
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out_.rows.push_back(r);
    }

    /// Regression row: compares against the frozen value, or freezes it.
    void regression(const std::string& module, const std::string& key, double value, double rel_tol = 1e-9) {
        out_.regression[key] = value;
        if (opts_.fixture_path.empty()) {
            out_.rows.push_back({module, "regression " + key + " (recorded)", value, -kInf, kInf, std::isfinite(value), 0.0});
            return;
        }
        if (!frozen_.contains(key)) {
            const bool ok = opts_.freeze && std::isfinite(value);
            if (ok) {
                frozen_[key] = value;
                dirty_ = true;
            }
            out_.rows.push_back({module, "regression " + key + (ok ? " (frozen now)" : " (missing fixture)"), value,
                                 -kInf, ok ? kInf : -kInf, ok, 0.0});
            return;
        }
        const double ref = frozen_[key].get<double>();
        const double tol = rel_tol * std::max(1.0, std::abs(ref));
        out_.rows.push_back({module, "regression " + key, value, ref - tol, ref + tol,
                             std::isfinite(value) && std::abs(value - ref) <= tol, 0.0});
    }

    void finish() {
        if (!dirty_) return;
        nlohmann::json doc;
        doc["values"] = frozen_;
        doc["hash"] = hex64(fnv1a(frozen_.dump()));
        std::ofstream f(opts_.fixture_path, std::ios::binary);
        if (!f) throw Error("cannot write fixtures " + opts_.fixture_path);
        f << doc.dump(2) << '\n';
        out_.fixtures_written = true;
    }

    const BatteryOptions& opts() const { return opts_; }
    BatteryResult& out() { return out_; }

private:
    void load_fixtures() {
        std::ifstream f(opts_.fixture_path, std::ios::binary);
        if (!f) return;
        const auto doc = nlohmann::json::parse(f);
        frozen_ = doc.at("values");
        const bool intact = doc.at("hash").get<std::string>() == hex64(fnv1a(frozen_.dump()));
        out_.rows.push_back({"cli_io", "fixture file hash", intact ? 1.0 : 0.0, 1.0, 1.0, intact, 0.0});
        if (!intact) frozen_ = nlohmann::json::object();
    }

    const BatteryOptions& opts_;
    BatteryResult& out_;
    nlohmann::json frozen_ = nlohmann::json::object();
    bool dirty_ = false;
};

// ---------------------------------------------------------------- gas

void gas_cases(Battery& b) {
    const GasModel def{};
    const GasModel air{1.4, 1.0, 5.0};

    b.row("gas", "sound_speed(1.4, 1, rho=1) vs sqrt(1.4)", 0, 1e-14,
          [&] { return std::abs(sound_speed(air, 1.0) - std::sqrt(1.4)); });

    // h(rho) = 3.5 rho^0.4 = B - q^2/2 = 4.5 by bisection.
    const auto rho_air = [&](double q_sq) {
        return bisect([&](double r) { return 3.5 * std::pow(r, 0.4) - (5.0 - 0.5 * q_sq); }, 1e-9, 100.0);
    };
    b.row("gas", "density_from_speed(1.4, 1, 5, q^2=1) vs bisection", 0, 1e-12,
          [&] { return std::abs(density_from_speed(air, 1.0, 5.0) - rho_air(1.0)) / rho_air(1.0); });
    b.row("gas", "critical_speed(2, 1/2, B=3) vs sqrt(2)", 0, 1e-12,
          [&] { return std::abs(critical_speed(GasModel{2.0, 0.5, 3.0}, 3.0) - std::sqrt(2.0)); });
    b.row("gas", "critical_speed(1.4, 1, 5) vs bisection on q - c", 0, 1e-10, [&] {
        const double oracle = bisect(
            [&](double q) { return q - std::sqrt(1.4 * std::pow(rho_air(q * q), 0.4)); }, 1e-6, std::sqrt(10.0) - 1e-9);
        return std::abs(critical_speed(air, 5.0) - oracle);
    });

    // Subsonic root of q^3 - 3q + 1 = 0, i.e. q (3/2 - q^2/2) = 1/2.
    const double q_half = bisect([](double q) { return q * q * q - 3.0 * q + 1.0; }, 0.0, 1.0);
    b.row("gas", "mass_flux(default, q=1) = 1", 0, 1e-14, [&] { return std::abs(mass_flux(def, 1.0, 1.5) - 1.0); });
    b.row("gas", "mass_flux(default, cubic root) = 0.5", 0, 1e-13,
          [&] { return std::abs(mass_flux(def, q_half, 1.5) - 0.5); });
    b.row("gas", "subsonic_speed_from_flux(default, j=1) = 1", 0, 1e-6,
          [&] { return std::abs(subsonic_speed_from_flux(def, 1.0, 1.5) - 1.0); });
    b.row("gas", "subsonic_speed_from_flux(default, j=0.5) vs cubic root", 0, 1e-12,
          [&] { return std::abs(subsonic_speed_from_flux(def, 0.5, 1.5) - q_half); });

    b.row("gas", "truncated_density(m=10, q^2=0.925) vs quintic blend", 0, 1e-14, [&] {
        const double a = 0.9, w = 0.05, t = (0.925 - a) / w;
        const double zeta = a + w * (t + 2.0 / 3.0 * t * t * t - 2.0 * t * t * t * t + t * t * t * t * t);
        return std::abs(truncated_density(def, Truncation{10}, 0.925) - (1.5 - 0.5 * zeta));
    });
    b.row("gas", "truncated_density(m=10) monotone violations on dense samples", 0, 0, [&] {
        int bad = 0;
        double prev = truncated_density(def, Truncation{10}, 0.0);
        for (int i = 1; i <= 20000; ++i) {
            const double r = truncated_density(def, Truncation{10}, 1.2 * i / 20000.0);
            if (r > prev) ++bad;
            prev = r;
        }
        return static_cast<double>(bad);
    });
}

// ---------------------------------------------------------------- grid_fields

double gradient_error(const GradientFn& grad, int n) {
    const Grid g = cube(n);
    const auto phi = sample(g, [](double, double x2, double) { return std::cos(kPi * x2); });
    const auto du = grad(phi);
    const auto exact = sample(g, [](double, double x2, double) { return -kPi * std::sin(kPi * x2); });
    return max_abs_diff(du[1], exact);
}

void grid_cases(Battery& b) {
    const GradientFn grad = b.opts().gradient ? b.opts().gradient : GradientFn([](const ScalarField& f) { return gradient(f); });
    b.row("grid_fields", "gradient of cos(pi x2): order on 9/17", 1.9, 2.1,
          [&] { return observed_order(gradient_error(grad, 9), gradient_error(grad, 17)); });
    b.row("grid_fields", "max |curl grad(cos(pi x1) cos(pi x2))| on 9^3", 0, 1e-10, [] {
        const auto phi = sample(cube(9), [](double x1, double x2, double) { return std::cos(kPi * x1) * std::cos(kPi * x2); });
        return max_abs(curl(gradient(phi)));
    });
    b.row("grid_fields", "trilinear x2^2 at cell centre, h2=0.25: analytic + h^2/4", 0, 1e-15, [] {
        const Grid g = Grid::make(1.0, 3, 5, 3);
        const auto f = sample(g, [](double, double x2, double) { return x2 * x2; });
        const double x = 0.375;
        return std::abs(interpolate(f, {0.3, x, 0.6}) - (x * x + 0.25 * 0.25 / 4.0));
    });
    b.row("grid_fields", "boundary_family(a2=0.2): |min f+1.2| + |max f+0.8| + |int f|", 0, 1e-14, [] {
        const auto d = family(cube(9), 0.2, 0.0, 0.0, 1.0);
        const auto [lo, hi] = std::minmax_element(d.f_minus.values.begin(), d.f_minus.values.end());
        return std::abs(*lo + 1.2) + std::abs(*hi + 0.8) + std::abs(d.compatibility_defect());
    });
}

// ---------------------------------------------------------------- elliptic

double elliptic_error(int n) {
    const Grid g = cube(n);
    auto exact = sample(g, cube_cos);
    auto problem = ConormalProblem::laplace(g);
    problem.source = sample(g, [](double x1, double x2, double x3) { return -3.0 * kPi * kPi * cube_cos(x1, x2, x3); });
    const auto phi = solve_conormal(problem, SolverOptions{1e-12, 0});
    subtract_mean(exact);
    return max_abs_diff(phi, exact);
}

void elliptic_cases(Battery& b) {
    const Grid g = cube(9);
    auto exact = sample(g, cube_cos);
    subtract_mean(exact);
    auto problem = ConormalProblem::laplace(g);
    {
        const FluxOperator op(problem.lambda);
        std::vector<double> y(g.size());
        op.apply(exact.values, y);
        ScalarField s(g);
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j)
                for (int k = 0; k < g.n3; ++k) s(i, j, k) = -y[g.index(i, j, k)] / g.volume(i, j, k);
        problem.source = s;
    }
    b.row("elliptic", "operator-applied cos^3 solution recovered on 9^3", 0, 1e-8,
          [&] { return max_abs_diff(solve_conormal(problem, SolverOptions{1e-13, 0}), exact); });
    b.row("elliptic", "residual linearity in noise amplitude (ratio 2)", 2.0 - 1e-8, 2.0 + 1e-8, [&] {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        ScalarField noise(g);
        for (auto& v : noise.values) v = dist(rng);
        const auto r1 = residual(problem, add(exact, noise, 1e-3));
        const auto r2 = residual(problem, add(exact, noise, 2e-3));
        return (r2.max_interior + r2.max_flux) / (r1.max_interior + r1.max_flux);
    });
    if (!b.full()) return;
    const double e9 = elliptic_error(9), e17 = elliptic_error(17), e33 = elliptic_error(33);
    b.row("elliptic", "manufactured cos^3 error ratio 9/17", 3.6, 4.4, [&] { return e9 / e17; });
    b.row("elliptic", "manufactured cos^3 error ratio 17/33", 3.6, 4.4, [&] { return e17 / e33; });
}

// ---------------------------------------------------------------- potential

void potential_cases(Battery& b) {
    const GasModel gas{};
    const Grid g = cube(9);
    const auto uniform = family(g, 0.0, 0.0, 0.0, 1.0);
    const double q_or = bisect([](double q) { return q * (1.5 - 0.5 * q * q) - 0.5; }, 0.0, 1.0);
    const double rho_or = 1.5 - 0.5 * q_or * q_or;

    std::optional<PotentialSolution> sol;
    b.row("potential", "uniform theta=0.5: max |u1 - q_oracle|", 0, 1e-6, [&] {
        sol = solve_potential(gas, uniform, 0.5, 10);
        return max_abs_diff(sol->u[0], ScalarField(g, q_or));
    });
    b.row("potential", "uniform theta=0.5: max |u2| + |u3|", 0, 1e-10,
          [&] { return max_abs(sol->u[1]) + max_abs(sol->u[2]); });
    b.row("potential", "uniform theta=0.5: max |rho - rho_oracle|", 0, 1e-5,
          [&] { return max_abs_diff(sol->rho, ScalarField(g, rho_or)); });
    b.row("potential", "uniform theta=0.5: |max_mach - q/sqrt(rho)|", 0, 1e-6,
          [&] { return std::abs(max_mach(gas, *sol) - q_or / std::sqrt(rho_or)); });
    b.row("potential", "uniform theta=0.5: |min u1 - q_oracle|", 0, 1e-6,
          [&] { return std::abs(check_positivity_u1(sol->u).min_u1 - q_or); });

    b.row("potential", "uniform theta -> 1: Mach decreases on samples (count)", 0, 0, [&] {
        int bad = 0;
        double prev = 0.0;
        for (double th : {0.5, 0.7, 0.9, 0.97}) {
            const double mach = max_mach(gas, solve_potential(gas, uniform, th, 0));
            if (mach <= prev) ++bad;
            prev = mach;
        }
        return static_cast<double>(bad);
    });

    double min_u1 = kNaN;
    b.row("potential", "a2=0.2 theta=0.5: min u1 > 0", 1e-12, kInf, [&] {
        min_u1 = check_positivity_u1(solve_potential(gas, family(g, 0.2, 0, 0, 1.0), 0.5, 10).u).min_u1;
        return min_u1;
    });
    b.regression("potential", "potential.a2_0.2.min_u1.9", min_u1);

    if (!b.full()) return;
    b.row("potential", "m=20, 17^3: oracle theta_20 outside bracket by", 0, 0, [&] {
        const auto res = find_critical_theta(gas, family(cube(17), 0.0, 0, 0, 1.0), 20);
        const double t = std::sqrt(1.0 - 1.0 / 20) * (1.5 - 0.5 * (1.0 - 1.0 / 20));
        return std::max({0.0, res.bracket.first - t, t - res.bracket.second});
    });
    std::vector<CriticalThetaResult> crit;
    b.row("potential", "m in {4,8,16}, 17^3: theta* non-decreasing (violations)", 0, 0, [&] {
        int bad = 0;
        for (int m : {4, 8, 16}) {
            crit.push_back(find_critical_theta(gas, family(cube(17), 0.0, 0, 0, 1.0), m));
            if (crit.size() > 1 && crit.back().theta_star < crit[crit.size() - 2].theta_star) ++bad;
        }
        return static_cast<double>(bad);
    });
    b.row("potential", "m=16 bracket misses j(sqrt(1-1/16)) by", 0, 0, [&] {
        const double t = std::sqrt(1.0 - 1.0 / 16) * (1.5 - 0.5 * (1.0 - 1.0 / 16));
        return std::max({0.0, crit.at(2).bracket.first - t, t - crit.at(2).bracket.second});
    });
    b.row("potential", "Mach trace increasing along converged theta (violations)", 0, 0, [&] {
        int bad = 0;
        auto& tables = b.out().tables;
        tables.push_back("Mach-vs-theta trend (uniform data, 17^3)");
        tables.push_back("      m        theta     max Mach");
        for (const auto& c : crit) {
            double prev = 0.0;
            for (const auto& s : c.mach_trace) {
                if (!s.converged || s.theta == 0.0) continue;
                char buf[96];
                std::snprintf(buf, sizeof buf, "%7d %12.6f %12.6f", c.m, s.theta, s.mach_max);
                tables.push_back(buf);
                if (s.mach_max <= prev) ++bad;
                prev = s.mach_max;
            }
        }
        return static_cast<double>(bad);
    });
}

// ---------------------------------------------------------------- streamline

void streamline_cases(Battery& b) {
    const Grid g = cube(9);
    b.row("streamline", "u=(1, x2(1-x2), 0): U2 at x2=-0.25 vs -0.1875", 0, 1e-14, [&] {
        VectorField u(g);
        u[0] = ScalarField(g, 1.0, kPolarParity[0]);
        u[1] = sample(g, [](double, double x2, double) { return x2 * (1.0 - x2); }, kPolarParity[1]);
        u[2] = ScalarField(g, 0.0, kPolarParity[2]);
        return std::abs(extend_velocity_ratio(u)(0.5, -0.25, 0.5)[0] + 0.1875);
    });
    const double alpha = 0.1;
    VectorField ua(g);
    ua[0] = ScalarField(g, 1.0, kPolarParity[0]);
    ua[1] = ScalarField(g, alpha, kPolarParity[1]);
    ua[2] = ScalarField(g, 0.0, kPolarParity[2]);
    b.row("streamline", "constant alpha: |gamma2 - (x2 - alpha x1)|", 0, 1e-13, [&] {
        const auto tr = trace_to_inlet(extend_velocity_ratio(ua), {0.75, 0.5, 0.5});
        return std::abs(tr.gamma2 - (0.5 - alpha * 0.75));
    });
    b.row("streamline", "trace_field constant alpha, interior paths: max error", 0, 1e-12, [&] {
        const auto feet = trace_field(ua);
        double err = 0.0;
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j)
                for (int k = 0; k < g.n3; ++k) {
                    const double x2 = g.x2(j), foot = x2 - alpha * g.x1(i);
                    if (std::min(x2, foot) < 2 * g.h2 || std::max(x2, foot) > 1 - 2 * g.h2) continue;
                    err = std::max(err, std::abs(feet.gamma2(i, j, k) - foot));
                }
        return err;
    });
    b.row("streamline", "u=(1, x2-1/2, 0): |gamma2 - exp oracle| / step^4", 0, 0.05, [&] {
        VectorField u(g);
        u[0] = ScalarField(g, 1.0, kPolarParity[0]);
        u[1] = sample(g, [](double, double x2, double) { return x2 - 0.5; }, kPolarParity[1]);
        u[2] = ScalarField(g, 0.0, kPolarParity[2]);
        const auto tr = trace_to_inlet(extend_velocity_ratio(u), {0.8, 0.55, 0.5}, TraceOptions{1e-4, 100.0});
        const double step = tr.s[1] - tr.s[0];
        const double exact = 0.5 + 0.05 * std::exp(-0.8);
        return std::abs(tr.gamma2 - exact) / std::pow(step, 4);
    });
}

// ---------------------------------------------------------------- transport

VectorField uniform_u(const Grid& g, double q) {
    VectorField u(g);
    u[0] = ScalarField(g, q, kPolarParity[0]);
    u[1] = ScalarField(g, 0.0, kPolarParity[1]);
    u[2] = ScalarField(g, 0.0, kPolarParity[2]);
    return u;
}

double div_omega_max(int n) {
    const auto data = family(cube(n), 0.2, 0.01, 0.01, 0.5);
    const auto bg = solve_potential(GasModel{}, data, 1.0, 0);
    const auto state = transport_vorticity(bg.u, vorticity_initial(data, bg.u));
    return max_abs(divergence(state.omega));
}

void transport_cases(Battery& b) {
    const Grid g = cube(9);
    const double q = 0.5, eps = 0.01;
    const auto data = family(g, 0.0, 0.0, eps, 0.5);
    const auto u = uniform_u(g, q);
    b.row("transport", "uniform u: B(x) = B0(x2, x3)", 0, 1e-12, [&] {
        const auto B = bernoulli_field(data, trace_field(u));
        const auto exact = sample(g, [&](double, double x2, double x3) { return data.B0_at(x2, x3); });
        return max_abs_diff(B, exact);
    });
    const auto dB = [&](int axis, double x2, double x3) {
        const double s2 = std::sin(kPi * x2), s3 = std::sin(kPi * x3);
        return axis == 1 ? eps * kPi * std::sin(2 * kPi * x2) * s3 * s3 : eps * kPi * s2 * s2 * std::sin(2 * kPi * x3);
    };
    b.row("transport", "kappa=0: Lambda0 = (0, d3 B0 / q, -d2 B0 / q)", 0, 1e-12, [&] {
        const auto l0 = vorticity_initial(data, u);
        double err = 0.0;
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                err = std::max(err, std::abs(l0[0](j, k)));
                err = std::max(err, std::abs(l0[1](j, k) - dB(2, g.x2(j), g.x3(k)) / q));
                err = std::max(err, std::abs(l0[2](j, k) + dB(1, g.x2(j), g.x3(k)) / q));
            }
        return err;
    });
    b.row("transport", "scalar surrogate V = v I: RK4 observed order, h=1/8", 3.8, 4.2, [] {
        const double v = 1.3;
        const auto M = [&](double) { return std::array<double, 9>{v, 0, 0, 0, v, 0, 0, 0, v}; };
        const double exact = std::exp(-v * 1.0);
        const double e1 = std::abs(integrate_linear(M, {1, 0, 0}, 0.0, 0.125, 8)[0] - exact);
        const double e2 = std::abs(integrate_linear(M, {1, 0, 0}, 0.0, 0.0625, 16)[0] - exact);
        return std::log2(e1 / e2);
    });
    b.row("transport", "uniform u: omega = Lambda0 carried unchanged", 0, 1e-12, [&] {
        const auto l0 = vorticity_initial(data, u);
        const auto st = transport_vorticity(u, l0);
        double err = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < g.n1; ++i)
                for (int j = 0; j < g.n2; ++j)
                    for (int k = 0; k < g.n3; ++k) err = std::max(err, std::abs(st.omega[a](i, j, k) - l0[a](j, k)));
        return err;
    });
    b.row("transport", "kappa=0, B0=const: nonzero omega entries", 0, 0, [&] {
        const auto d0 = family(g, 0.2, 0.0, 0.0, 0.5);
        const auto bg = solve_potential(GasModel{}, d0, 1.0, 0);
        const auto st = transport_vorticity(bg.u, vorticity_initial(d0, bg.u));
        double count = 0;
        for (int a = 0; a < 3; ++a)
            for (double v : st.omega[a].values) count += (v != 0.0);
        return count;
    });
    b.row("transport", "uniform u: max |div omega| vs analytic plane divergence 0", 0, 1e-10, [&] {
        const auto st = transport_vorticity(u, vorticity_initial(data, u));
        return max_abs(divergence(st.omega));
    });
    if (!b.full()) return;
    const double d9 = div_omega_max(9), d17 = div_omega_max(17), d33 = div_omega_max(33);
    b.row("transport", "a2=0.2 flow: max|div omega| order 9/17", 2.0, kInf, [&] { return observed_order(d9, d17); });
    b.row("transport", "a2=0.2 flow: max|div omega| order 17/33", 2.0, kInf, [&] { return observed_order(d17, d33); });

    const auto d17data = family(cube(17), 0.0, 0.01, 0.01, 0.5);
    const auto bg = solve_potential(GasModel{}, d17data, 1.0, 0);
    const auto st = transport_vorticity(bg.u, vorticity_initial(d17data, bg.u));
    const auto diag = check_vorticity_constraints(st.omega, bg.u);
    b.regression("transport", "transport.eps0.01.div_max.17", diag.div_max, 1e-6);
    b.regression("transport", "transport.eps0.01.transport_residual.17", diag.transport_residual, 1e-6);
    b.row("transport", "eps=0.01 wall tangential omega, 17^3", 0, 1e-12, [&] { return diag.wall_tangential; });
}

// ---------------------------------------------------------------- divcurl

double divcurl_error(int n) {
    const Grid g = cube(n);
    const auto sol = solve_div_curl(DivCurlProblem{ScalarField(g, 1.0), manufactured_w(g), std::nullopt});
    return max_abs_diff(sol.u, manufactured_u(g));
}

double divcurl_curl_residual(int n) {
    const Grid g = cube(n);
    const auto lambda = sample(g, [](double x1, double x2, double x3) { return 1.0 + 0.1 * cube_cos(x1, x2, x3); });
    return solve_div_curl(DivCurlProblem{lambda, manufactured_w(g), std::nullopt}).residual_curl;
}

void divcurl_cases(Battery& b) {
    const Grid g = cube(9);
    b.row("divcurl", "q* = (0,0,sin sin): n x q* on faces + boundary div q*", 0, 1e-15, [&] {
        double err = 0.0;
        for (double t = 0.0; t <= 1.0; t += 0.125) {
            err = std::max(err, std::abs(std::sin(kPi * 0.0) * std::sin(kPi * t)));  // x1 = 0
            err = std::max(err, std::abs(std::sin(kPi * 1.0) * std::sin(kPi * t)));  // x1 = 1
            err = std::max(err, std::abs(std::sin(kPi * t) * std::sin(kPi * 0.0)));  // x2 = 0
        }
        return err;  // div q* = d3 q3 = 0 identically
    });
    b.row("divcurl", "lambda=1 manufactured u*: max error on 9^3", 0, 0.1, [] { return divcurl_error(9); });
    b.row("divcurl", "solve_vortical_W linearity: ||W(w/2)|| / ||W(w)||", 0.495, 0.505, [&] {
        const auto rho = sample(g, [](double x1, double x2, double x3) { return 1.0 + 0.1 * cube_cos(x1, x2, x3); });
        const auto w = manufactured_w(g);
        VectorField half = w;
        for (int a = 0; a < 3; ++a)
            for (auto& v : half[a].values) v *= 0.5;
        return max_abs(solve_vortical_W(rho, half).u) / max_abs(solve_vortical_W(rho, w).u);
    });
    if (!b.full()) return;
    const double e9 = divcurl_error(9), e17 = divcurl_error(17), e33 = divcurl_error(33);
    b.row("divcurl", "lambda=1 manufactured u*: order 9/17", 1.8, kInf, [&] { return observed_order(e9, e17); });
    b.row("divcurl", "lambda=1 manufactured u*: order 17/33", 1.8, kInf, [&] { return observed_order(e17, e33); });
    const double r9 = divcurl_curl_residual(9), r17 = divcurl_curl_residual(17), r33 = divcurl_curl_residual(33);
    b.row("divcurl", "variable lambda: curl residual order 9/17", 1.8, kInf, [&] { return observed_order(r9, r17); });
    b.row("divcurl", "variable lambda: curl residual order 17/33", 1.8, kInf, [&] { return observed_order(r17, r33); });
    b.row("divcurl", "rho=1 solve_vortical_W vs u*: order 17/33", 1.8, kInf, [&] {
        const auto err = [](int n) {
            const Grid gg = cube(n);
            return max_abs_diff(solve_vortical_W(ScalarField(gg, 1.0), manufactured_w(gg)).u, manufactured_u(gg));
        };
        return observed_order(err(17), err(33));
    });
}

// ---------------------------------------------------------------- euler

EulerSolution euler_run(int n, double eps, const VectorField* u0 = nullptr) {
    return run_euler(family(cube(n), 0.0, eps, eps, 0.5), GasModel{}, EulerConfig{}, u0);
}

double geometric_ratio(const std::vector<double>& h) {
    if (h.size() < 2) return 0.0;
    return std::pow(h.back() / h.front(), 1.0 / static_cast<double>(h.size() - 1));
}

VectorField perturbed_guess(const VectorField& bg) {
    const auto bump = gradient(sample(bg.grid, cube_cos));
    return add(bg, bump, 0.02);
}

void euler_cases(Battery& b) {
    const GasModel gas{};
    const Grid g = cube(9);
    const auto data = family(g, 0.2, 0.0, 0.0, 0.5);
    b.row("euler", "W=0, B=B+delta: matches potential solve with shifted gas", 0, 1e-8, [&] {
        const double delta = 0.05;
        const auto phi = solve_nonlinear_potential(ScalarField(g, 1.5 + delta), VectorField(g), data, gas,
                                                   PicardOptions{1e-12, 1.0, 2000, {1e-13, 0}})
                             .phi;
        const auto ref = solve_potential(GasModel{2.0, 0.5, 1.5 + delta}, data, 1.0, 0,
                                         PicardOptions{1e-12, 1.0, 2000, {1e-13, 0}});
        return max_abs_diff(phi, ref.phi) / max_abs(ref.phi);
    });
    b.row("euler", "small solenoidal W: response ratio W / (W/2)", 1.8, 2.2, [&] {
        const auto u0 = family(g, 0.0, 0.0, 0.0, 0.5);
        const PicardOptions po{1e-12, 1.0, 2000, {1e-13, 0}};
        const ScalarField B(g, 1.5);
        const auto base = solve_nonlinear_potential(B, VectorField(g), u0, gas, po).phi;
        const auto w = manufactured_u(g);
        VectorField W1 = w, W2 = w;
        for (int a = 0; a < 3; ++a) {
            for (auto& v : W1[a].values) v *= 1e-3;
            for (auto& v : W2[a].values) v *= 5e-4;
        }
        const auto p1 = solve_nonlinear_potential(B, W1, u0, gas, po).phi;
        const auto p2 = solve_nonlinear_potential(B, W2, u0, gas, po).phi;
        return max_abs_diff(p1, base) / max_abs_diff(p2, base);
    });

    const EulerConfig cfg;
    b.row("euler", "map response at eps vs eps/2 from the background", 1.6, 2.4, [&] {
        const auto resp = [&](double eps) {
            const auto d = family(g, 0.0, eps, eps, 0.5);
            const auto bg = background_flow(gas, d, cfg);
            return max_abs_diff(fixed_point_map(bg.u, bg.u, d, gas, cfg).v, bg.u);
        };
        return resp(0.01) / resp(0.005);
    });
    double contraction = kNaN;
    b.row("euler", "eps=0.01: ||T^2 u - T u|| / ||T u - u|| < 1", 0, 1.0 - 1e-12, [&] {
        const auto d = family(g, 0.0, 0.01, 0.01, 0.5);
        const auto bg = background_flow(gas, d, cfg);
        const auto t1 = fixed_point_map(bg.u, bg.u, d, gas, cfg).v;
        const auto t2 = fixed_point_map(t1, bg.u, d, gas, cfg).v;
        contraction = max_abs_diff(t2, t1) / max_abs_diff(t1, bg.u);
        return contraction;
    });
    b.regression("euler", "euler.contraction_ratio.9", contraction, 1e-5);

    std::optional<EulerSolution> s9;
    b.row("euler", "eps=0.01, 9^3: geometric history ratio", 0, 0.9, [&] {
        s9 = euler_run(9, 0.01);
        if (!s9->converged) throw ConvergenceError("not converged", s9->history);
        return geometric_ratio(s9->history);
    });
    b.row("euler", "injected non-solenoidal bump: mass residual growth / amplitude", 0.1, 1e3, [&] {
        const double amp = 0.05;
        EulerSolution bad = *s9;
        const Grid& gg = bad.u.grid;
        const auto bump = sample(gg, [](double x1, double x2, double x3) {
            return std::exp(-((x1 - 0.5) * (x1 - 0.5) + (x2 - 0.5) * (x2 - 0.5) + (x3 - 0.5) * (x3 - 0.5)) / 0.02);
        });
        bad.u[0] = add(bad.u[0], bump, amp);
        const auto d = family(gg, 0.0, 0.01, 0.01, 0.5);
        return (verify_euler_residuals(bad, d).max[0] - verify_euler_residuals(*s9, d).max[0]) / amp;
    });
    b.row("euler", "dual initial guess, 9^3: ||u_a - u_b|| / fp_tol", 0, 10.0, [&] {
        const auto other = euler_run(9, 0.01, &s9->background);
        const auto shifted = euler_run(9, 0.01, [&] {
            static VectorField guess;
            guess = perturbed_guess(s9->background);
            return &guess;
        }());
        if (!other.converged || !shifted.converged) throw ConvergenceError("dual run not converged", shifted.history);
        return max_abs_diff(other.u, shifted.u) / cfg.fp_tol;
    });
    if (!b.full()) return;

    std::optional<EulerSolution> s17, s33;
    b.row("euler", "eps=0.01, 17^3: geometric history ratio", 0, 0.9, [&] {
        s17 = euler_run(17, 0.01);
        if (!s17->converged) throw ConvergenceError("not converged", s17->history);
        return geometric_ratio(s17->history);
    });
    b.row("euler", "eps=0.01, 17^3: outer iterations", 1, 30, [&] { return static_cast<double>(s17->iterations); });
    b.row("euler", "dual initial guess, 17^3: ||u_a - u_b|| / fp_tol", 0, 10.0, [&] {
        const auto guess = perturbed_guess(s17->background);
        const auto other = euler_run(17, 0.01, &guess);
        if (!other.converged) throw ConvergenceError("dual run not converged", other.history);
        return max_abs_diff(other.u, s17->u) / cfg.fp_tol;
    });
    if (s17) b.regression("euler", "euler.eps0.01.max_u1.17", max_abs(s17->u[0]), 1e-7);
    try {
        s33 = euler_run(33, 0.01);
    } catch (const std::exception& e) {
        b.out().tables.push_back(std::string("euler 33^3 run failed: ") + e.what());
    }
    const auto names = EulerResiduals::names();
    std::optional<EulerResiduals> r17, r33;
    if (s17 && s33) {
        r17 = verify_euler_residuals(*s17, family(cube(17), 0.0, 0.01, 0.01, 0.5));
        r33 = verify_euler_residuals(*s33, family(cube(33), 0.0, 0.01, 0.01, 0.5));
        b.out().tables.push_back("Euler residuals 17^3 -> 33^3 (max norm | rms norm)");
        for (int c = 0; c < EulerResiduals::kCount; ++c) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%-22s max %.3e -> %.3e order %.2f | rms %.3e -> %.3e order %.2f",
                          names[c], r17->max[c], r33->max[c], observed_order(r17->max[c], r33->max[c]), r17->rms[c],
                          r33->rms[c], observed_order(r17->rms[c], r33->rms[c]));
            b.out().tables.push_back(buf);
        }
    }
    for (int c = 0; c < EulerResiduals::kCount; ++c)
        b.row("euler", std::string("residual ") + names[c] + ": rms order 17/33", 1.8, kInf, [&] {
            if (!r17) throw Error("no converged runs");
            // Residuals that vanish to round-off on both grids are reported as exact.
            if (r33->rms[c] < 1e-13 && r17->rms[c] < 1e-13) return kInf;
            return observed_order(r17->rms[c], r33->rms[c]);
        });
}

// ---------------------------------------------------------------- cli_io

void cli_cases(Battery& b) {
    b.row("cli_io", "minimal config parses with defaults", 1, 1, [] {
        const auto c = parse_config("[gas]\ngamma = 2\n");
        return static_cast<double>(c.picard_tol == 1e-9 && c.n1 == 17);
    });
    b.row("cli_io", "gamma = 0.9 rejected", 1, 1, [] {
        try {
            parse_config("[gas]\ngamma = 0.9\n");
        } catch (const ConfigError&) {
            return 1.0;
        }
        return 0.0;
    });
    b.row("cli_io", "theta_list 0.1,0.5,0.9 parsed; duplicates rejected", 1, 1, [] {
        const auto c = parse_config("[critical]\ntheta_list = 0.1,0.5,0.9\n");
        bool dup = false;
        try {
            parse_config("[critical]\ntheta_list = 0.1,0.5,0.5\n");
        } catch (const ConfigError&) {
            dup = true;
        }
        return static_cast<double>(c.theta_list == std::vector<double>{0.1, 0.5, 0.9} && dup);
    });
}

std::string bound(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

double observed_order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

std::string VerifyRow::required() const {
    if (lo == hi) return "= " + bound(lo);
    if (std::isinf(lo) && std::isinf(hi)) return lo < 0 && hi > 0 ? "recorded" : "none";
    if (std::isinf(hi)) return ">= " + bound(lo);
    if (std::isinf(lo) || lo == 0.0) return "<= " + bound(hi);
    return "[" + bound(lo) + ", " + bound(hi) + "]";
}

bool BatteryResult::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.pass; });
}

std::string battery_header() {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-4s  %-12s %-64s %14s  %s", "pass", "module", "oracle", "observed", "required");
    return buf;
}

std::string format_row(const VerifyRow& row) {
    char buf[400];
    std::snprintf(buf, sizeof buf, "%-4s  %-12s %-64s %14.6g  %s", row.pass ? "ok" : "FAIL", row.module.c_str(),
                  row.oracle.c_str(), row.observed, row.required().c_str());
    return buf;
}

BatteryResult verify_battery(const BatteryOptions& options) {
    if (options.level != "quick" && options.level != "full")
        throw ConfigError("verify level must be quick or full, got '" + options.level + "'");
    BatteryResult result;
    Battery b(options, result);
    gas_cases(b);
    grid_cases(b);
    elliptic_cases(b);
    potential_cases(b);
    streamline_cases(b);
    transport_cases(b);
    divcurl_cases(b);
    euler_cases(b);
    cli_cases(b);
    b.finish();
    return result;
}

}  // namespace nozzle
