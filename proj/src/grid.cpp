#include "nozzle/grid.hpp"

#include "nozzle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nozzle {

Grid Grid::make(double L, int n1, int n2, int n3) {
    if (!(L > 0.0)) throw DomainError("grid length L must be positive");
    if (n1 < 3 || n2 < 3 || n3 < 3) throw DomainError("grid needs at least 3 nodes per axis");
    Grid g;
    g.L = L;
    g.n1 = n1;
    g.n2 = n2;
    g.n3 = n3;
    g.h1 = L / (n1 - 1);
    g.h2 = 1.0 / (n2 - 1);
    g.h3 = 1.0 / (n3 - 1);
    return g;
}

double Grid::h_max() const { return std::max({h1, h2, h3}); }
double Grid::h_min() const { return std::min({h1, h2, h3}); }

double Grid::volume(int i, int j, int k) const {
    const double w1 = (i == 0 || i == n1 - 1) ? 0.5 : 1.0;
    return w1 * h1 * plane_area(j, k);
}

double Grid::plane_area(int j, int k) const {
    const double w2 = (j == 0 || j == n2 - 1) ? 0.5 : 1.0;
    const double w3 = (k == 0 || k == n3 - 1) ? 0.5 : 1.0;
    return w2 * w3 * h2 * h3;
}

Parity derivative_parity(Parity p, int axis) {
    if (axis == 1) p.x2 = static_cast<std::int8_t>(-p.x2);
    if (axis == 2) p.x3 = static_cast<std::int8_t>(-p.x3);
    return p;
}

Fold fold_coordinate(double t) {
    if (t >= 0.0 && t <= 1.0) return {t, 1};
    double r = std::fmod(t, 2.0);
    if (r < 0.0) r += 2.0;
    if (r <= 1.0) {
        // An even number of reflections only if t was shifted by a multiple of 2.
        return {r, 1};
    }
    return {2.0 - r, -1};
}

IndexFold fold_index(int j, int n) {
    if (j >= 0 && j < n) return {j, 1};
    const int period = 2 * (n - 1);
    int r = j % period;
    if (r < 0) r += period;
    if (r <= n - 1) return {r, 1};
    return {period - r, -1};
}

ScalarField::ScalarField(const Grid& g, double fill, Parity p) : grid(g), values(g.size(), fill), parity(p) {}

double ScalarField::ghost(int i, int j, int k) const {
    const IndexFold fj = fold_index(j, grid.n2);
    const IndexFold fk = fold_index(k, grid.n3);
    double v = values[grid.index(i, fj.index, fk.index)];
    if (fj.sign < 0 && parity.x2 < 0) v = -v;
    if (fk.sign < 0 && parity.x3 < 0) v = -v;
    return v;
}

VectorField::VectorField(const Grid& g, VectorParity p)
    : grid(g), comp{ScalarField(g, 0.0, p[0]), ScalarField(g, 0.0, p[1]), ScalarField(g, 0.0, p[2])} {}

void enforce_parity(ScalarField& f) {
    const Grid& g = f.grid;
    if (f.parity.x2 < 0) {
        for (int i = 0; i < g.n1; ++i)
            for (int k = 0; k < g.n3; ++k) {
                f(i, 0, k) = 0.0;
                f(i, g.n2 - 1, k) = 0.0;
            }
    }
    if (f.parity.x3 < 0) {
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j) {
                f(i, j, 0) = 0.0;
                f(i, j, g.n3 - 1) = 0.0;
            }
    }
}

void enforce_parity(VectorField& f) {
    for (auto& c : f.comp) enforce_parity(c);
}

double partial(const ScalarField& f, int axis, int i, int j, int k) {
    const Grid& g = f.grid;
    switch (axis) {
        case 0:
            // At x1 = 0, L: central difference against a cubically extrapolated ghost, whose
            // leading error matches the interior stencil (keeps composed derivatives second order).
            if (i == 0) {
                if (g.n1 < 4) return (-3.0 * f(0, j, k) + 4.0 * f(1, j, k) - f(2, j, k)) / (2.0 * g.h1);
                return (-4.0 * f(0, j, k) + 7.0 * f(1, j, k) - 4.0 * f(2, j, k) + f(3, j, k)) / (2.0 * g.h1);
            }
            if (i == g.n1 - 1) {
                const int n = g.n1 - 1;
                if (g.n1 < 4) return (3.0 * f(n, j, k) - 4.0 * f(n - 1, j, k) + f(n - 2, j, k)) / (2.0 * g.h1);
                return (4.0 * f(n, j, k) - 7.0 * f(n - 1, j, k) + 4.0 * f(n - 2, j, k) - f(n - 3, j, k)) /
                       (2.0 * g.h1);
            }
            return (f(i + 1, j, k) - f(i - 1, j, k)) / (2.0 * g.h1);
        case 1:
            if (j > 0 && j < g.n2 - 1) return (f(i, j + 1, k) - f(i, j - 1, k)) / (2.0 * g.h2);
            return (f.ghost(i, j + 1, k) - f.ghost(i, j - 1, k)) / (2.0 * g.h2);
        case 2:
            if (k > 0 && k < g.n3 - 1) return (f(i, j, k + 1) - f(i, j, k - 1)) / (2.0 * g.h3);
            return (f.ghost(i, j, k + 1) - f.ghost(i, j, k - 1)) / (2.0 * g.h3);
        default:
            throw DomainError("partial: axis must be 0, 1 or 2");
    }
}

ScalarField partial(const ScalarField& f, int axis) {
    const Grid& g = f.grid;
    ScalarField out(g, 0.0, derivative_parity(f.parity, axis));
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) out(i, j, k) = partial(f, axis, i, j, k);
    return out;
}

VectorField gradient(const ScalarField& phi) {
    VectorField out(phi.grid, {derivative_parity(phi.parity, 0), derivative_parity(phi.parity, 1),
                               derivative_parity(phi.parity, 2)});
    for (int a = 0; a < 3; ++a) out[a] = partial(phi, a);
    return out;
}

ScalarField divergence(const VectorField& F) {
    ScalarField out = partial(F[0], 0);
    const ScalarField d2 = partial(F[1], 1);
    const ScalarField d3 = partial(F[2], 2);
    for (std::size_t n = 0; n < out.size(); ++n) out.values[n] += d2.values[n] + d3.values[n];
    return out;
}

VectorField curl(const VectorField& u) {
    const Grid& g = u.grid;
    const ScalarField d2u3 = partial(u[2], 1);
    const ScalarField d3u2 = partial(u[1], 2);
    const ScalarField d3u1 = partial(u[0], 2);
    const ScalarField d1u3 = partial(u[2], 0);
    const ScalarField d1u2 = partial(u[1], 0);
    const ScalarField d2u1 = partial(u[0], 1);
    VectorField out(g, {d2u3.parity, d3u1.parity, d1u2.parity});
    for (std::size_t n = 0; n < g.size(); ++n) {
        out[0].values[n] = d2u3.values[n] - d3u2.values[n];
        out[1].values[n] = d3u1.values[n] - d1u3.values[n];
        out[2].values[n] = d1u2.values[n] - d2u1.values[n];
    }
    return out;
}

namespace {

struct Cell {
    int lo;
    double frac;
};

// Locates t in [0, extent] on n nodes; t at the last node maps to frac = 1 in the last cell.
Cell locate(double t, double extent, int n) {
    const double p = t * (n - 1) / extent;
    int lo = static_cast<int>(std::floor(p));
    lo = std::clamp(lo, 0, n - 2);
    return {lo, p - lo};
}

}  // namespace

double interpolate(const ScalarField& f, const Point& x) {
    const Grid& g = f.grid;
    const double tol = 1e-12 * g.L;
    if (!(x.x1 >= -tol && x.x1 <= g.L + tol) ) {
        throw DomainError("interpolate: x1 = " + std::to_string(x.x1) + " outside [0, L]");
    }
    const double x1 = std::clamp(x.x1, 0.0, g.L);
    const Fold f2 = fold_coordinate(x.x2);
    const Fold f3 = fold_coordinate(x.x3);
    double sign = 1.0;
    if (f2.sign < 0 && f.parity.x2 < 0) sign = -sign;
    if (f3.sign < 0 && f.parity.x3 < 0) sign = -sign;

    const Cell c1 = locate(x1, g.L, g.n1);
    const Cell c2 = locate(f2.t, 1.0, g.n2);
    const Cell c3 = locate(f3.t, 1.0, g.n3);
    double acc = 0.0;
    for (int a = 0; a < 2; ++a) {
        const double w1 = a ? c1.frac : 1.0 - c1.frac;
        if (w1 == 0.0) continue;
        for (int b = 0; b < 2; ++b) {
            const double w2 = b ? c2.frac : 1.0 - c2.frac;
            if (w2 == 0.0) continue;
            for (int c = 0; c < 2; ++c) {
                const double w3 = c ? c3.frac : 1.0 - c3.frac;
                if (w3 == 0.0) continue;
                acc += w1 * w2 * w3 * f(c1.lo + a, c2.lo + b, c3.lo + c);
            }
        }
    }
    return sign * acc;
}

std::array<double, 3> interpolate(const VectorField& f, const Point& x) {
    return {interpolate(f[0], x), interpolate(f[1], x), interpolate(f[2], x)};
}

std::array<double, 4> cubic_weights(double t) {
    return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

double interpolate_cubic(const ScalarField& f, const Point& x) {
    const Grid& g = f.grid;
    const double tol = 1e-12 * g.L;
    if (!(x.x1 >= -tol && x.x1 <= g.L + tol)) {
        throw DomainError("interpolate: x1 = " + std::to_string(x.x1) + " outside [0, L]");
    }
    const double x1 = std::clamp(x.x1, 0.0, g.L);
    const Fold f2 = fold_coordinate(x.x2);
    const Fold f3 = fold_coordinate(x.x3);
    double sign = 1.0;
    if (f2.sign < 0 && f.parity.x2 < 0) sign = -sign;
    if (f3.sign < 0 && f.parity.x3 < 0) sign = -sign;
    const Cell c1 = locate(x1, g.L, g.n1);
    const Cell c2 = locate(f2.t, 1.0, g.n2);
    const Cell c3 = locate(f3.t, 1.0, g.n3);
    const auto w2 = cubic_weights(c2.frac);
    const auto w3 = cubic_weights(c3.frac);
    const bool inside = c2.lo >= 1 && c2.lo + 2 < g.n2 && c3.lo >= 1 && c3.lo + 2 < g.n3;
    double acc = 0.0;
    for (int a = 0; a < 2; ++a) {
        const double w1 = a ? c1.frac : 1.0 - c1.frac;
        if (w1 == 0.0) continue;
        const int i = c1.lo + a;
        double plane = 0.0;
        for (int b = 0; b < 4; ++b) {
            if (w2[b] == 0.0) continue;
            const int j = c2.lo - 1 + b;
            double row = 0.0;
            for (int c = 0; c < 4; ++c) {
                if (w3[c] == 0.0) continue;
                const int k = c3.lo - 1 + c;
                row += w3[c] * (inside ? f(i, j, k) : f.ghost(i, j, k));
            }
            plane += w2[b] * row;
        }
        acc += w1 * plane;
    }
    return sign * acc;
}

ExtendedField::ExtendedField(ScalarField field, Parity parity) : field_(std::move(field)) {
    field_.parity = parity;
}

double ExtendedField::operator()(const Point& x) const { return interpolate(field_, x); }

ExtendedField extend_reflect(const ScalarField& f, Parity parity) { return ExtendedField(f, parity); }

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double max_abs(const VectorField& f) {
    return std::max({max_abs(f[0]), max_abs(f[1]), max_abs(f[2])});
}

double mean(const ScalarField& f) {
    const Grid& g = f.grid;
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                const double w = g.volume(i, j, k);
                num += w * f(i, j, k);
                den += w;
            }
    return num / den;
}

void subtract_mean(ScalarField& f) {
    const double m = mean(f);
    for (double& v : f.values) v -= m;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a.values[n] - b.values[n]));
    return m;
}

double max_abs_diff(const VectorField& a, const VectorField& b) {
    return std::max({max_abs_diff(a[0], b[0]), max_abs_diff(a[1], b[1]), max_abs_diff(a[2], b[2])});
}

ScalarField add(const ScalarField& a, const ScalarField& b, double scale_b) {
    ScalarField out = a;
    for (std::size_t n = 0; n < out.size(); ++n) out.values[n] += scale_b * b.values[n];
    return out;
}

VectorField add(const VectorField& a, const VectorField& b, double scale_b) {
    VectorField out = a;
    for (int c = 0; c < 3; ++c) out[c] = add(a[c], b[c], scale_b);
    return out;
}

VectorField scale(const VectorField& a, const ScalarField& s) {
    VectorField out = a;
    for (int c = 0; c < 3; ++c)
        for (std::size_t n = 0; n < s.size(); ++n) out[c].values[n] *= s.values[n];
    return out;
}

VectorField cross(const VectorField& a, const VectorField& b) {
    // Parity of a product is the product of parities.
    auto mul = [](Parity p, Parity q) {
        return Parity{static_cast<std::int8_t>(p.x2 * q.x2), static_cast<std::int8_t>(p.x3 * q.x3)};
    };
    VectorField out(a.grid, {mul(a[1].parity, b[2].parity), mul(a[2].parity, b[0].parity),
                             mul(a[0].parity, b[1].parity)});
    for (std::size_t n = 0; n < a.grid.size(); ++n) {
        const auto u = a.at(n);
        const auto v = b.at(n);
        out[0].values[n] = u[1] * v[2] - u[2] * v[1];
        out[1].values[n] = u[2] * v[0] - u[0] * v[2];
        out[2].values[n] = u[0] * v[1] - u[1] * v[0];
    }
    return out;
}

ScalarField dot(const VectorField& a, const VectorField& b) {
    ScalarField out(a.grid, 0.0, Parity{static_cast<std::int8_t>(a[0].parity.x2 * b[0].parity.x2),
                                        static_cast<std::int8_t>(a[0].parity.x3 * b[0].parity.x3)});
    for (std::size_t n = 0; n < a.grid.size(); ++n)
        for (int c = 0; c < 3; ++c) out.values[n] += a[c].values[n] * b[c].values[n];
    return out;
}

ScalarField speed_squared(const VectorField& u) {
    ScalarField out = dot(u, u);
    out.parity = kEven;
    return out;
}

ScalarField mirror_x2(const ScalarField& f) {
    const Grid& g = f.grid;
    ScalarField out(g, 0.0, f.parity);
    const double s = f.parity.x2 < 0 ? -1.0 : 1.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) out(i, j, k) = s * f(i, g.n2 - 1 - j, k);
    return out;
}

VectorField mirror_x2(const VectorField& f) {
    VectorField out = f;
    for (int c = 0; c < 3; ++c) out[c] = mirror_x2(f[c]);
    return out;
}

ScalarField swap_x2_x3(const ScalarField& f) {
    const Grid& g = f.grid;
    if (g.n2 != g.n3) throw DomainError("swap_x2_x3 requires n2 == n3");
    ScalarField out(g, 0.0, Parity{f.parity.x3, f.parity.x2});
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) out(i, j, k) = f(i, k, j);
    return out;
}

VectorField swap_x2_x3(const VectorField& f) {
    VectorField out(f.grid, kPolarParity);
    out[0] = swap_x2_x3(f[0]);
    out[1] = swap_x2_x3(f[2]);
    out[2] = swap_x2_x3(f[1]);
    return out;
}

}  // namespace nozzle
