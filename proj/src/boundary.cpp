#include "nozzle/boundary.hpp"

#include "nozzle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nozzle {

PlaneField::PlaneField(const Grid& g, double fill, Parity p)
    : n2(g.n2), n3(g.n3), values(static_cast<std::size_t>(g.n2) * g.n3, fill), parity(p) {}

double PlaneField::ghost(int j, int k) const {
    const IndexFold fj = fold_index(j, n2);
    const IndexFold fk = fold_index(k, n3);
    double v = (*this)(fj.index, fk.index);
    if (fj.sign < 0 && parity.x2 < 0) v = -v;
    if (fk.sign < 0 && parity.x3 < 0) v = -v;
    return v;
}

double PlaneField::interpolate(double x2, double x3) const {
    const Fold f2 = fold_coordinate(x2);
    const Fold f3 = fold_coordinate(x3);
    double sign = 1.0;
    if (f2.sign < 0 && parity.x2 < 0) sign = -sign;
    if (f3.sign < 0 && parity.x3 < 0) sign = -sign;
    const double p2 = f2.t * (n2 - 1);
    const double p3 = f3.t * (n3 - 1);
    const int j = std::clamp(static_cast<int>(std::floor(p2)), 0, n2 - 2);
    const int k = std::clamp(static_cast<int>(std::floor(p3)), 0, n3 - 2);
    const double s = p2 - j;
    const double t = p3 - k;
    double acc = 0.0;
    if (s != 1.0 && t != 1.0) acc += (1 - s) * (1 - t) * (*this)(j, k);
    if (s != 0.0 && t != 1.0) acc += s * (1 - t) * (*this)(j + 1, k);
    if (s != 1.0 && t != 0.0) acc += (1 - s) * t * (*this)(j, k + 1);
    if (s != 0.0 && t != 0.0) acc += s * t * (*this)(j + 1, k + 1);
    return sign * acc;
}

double PlaneField::interpolate_cubic(double x2, double x3) const {
    const Fold f2 = fold_coordinate(x2);
    const Fold f3 = fold_coordinate(x3);
    double sign = 1.0;
    if (f2.sign < 0 && parity.x2 < 0) sign = -sign;
    if (f3.sign < 0 && parity.x3 < 0) sign = -sign;
    const double p2 = f2.t * (n2 - 1);
    const double p3 = f3.t * (n3 - 1);
    const int j = std::clamp(static_cast<int>(std::floor(p2)), 0, n2 - 2);
    const int k = std::clamp(static_cast<int>(std::floor(p3)), 0, n3 - 2);
    const auto w2 = cubic_weights(p2 - j);
    const auto w3 = cubic_weights(p3 - k);
    double acc = 0.0;
    for (int b = 0; b < 4; ++b) {
        if (w2[b] == 0.0) continue;
        double row = 0.0;
        for (int c = 0; c < 4; ++c)
            if (w3[c] != 0.0) row += w3[c] * ghost(j - 1 + b, k - 1 + c);
        acc += w2[b] * row;
    }
    return sign * acc;
}

double PlaneField::tangential_derivative(int axis, int j, int k) const {
    if (axis == 1) {
        return (-ghost(j + 2, k) + 8.0 * ghost(j + 1, k) - 8.0 * ghost(j - 1, k) + ghost(j - 2, k)) /
               (12.0 * h2());
    }
    if (axis == 2) {
        return (-ghost(j, k + 2) + 8.0 * ghost(j, k + 1) - 8.0 * ghost(j, k - 1) + ghost(j, k - 2)) /
               (12.0 * h3());
    }
    throw DomainError("tangential_derivative: axis must be 1 or 2");
}

void enforce_parity(PlaneField& f) {
    if (f.parity.x2 < 0)
        for (int k = 0; k < f.n3; ++k) f(0, k) = f(f.n2 - 1, k) = 0.0;
    if (f.parity.x3 < 0)
        for (int j = 0; j < f.n2; ++j) f(j, 0) = f(j, f.n3 - 1) = 0.0;
}

PlaneField plane_of(const ScalarField& f, int i) {
    PlaneField out(f.grid, 0.0, f.parity);
    for (int j = 0; j < f.grid.n2; ++j)
        for (int k = 0; k < f.grid.n3; ++k) out(j, k) = f(i, j, k);
    return out;
}

namespace {

double plane_integral(const Grid& g, const PlaneField& f, bool absolute) {
    double acc = 0.0;
    for (int j = 0; j < g.n2; ++j)
        for (int k = 0; k < g.n3; ++k) {
            const double v = f(j, k);
            acc += g.plane_area(j, k) * (absolute ? std::abs(v) : v);
        }
    return acc;
}

double max_plane(const PlaneField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

// Second-order one-sided normal derivatives on the four edges of a plane.
double max_edge_normal_derivative(const PlaneField& f) {
    const int n2 = f.n2;
    const int n3 = f.n3;
    double m = 0.0;
    for (int k = 0; k < n3; ++k) {
        m = std::max(m, std::abs(-3 * f(0, k) + 4 * f(1, k) - f(2, k)) / (2 * f.h2()));
        m = std::max(m, std::abs(3 * f(n2 - 1, k) - 4 * f(n2 - 2, k) + f(n2 - 3, k)) / (2 * f.h2()));
    }
    for (int j = 0; j < n2; ++j) {
        m = std::max(m, std::abs(-3 * f(j, 0) + 4 * f(j, 1) - f(j, 2)) / (2 * f.h3()));
        m = std::max(m, std::abs(3 * f(j, n3 - 1) - 4 * f(j, n3 - 2) + f(j, n3 - 3)) / (2 * f.h3()));
    }
    return m;
}

std::string fmt(const char* what, double value) {
    std::ostringstream os;
    os.precision(6);
    os << what << " (" << value << ")";
    return os.str();
}

}  // namespace

double BoundaryData::compatibility_defect() const {
    return plane_integral(grid, f_minus, false) + plane_integral(grid, f_plus, false);
}

double BoundaryData::flux_scale() const {
    return plane_integral(grid, f_minus, true) + plane_integral(grid, f_plus, true);
}

void BoundaryData::validate(double tol_compat) const {
    if (f_minus.n2 != grid.n2 || f_minus.n3 != grid.n3 || f_plus.n2 != grid.n2 || f_plus.n3 != grid.n3 ||
        kappa.n2 != grid.n2 || B0.n2 != grid.n2 || kappa.n3 != grid.n3 || B0.n3 != grid.n3) {
        throw InvalidDataError("boundary planes do not match the grid");
    }
    const double defect = compatibility_defect();
    const double scale = std::max(flux_scale(), 1e-300);
    if (std::abs(defect) > tol_compat * scale) {
        throw InvalidDataError(fmt("flux data violates compatibility: integral of f", defect));
    }
    for (double v : f_minus.values)
        if (!(v < 0.0)) throw InvalidDataError(fmt("inlet flux must be negative", v));
    for (double v : f_plus.values)
        if (!(v > 0.0)) throw InvalidDataError(fmt("outlet flux must be positive", v));

    // Edge conditions hold to discretisation accuracy for smooth data.
    const double h = std::max(f_minus.h2(), f_minus.h3());
    const double edge_tol = 10.0 * h * h;
    const double fscale = std::max({max_plane(f_minus), max_plane(f_plus), 1e-300});
    if (max_edge_normal_derivative(f_minus) > edge_tol * fscale ||
        max_edge_normal_derivative(f_plus) > edge_tol * fscale) {
        throw InvalidDataError("flux data needs zero normal derivative on the plane edges");
    }
    const double bscale = std::max(max_plane(B0), 1e-300);
    if (max_edge_normal_derivative(B0) > edge_tol * bscale) {
        throw InvalidDataError("B0 needs zero normal derivative on the inlet edges");
    }
    const double edge_value_tol = 1e-12 * std::max(1.0, bscale);
    auto on_edge = [&](int j, int k) { return j == 0 || k == 0 || j == grid.n2 - 1 || k == grid.n3 - 1; };
    for (int j = 0; j < grid.n2; ++j)
        for (int k = 0; k < grid.n3; ++k) {
            if (!on_edge(j, k)) continue;
            if (std::abs(kappa(j, k)) > edge_value_tol) throw InvalidDataError("kappa must vanish on the inlet edges");
            if (std::abs(B0(j, k) - bernoulli_ref) > edge_value_tol) {
                throw InvalidDataError("B0 must equal the Bernoulli constant on the inlet edges");
            }
        }
}

BoundaryData BoundaryData::scaled_flux(double factor) const {
    BoundaryData out = *this;
    for (double& v : out.f_minus.values) v *= factor;
    for (double& v : out.f_plus.values) v *= factor;
    return out;
}

double BoundaryData::B0_at(double x2, double x3) const {
    if (analytic && analytic->B0) {
        const Fold a = fold_coordinate(x2);
        const Fold b = fold_coordinate(x3);
        return analytic->B0(a.t, b.t);
    }
    return B0.interpolate(x2, x3);
}

double BoundaryData::dB0(int axis, int j, int k) const {
    if (analytic && analytic->dB0_dx2 && analytic->dB0_dx3) {
        const double x2 = grid.x2(j);
        const double x3 = grid.x3(k);
        return axis == 1 ? analytic->dB0_dx2(x2, x3) : analytic->dB0_dx3(x2, x3);
    }
    return B0.tangential_derivative(axis, j, k);
}

double BoundaryData::kappa_at_node(int j, int k) const { return kappa(j, k); }

BoundaryData boundary_family(const Grid& g, const BoundaryFamilyParams& p, double bernoulli_ref) {
    if (std::abs(p.a2) + std::abs(p.a3) >= 1.0) {
        throw InvalidDataError(fmt("cosine amplitudes make f change sign; |a2|+|a3|", std::abs(p.a2) + std::abs(p.a3)));
    }
    if (!(p.theta_bar > 0.0)) throw InvalidDataError(fmt("theta_bar must be positive", p.theta_bar));
    using std::numbers::pi;
    const double a2 = p.a2;
    const double a3 = p.a3;
    const double tb = p.theta_bar;
    const double ek = p.eps_kappa;
    const double eb = p.eps_B;

    BoundaryData d;
    d.grid = g;
    d.bernoulli_ref = bernoulli_ref;
    auto profile = [=](double x2, double x3) { return tb * (1.0 + a2 * std::cos(pi * x2) + a3 * std::cos(pi * x3)); };
    d.f_minus = sample_plane(g, [&](double x2, double x3) { return -profile(x2, x3); });
    d.f_plus = sample_plane(g, profile);
    // Rescale the outlet so the discrete integral vanishes exactly.
    const double in = plane_integral(g, d.f_minus, false);
    const double out = plane_integral(g, d.f_plus, false);
    for (double& v : d.f_plus.values) v *= -in / out;

    AnalyticBoundary an;
    an.kappa = [=](double x2, double x3) { return ek * std::sin(pi * x2) * std::sin(pi * x3); };
    an.B0 = [=](double x2, double x3) {
        const double s = std::sin(pi * x2) * std::sin(pi * x3);
        return bernoulli_ref + eb * s * s;
    };
    an.dB0_dx2 = [=](double x2, double x3) {
        const double s3 = std::sin(pi * x3);
        return eb * pi * std::sin(2.0 * pi * x2) * s3 * s3;
    };
    an.dB0_dx3 = [=](double x2, double x3) {
        const double s2 = std::sin(pi * x2);
        return eb * pi * s2 * s2 * std::sin(2.0 * pi * x3);
    };
    d.kappa = sample_plane(g, an.kappa, Parity{-1, -1});
    enforce_parity(d.kappa);
    d.B0 = sample_plane(g, an.B0);
    for (int j = 0; j < g.n2; ++j)
        for (int k = 0; k < g.n3; ++k)
            if (j == 0 || k == 0 || j == g.n2 - 1 || k == g.n3 - 1) d.B0(j, k) = bernoulli_ref;
    d.analytic = an;
    return d;
}

BoundaryData mirror_x2(const BoundaryData& data) {
    BoundaryData out = data;
    auto mirror = [](const PlaneField& f) {
        PlaneField m = f;
        const double s = f.parity.x2 < 0 ? -1.0 : 1.0;
        for (int j = 0; j < f.n2; ++j)
            for (int k = 0; k < f.n3; ++k) m(j, k) = s * f(f.n2 - 1 - j, k);
        return m;
    };
    out.f_minus = mirror(data.f_minus);
    out.f_plus = mirror(data.f_plus);
    out.kappa = mirror(data.kappa);
    out.B0 = mirror(data.B0);
    if (data.analytic) {
        const AnalyticBoundary a = *data.analytic;
        AnalyticBoundary m;
        m.B0 = [a](double x2, double x3) { return a.B0(1.0 - x2, x3); };
        m.dB0_dx2 = [a](double x2, double x3) { return -a.dB0_dx2(1.0 - x2, x3); };
        m.dB0_dx3 = [a](double x2, double x3) { return a.dB0_dx3(1.0 - x2, x3); };
        m.kappa = [a](double x2, double x3) { return -a.kappa(1.0 - x2, x3); };
        out.analytic = m;
    }
    return out;
}

}  // namespace nozzle
