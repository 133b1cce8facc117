#pragma once

// Vertex-centred grid on [0,L] x [0,1]^2 and the fields living on it.
//
// Walls x2 in {0,1} and x3 in {0,1} are handled by reflection: every field
// carries a parity per wall-normal axis, and values outside [0,1] are the
// even (+1) or odd (-1) mirror images, periodic with period 2. Odd fields
// vanish on the corresponding walls. The inlet x1 = 0 and outlet x1 = L are
// never extended; derivatives there are one-sided.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace nozzle {

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
};

struct Grid {
    double L = 1.0;
    int n1 = 3;
    int n2 = 3;
    int n3 = 3;
    double h1 = 0.5;
    double h2 = 0.5;
    double h3 = 0.5;

    /// Throws DomainError unless L > 0 and every node count is >= 3.
    static Grid make(double L, int n1, int n2, int n3);

    std::size_t size() const { return static_cast<std::size_t>(n1) * n2 * n3; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n2 + j) * n3 + k;
    }
    double x1(int i) const { return i == n1 - 1 ? L : i * h1; }
    double x2(int j) const { return j == n2 - 1 ? 1.0 : j * h2; }
    double x3(int k) const { return k == n3 - 1 ? 1.0 : k * h3; }
    Point node(int i, int j, int k) const { return {x1(i), x2(j), x3(k)}; }
    double h_max() const;
    double h_min() const;

    /// Trapezoid (dual-cell) volume of a node.
    double volume(int i, int j, int k) const;
    /// Trapezoid area weight of node (j,k) on an x1 = const plane.
    double plane_area(int j, int k) const;

    bool on_inlet(int i) const { return i == 0; }
    bool on_outlet(int i) const { return i == n1 - 1; }
    bool on_wall2(int j) const { return j == 0 || j == n2 - 1; }
    bool on_wall3(int k) const { return k == 0 || k == n3 - 1; }

    bool operator==(const Grid& other) const {
        return L == other.L && n1 == other.n1 && n2 == other.n2 && n3 == other.n3;
    }
};

/// Reflection parity across the x2 and x3 walls: +1 even, -1 odd.
struct Parity {
    std::int8_t x2 = 1;
    std::int8_t x3 = 1;
    bool operator==(const Parity&) const = default;
};

inline constexpr Parity kEven{1, 1};

using VectorParity = std::array<Parity, 3>;

/// Normal component odd: velocity, momentum, gradients of even scalars.
inline constexpr VectorParity kPolarParity{Parity{1, 1}, Parity{-1, 1}, Parity{1, -1}};
/// Tangential components odd: vorticity, vector potential.
inline constexpr VectorParity kAxialParity{Parity{-1, -1}, Parity{1, -1}, Parity{-1, 1}};

/// Parity of d/dx_axis applied to a field of parity p (axis in {0,1,2}).
Parity derivative_parity(Parity p, int axis);

/// Folds a coordinate into [0,1] by reflection; returns the folded value and
/// the number of reflections modulo 2 as a sign (+1 even count, -1 odd).
struct Fold {
    double t;
    int sign;
};
Fold fold_coordinate(double t);

/// Folds a node index into [0, n-1] with period 2(n-1).
struct IndexFold {
    int index;
    int sign;
};
IndexFold fold_index(int j, int n);

struct ScalarField {
    Grid grid;
    std::vector<double> values;
    Parity parity = kEven;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0, Parity p = kEven);

    double& operator()(int i, int j, int k) { return values[grid.index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
    /// Value with reflection ghosts for j, k outside the grid.
    double ghost(int i, int j, int k) const;

    std::size_t size() const { return values.size(); }
};

struct VectorField {
    Grid grid;
    std::array<ScalarField, 3> comp;

    VectorField() = default;
    explicit VectorField(const Grid& g, VectorParity p = kPolarParity);

    ScalarField& operator[](int c) { return comp[c]; }
    const ScalarField& operator[](int c) const { return comp[c]; }
    VectorParity parity() const { return {comp[0].parity, comp[1].parity, comp[2].parity}; }
    std::array<double, 3> at(std::size_t n) const {
        return {comp[0].values[n], comp[1].values[n], comp[2].values[n]};
    }
};

/// Samples a callable f(x1,x2,x3) at every node.
template <class F>
ScalarField sample(const Grid& g, F&& f, Parity p = kEven) {
    ScalarField out(g, 0.0, p);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) out(i, j, k) = f(g.x1(i), g.x2(j), g.x3(k));
    return out;
}

/// Sets odd-parity values on their walls to exactly zero.
void enforce_parity(ScalarField& f);
void enforce_parity(VectorField& f);

/// Partial derivative along axis (0,1,2) at a node: central differences in the
/// interior and across reflected walls, second-order one-sided (4 points) at x1 = 0, L.
double partial(const ScalarField& f, int axis, int i, int j, int k);

ScalarField partial(const ScalarField& f, int axis);
VectorField gradient(const ScalarField& phi);
ScalarField divergence(const VectorField& F);
/// curl u = (d2u3 - d3u2, d3u1 - d1u3, d1u2 - d2u1).
VectorField curl(const VectorField& u);

/// Trilinear interpolation of the reflection-extended field. Throws
/// DomainError when x1 lies outside [0, L].
double interpolate(const ScalarField& f, const Point& x);
std::array<double, 3> interpolate(const VectorField& f, const Point& x);

/// Linear in x1, four-point cubic Lagrange in x2 and x3 (reflection ghosts).
/// Smooth-error variant used along streamlines, where derivatives of pulled-back
/// quantities must stay second order. Exact at nodes.
double interpolate_cubic(const ScalarField& f, const Point& x);

/// Four-point cubic Lagrange weights at fraction t in [0, 1] of cell [0, 1] (nodes -1, 0, 1, 2).
std::array<double, 4> cubic_weights(double t);

/// Evaluator of a field on [0,L] x R^2 through its parity extension.
class ExtendedField {
public:
    ExtendedField(ScalarField field, Parity parity);
    double operator()(const Point& x) const;
    const ScalarField& field() const { return field_; }

private:
    ScalarField field_;
};

ExtendedField extend_reflect(const ScalarField& f, Parity parity);

// Reductions.
double max_abs(const ScalarField& f);
double max_abs(const VectorField& f);
/// Trapezoid-weighted mean.
double mean(const ScalarField& f);
void subtract_mean(ScalarField& f);
double max_abs_diff(const ScalarField& a, const ScalarField& b);
double max_abs_diff(const VectorField& a, const VectorField& b);

// Pointwise algebra used across modules.
ScalarField add(const ScalarField& a, const ScalarField& b, double scale_b = 1.0);
VectorField add(const VectorField& a, const VectorField& b, double scale_b = 1.0);
VectorField scale(const VectorField& a, const ScalarField& s);
VectorField cross(const VectorField& a, const VectorField& b);
ScalarField dot(const VectorField& a, const VectorField& b);
ScalarField speed_squared(const VectorField& u);

/// Mirror x2 -> 1 - x2. Components flip sign according to their x2 parity,
/// which is the correct transformation for both polar and axial vectors.
ScalarField mirror_x2(const ScalarField& f);
VectorField mirror_x2(const VectorField& f);
/// Swap x2 <-> x3 (requires n2 == n3). Vector version is for polar vectors.
ScalarField swap_x2_x3(const ScalarField& f);
VectorField swap_x2_x3(const VectorField& f);

}  // namespace nozzle
