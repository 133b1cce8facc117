#pragma once

// Backward characteristics of dX_a/ds = u_a/u_1 (a = 2, 3), parameterised by s = x1.

#include "nozzle/grid.hpp"

#include <vector>

namespace nozzle {

/// u2/u1 and u3/u1 on the nodes, extended by reflection (u2/u1 odd in x2, u3/u1 odd in x3).
struct VelocityRatio {
    ScalarField U2;
    ScalarField U3;

    std::array<double, 2> operator()(double s, double x2, double x3) const;
};

/// Throws DegeneracyError when min u1 <= u1_floor.
VelocityRatio extend_velocity_ratio(const VectorField& u, double u1_floor = 1e-8);

struct TraceOptions {
    double rk_tol = 1e-8;
    /// Richardson disagreement allowed, as a multiple of rk_tol.
    double accept_factor = 100.0;
};

struct StreamlineTrace {
    Point x;
    /// s_k = k * step for k = 0..n; X2, X3 sampled there (unfolded, extended plane).
    std::vector<double> s;
    std::vector<double> X2;
    std::vector<double> X3;
    /// Foot point folded into [0,1]^2.
    double gamma2 = 0.0;
    double gamma3 = 0.0;
    /// Unfolded foot point.
    double foot2 = 0.0;
    double foot3 = 0.0;
    /// Richardson estimate |X(step) - X(2 step)| at s = 0.
    double richardson = 0.0;
    int steps_rejected = 0;
};

/// Number of fine steps from s = x1 down to s_end: a positive multiple of 4 with
/// step <= min(h1, rk_tol^(1/4)). When both ends lie on x1 node planes the
/// steps tile every cell (4, 8, ... per cell). Zero for an empty path.
int trace_steps(const Grid& g, double x1, double s_end, double rk_tol);

/// RK4 from s = x.x1 down to s = s_end with the fixed fine step, plus one
/// Richardson check against the doubled step. Throws IntegrationError when the
/// check exceeds accept_factor * rk_tol.
StreamlineTrace trace_to(const VelocityRatio& U, const Point& x, double s_end, const TraceOptions& options = {});
StreamlineTrace trace_to_inlet(const VelocityRatio& U, const Point& x, const TraceOptions& options = {});

struct FootPoints {
    ScalarField gamma2;
    ScalarField gamma3;
};

/// trace_to_inlet at every node. Failures are collected and reported with the worst node.
FootPoints trace_field(const VectorField& u, const TraceOptions& options = {}, double u1_floor = 1e-8);

}  // namespace nozzle
