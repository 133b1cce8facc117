#include "nozzle/streamline.hpp"

#include "nozzle/errors.hpp"
#include "nozzle/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nozzle {

std::array<double, 2> VelocityRatio::operator()(double s, double x2, double x3) const {
    const Point p{s, x2, x3};
    return {interpolate_cubic(U2, p), interpolate_cubic(U3, p)};
}

VelocityRatio extend_velocity_ratio(const VectorField& u, double u1_floor) {
    const Grid& g = u.grid;
    double min_u1 = u[0].values.empty() ? 0.0 : u[0].values[0];
    std::size_t where = 0;
    for (std::size_t n = 0; n < g.size(); ++n)
        if (u[0].values[n] < min_u1) {
            min_u1 = u[0].values[n];
            where = n;
        }
    if (!(min_u1 > u1_floor)) {
        const int k = static_cast<int>(where % g.n3);
        const int j = static_cast<int>((where / g.n3) % g.n2);
        const int i = static_cast<int>(where / (static_cast<std::size_t>(g.n2) * g.n3));
        std::ostringstream os;
        os << "u1 = " << min_u1 << " at (" << g.x1(i) << ", " << g.x2(j) << ", " << g.x3(k)
           << ") is not above the floor " << u1_floor;
        throw DegeneracyError(os.str());
    }
    VelocityRatio U{ScalarField(g, 0.0, Parity{-1, 1}), ScalarField(g, 0.0, Parity{1, -1})};
    for (std::size_t n = 0; n < g.size(); ++n) {
        U.U2.values[n] = u[1].values[n] / u[0].values[n];
        U.U3.values[n] = u[2].values[n] / u[0].values[n];
    }
    enforce_parity(U.U2);
    enforce_parity(U.U3);
    return U;
}

int trace_steps(const Grid& g, double x1, double s_end, double rk_tol) {
    const double len = x1 - s_end;
    if (len <= 0.0) return 0;
    const double max_step = std::min(g.h1, std::pow(rk_tol, 0.25));
    auto round4 = [](int n) { return std::max(4, (n + 3) / 4 * 4); };
    // Trilinear data is polynomial inside a cell; with both ends on node planes,
    // steps that tile each x1 cell keep RK4 at full order.
    const double cells = len / g.h1;
    const double start_cells = s_end / g.h1;
    if (std::abs(cells - std::round(cells)) < 1e-9 && std::abs(start_cells - std::round(start_cells)) < 1e-9) {
        const int per_cell = round4(static_cast<int>(std::ceil(g.h1 / max_step - 1e-9)));
        return static_cast<int>(std::lround(cells)) * per_cell;
    }
    return round4(static_cast<int>(std::ceil(len / max_step - 1e-9)));
}

namespace {

// One RK4 step of size ds (negative when going backward).
void rk4(const VelocityRatio& U, double s, double ds, double& X2, double& X3) {
    const auto k1 = U(s, X2, X3);
    const auto k2 = U(s + 0.5 * ds, X2 + 0.5 * ds * k1[0], X3 + 0.5 * ds * k1[1]);
    const auto k3 = U(s + 0.5 * ds, X2 + 0.5 * ds * k2[0], X3 + 0.5 * ds * k2[1]);
    const auto k4 = U(s + ds, X2 + ds * k3[0], X3 + ds * k3[1]);
    X2 += ds / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    X3 += ds / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
}

}  // namespace

StreamlineTrace trace_to(const VelocityRatio& U, const Point& x, double s_end, const TraceOptions& options) {
    const Grid& g = U.U2.grid;
    if (!(x.x1 >= 0.0 && x.x1 <= g.L) || !(s_end >= 0.0 && s_end <= x.x1)) {
        throw DomainError("trace_to: need 0 <= s_end <= x1 <= L");
    }
    if (!(options.rk_tol > 0.0)) throw DomainError("trace_to: rk_tol must be positive");
    StreamlineTrace tr;
    tr.x = x;
    const int n = trace_steps(g, x.x1, s_end, options.rk_tol);
    tr.s.resize(n + 1);
    tr.X2.resize(n + 1);
    tr.X3.resize(n + 1);
    tr.X2[n] = x.x2;
    tr.X3[n] = x.x3;
    tr.s[n] = x.x1;
    tr.s[0] = s_end;
    if (n > 0) {
        const double step = (x.x1 - s_end) / n;
        for (int k = 1; k < n; ++k) tr.s[k] = s_end + k * step;
        double X2 = x.x2;
        double X3 = x.x3;
        for (int k = n; k > 0; --k) {
            rk4(U, tr.s[k], -step, X2, X3);
            tr.X2[k - 1] = X2;
            tr.X3[k - 1] = X3;
        }
        double Y2 = x.x2;
        double Y3 = x.x3;
        for (int k = n; k > 0; k -= 2) rk4(U, tr.s[k], -2.0 * step, Y2, Y3);
        tr.richardson = std::max(std::abs(Y2 - tr.X2[0]), std::abs(Y3 - tr.X3[0]));
        if (tr.richardson > options.accept_factor * options.rk_tol) {
            tr.steps_rejected = 1;
            std::ostringstream os;
            os << "streamline step-halving check " << tr.richardson << " exceeds "
               << options.accept_factor * options.rk_tol << " from (" << x.x1 << ", " << x.x2 << ", " << x.x3
               << ")";
            throw IntegrationError(os.str());
        }
    }
    tr.foot2 = tr.X2[0];
    tr.foot3 = tr.X3[0];
    tr.gamma2 = fold_coordinate(tr.foot2).t;
    tr.gamma3 = fold_coordinate(tr.foot3).t;
    return tr;
}

StreamlineTrace trace_to_inlet(const VelocityRatio& U, const Point& x, const TraceOptions& options) {
    return trace_to(U, x, 0.0, options);
}

FootPoints trace_field(const VectorField& u, const TraceOptions& options, double u1_floor) {
    const Grid& g = u.grid;
    const VelocityRatio U = extend_velocity_ratio(u, u1_floor);
    FootPoints fp{ScalarField(g), ScalarField(g)};
    std::vector<double> failure(g.size(), 0.0);
    parallel_for(g.size(), [&](std::size_t n) {
        const int k = static_cast<int>(n % g.n3);
        const int j = static_cast<int>((n / g.n3) % g.n2);
        const int i = static_cast<int>(n / (static_cast<std::size_t>(g.n2) * g.n3));
        try {
            const StreamlineTrace tr = trace_to_inlet(U, g.node(i, j, k), options);
            fp.gamma2.values[n] = tr.gamma2;
            fp.gamma3.values[n] = tr.gamma3;
        } catch (const IntegrationError&) {
            TraceOptions loose = options;
            loose.accept_factor = std::numeric_limits<double>::infinity();
            failure[n] = trace_to_inlet(U, g.node(i, j, k), loose).richardson;
        }
    });
    const auto worst = std::max_element(failure.begin(), failure.end());
    if (*worst > 0.0) {
        const std::size_t n = static_cast<std::size_t>(worst - failure.begin());
        const auto count = std::count_if(failure.begin(), failure.end(), [](double v) { return v > 0.0; });
        const int k = static_cast<int>(n % g.n3);
        const int j = static_cast<int>((n / g.n3) % g.n2);
        const int i = static_cast<int>(n / (static_cast<std::size_t>(g.n2) * g.n3));
        std::ostringstream os;
        os << count << " streamline(s) failed the step-halving check; worst " << *worst << " from ("
           << g.x1(i) << ", " << g.x2(j) << ", " << g.x3(k) << ")";
        throw IntegrationError(os.str());
    }
    return fp;
}

}  // namespace nozzle
