#include "nozzle/gas.hpp"

#include "nozzle/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nozzle {

namespace {

std::string describe(const char* what, double value) {
    std::ostringstream os;
    os.precision(17);
    os << what << " (value " << value << ")";
    return os.str();
}

// Largest density bracket tried when inverting h. Enthalpy grows without bound, so
// the expanding search below terminates for every finite h.
constexpr double kMaxDensity = 1e300;

}  // namespace

void GasModel::validate() const {
    if (!(gamma > 1.0)) throw DomainError(describe("gamma must exceed 1", gamma));
    if (!(entropy_const > 0.0)) throw DomainError(describe("entropy_const must be positive", entropy_const));
    if (!(bernoulli_const > 0.0)) throw DomainError(describe("bernoulli_const must be positive", bernoulli_const));
}

double GasModel::pressure(double rho) const {
    if (!(rho > 0.0)) throw DomainError(describe("pressure: density must be positive", rho));
    return entropy_const * std::pow(rho, gamma);
}

double GasModel::sound_speed(double rho) const {
    if (!(rho > 0.0)) throw DomainError(describe("sound_speed: density must be positive", rho));
    return std::sqrt(entropy_const * gamma * std::pow(rho, gamma - 1.0));
}

double GasModel::enthalpy(double rho) const {
    if (!(rho > 0.0)) throw DomainError(describe("enthalpy: density must be positive", rho));
    return gamma * entropy_const / (gamma - 1.0) * std::pow(rho, gamma - 1.0);
}

double GasModel::enthalpy_derivative(double rho) const {
    if (!(rho > 0.0)) throw DomainError(describe("enthalpy_derivative: density must be positive", rho));
    return gamma * entropy_const * std::pow(rho, gamma - 2.0);
}

double GasModel::density_from_enthalpy(double h) const {
    if (!(h > 0.0)) throw OutOfRangeError(describe("enthalpy below range of h (vacuum)", h), h);
    if (!std::isfinite(h)) throw OutOfRangeError(describe("enthalpy not finite", h), h);

    // Bracket [lo, hi] with h(lo) <= target <= h(hi).
    double lo = 0.0;
    double hi = 1.0;
    while (enthalpy(hi) < h) {
        lo = hi;
        hi *= 2.0;
        if (hi > kMaxDensity) throw OutOfRangeError(describe("enthalpy above representable range", h), h);
    }
    double rho = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double residual = enthalpy(rho) - h;
        if (residual > 0.0) hi = rho; else lo = rho;
        const double slope = enthalpy_derivative(rho);
        double next = rho - residual / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - rho);
        rho = next;
        if (step <= 1e-13 * rho) {
            // One more Newton step polishes to machine precision.
            const double polished = rho - (enthalpy(rho) - h) / enthalpy_derivative(rho);
            return polished > 0.0 ? polished : rho;
        }
    }
    return rho;
}

void Truncation::validate() const {
    if (m < 2) throw DomainError(describe("truncation index m must be >= 2", m));
}

double Truncation::zeta(double s) const {
    const double a = lower();
    const double b = upper();
    if (s <= a) return s;
    if (s >= b) return plateau();
    const double w = b - a;
    const double t = (s - a) / w;
    // p(t) = t + 2/3 t^3 - 2 t^4 + t^5: p(0)=0, p'(0)=1, p''(0)=0, p(1)=2/3, p'(1)=p''(1)=0.
    const double p = t + t * t * t * (2.0 / 3.0 - 2.0 * t + t * t);
    return a + w * p;
}

double Truncation::zeta_derivative(double s) const {
    const double a = lower();
    const double b = upper();
    if (s <= a) return 1.0;
    if (s >= b) return 0.0;
    const double t = (s - a) / (b - a);
    const double one_minus = 1.0 - t;
    return one_minus * one_minus * (5.0 * t * t + 2.0 * t + 1.0);
}

double sound_speed(const GasModel& gas, double rho) { return gas.sound_speed(rho); }

double density_from_speed(const GasModel& gas, double q_sq, double bernoulli) {
    if (q_sq < 0.0) throw DomainError(describe("density_from_speed: negative speed squared", q_sq));
    const double h = bernoulli - 0.5 * q_sq;
    if (!(h > 0.0)) {
        throw OutOfRangeError(describe("density_from_speed: B - |u|^2/2 below range of h", h), h);
    }
    return gas.density_from_enthalpy(h);
}

double critical_speed(const GasModel& gas, double bernoulli) {
    // g(q) = q^2 - c^2(H(B - q^2/2)) is increasing; g(0) < 0 and g -> +q^2 at vacuum.
    if (!(bernoulli > 0.0)) throw InfeasibleError(describe("critical_speed: no sonic state for B", bernoulli));
    const double q_vac = std::sqrt(2.0 * bernoulli);
    auto g = [&](double q) {
        const double h = bernoulli - 0.5 * q * q;
        if (h <= 0.0) return q * q;
        const double c = gas.sound_speed(gas.density_from_enthalpy(h));
        return q * q - c * c;
    };
    double lo = 0.0;
    double hi = q_vac;
    if (!(g(lo) < 0.0)) throw InfeasibleError(describe("critical_speed: no subsonic rest state for B", bernoulli));
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    const double lo_val = std::abs(g(lo));
    const double hi_val = std::abs(g(hi));
    return lo_val <= hi_val ? lo : hi;
}

double mass_flux(const GasModel& gas, double q, double bernoulli) {
    if (q < 0.0) throw DomainError(describe("mass_flux: negative speed", q));
    if (q == 0.0) return 0.0;
    return density_from_speed(gas, q * q, bernoulli) * q;
}

double subsonic_speed_from_flux(const GasModel& gas, double flux, double bernoulli) {
    if (flux < 0.0) throw DomainError(describe("subsonic_speed_from_flux: negative flux", flux));
    const double q_star = critical_speed(gas, bernoulli);
    const double j_star = mass_flux(gas, q_star, bernoulli);
    if (flux > j_star * (1.0 + 1e-14)) {
        throw InfeasibleError(describe("subsonic_speed_from_flux: flux exceeds critical flux", flux));
    }
    if (flux == 0.0) return 0.0;
    if (flux >= j_star) return q_star;
    double lo = 0.0;
    double hi = q_star;
    for (int it = 0; it < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mass_flux(gas, mid, bernoulli) < flux ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double truncated_density(const GasModel& gas, const Truncation& trunc, double q_sq, double c_star_sq) {
    if (q_sq < 0.0) throw DomainError(describe("truncated_density: negative speed squared", q_sq));
    return density_from_speed(gas, c_star_sq * trunc.zeta(q_sq / c_star_sq), gas.bernoulli_const);
}

double truncated_density(const GasModel& gas, const Truncation& trunc, double q_sq) {
    const double c = critical_speed(gas, gas.bernoulli_const);
    return truncated_density(gas, trunc, q_sq, c * c);
}

double truncated_density_derivative(const GasModel& gas, const Truncation& trunc, double q_sq, double c_star_sq) {
    // d rho/d(q^2) = -1/2 / h'(rho); chain rule through zeta.
    const double s = c_star_sq * trunc.zeta(q_sq / c_star_sq);
    const double rho = density_from_speed(gas, s, gas.bernoulli_const);
    return -0.5 / gas.enthalpy_derivative(rho) * trunc.zeta_derivative(q_sq / c_star_sq);
}

double truncated_density_derivative(const GasModel& gas, const Truncation& trunc, double q_sq) {
    const double c = critical_speed(gas, gas.bernoulli_const);
    return truncated_density_derivative(gas, trunc, q_sq, c * c);
}

}  // namespace nozzle
