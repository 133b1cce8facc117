#pragma once

// Manufactured-solution and closed-form verification battery.

#include "nozzle/grid.hpp"

#include "json.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nozzle {

struct VerifyRow {
    std::string module;
    std::string oracle;
    double observed = 0.0;
    /// Required interval [lo, hi]; infinite ends are open.
    double lo = 0.0;
    double hi = 0.0;
    bool pass = false;
    double seconds = 0.0;

    std::string required() const;
};

using GradientFn = std::function<VectorField(const ScalarField&)>;

struct BatteryOptions {
    /// "quick" (9^3 analytic cases) or "full" (adds refinement studies up to 33^3).
    std::string level = "quick";
    /// Gradient under test in the order-check row; defaults to nozzle::gradient.
    GradientFn gradient;
    /// Frozen regression values; empty disables regression comparison.
    std::string fixture_path;
    /// Record missing fixtures into fixture_path instead of failing.
    bool freeze = false;
};

struct BatteryResult {
    std::vector<VerifyRow> rows;
    /// Extra tables (Mach-vs-theta trend, max-norm residual orders).
    std::vector<std::string> tables;
    nlohmann::json regression = nlohmann::json::object();
    bool fixtures_written = false;

    bool all_pass() const;
};

/// Runs the battery. Failures are rows, never exceptions (a throwing case
/// becomes a failed row with observed = NaN).
BatteryResult verify_battery(const BatteryOptions& options);

std::string format_row(const VerifyRow& row);
std::string battery_header();

/// Observed order log2(e_coarse / e_fine) for grids with halved spacing.
double observed_order(double e_coarse, double e_fine);

}  // namespace nozzle
