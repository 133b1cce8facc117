#pragma once

// Run configuration: UTF-8 text, `[section]` headers and `key = value` lines.
// `#` starts a comment. Unknown sections or keys are errors.
//
//   [gas]        gamma, entropy_const, bernoulli_const, truncation_m (0: untruncated)
//   [grid]       L, n (all axes), n1, n2, n3
//   [boundary]   family (cosine), a2, a3, eps_kappa, eps_b, theta_bar, tol_compat
//   [solver]     linear_tol, linear_max_iter, picard_tol, picard_relax, picard_max_iter, rk_tol
//   [potential]  theta
//   [critical]   m_list, bis_tol, theta_start, theta_max, theta_list
//   [euler]      sigma_fraction, fp_tol, max_outer, underrelax, divcurl_tol, divcurl_relax, divcurl_max_iter
//   [streamline] seeds (x1 x2 x3 triples separated by ';'), theta
//   [verify]     level (quick | full)
//   [output]     dir, fields (true | false)

#include "nozzle/boundary.hpp"
#include "nozzle/divcurl.hpp"
#include "nozzle/euler.hpp"
#include "nozzle/gas.hpp"
#include "nozzle/grid.hpp"
#include "nozzle/potential.hpp"

#include <string>
#include <vector>

namespace nozzle {

struct RunConfig {
    GasModel gas{};
    int truncation_m = 10;

    double L = 1.0;
    int n1 = 17;
    int n2 = 17;
    int n3 = 17;

    std::string family = "cosine";
    BoundaryFamilyParams boundary{};
    double tol_compat = 1e-12;

    double linear_tol = 1e-11;
    int linear_max_iter = 0;
    double picard_tol = 1e-9;
    double picard_relax = 0.7;
    int picard_max_iter = 2000;
    double rk_tol = 1e-8;

    double theta = 0.5;

    std::vector<int> m_list{4, 8, 16};
    double bis_tol = 1e-3;
    double theta_start = 0.25;
    double theta_max = 4.0;
    std::vector<double> theta_list;

    double sigma_fraction = 0.5;
    double fp_tol = 1e-8;
    int max_outer = 30;
    double underrelax = 1.0;
    double divcurl_tol = 1e-10;
    double divcurl_relax = 0.8;
    int divcurl_max_iter = 200;

    std::vector<Point> seeds;
    double streamline_theta = 0.5;

    std::string level = "quick";

    std::string out_dir = ".";
    bool write_fields = true;

    Grid grid() const { return Grid::make(L, n1, n2, n3); }
    BoundaryData boundary_data() const;
    PicardOptions picard() const;
    CriticalOptions critical() const;
    EulerConfig euler() const;
    TraceOptions trace() const { return TraceOptions{rk_tol, 100.0}; }

    /// Cross-field constraints (gas, grid, ranges). Throws ConfigError.
    void validate() const;
};

/// Parses and validates; the first problem is reported as ConfigError with its line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Applies one `section.key` assignment without validating the whole config.
/// Throws ConfigError for unknown keys or malformed values.
void set_config_value(RunConfig& c, const std::string& dotted_key, const std::string& value);

/// Canonical key = value text of a config; parse_config(echo_config(c)) reproduces c.
std::string echo_config(const RunConfig& c);

/// Comma separated lists; numbers must be strictly ascending.
std::vector<double> parse_ascending_list(const std::string& text);
std::vector<int> parse_m_list(const std::string& text);

}  // namespace nozzle
