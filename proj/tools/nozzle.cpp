// nozzle: potential | critical-theta | euler | streamline | verify

#include "nozzle/config.hpp"
#include "nozzle/errors.hpp"
#include "nozzle/euler.hpp"
#include "nozzle/io.hpp"
#include "nozzle/parallel.hpp"
#include "nozzle/potential.hpp"
#include "nozzle/streamline.hpp"
#include "nozzle/verify.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace nozzle;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kSolver = 3, kVerify = 4 };

struct Common {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "Config file ([section] key = value)")->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out_dir, "Output directory (overrides [output] dir)");
    cmd->add_option("--set", c.sets, "Override, e.g. --set grid.n=9 (repeatable)");
}

RunConfig load(const Common& c, const std::vector<std::pair<std::string, std::string>>& flags) {
    RunConfig cfg = c.config_path.empty() ? parse_config("") : load_config(c.config_path);
    for (const auto& s : c.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
        set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [k, v] : flags) set_config_value(cfg, k, v);
    if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

void finish(RunReport& report, const RunConfig& cfg, const std::string& name) {
    const auto path = out_path(cfg, name);
    report.data()["worker_count"] = worker_count();
    report.write(path);
    std::cout << "report: " << path << '\n';
}

int cmd_potential(const RunConfig& cfg) {
    RunReport report("potential", cfg);
    const GasModel& gas = cfg.gas;
    Stopwatch sw;
    const auto data = cfg.boundary_data();
    std::optional<PotentialSolution> sol;
    try {
        sol = solve_potential(gas, data, cfg.theta, cfg.truncation_m, cfg.picard());
    } catch (const ConvergenceError& e) {
        report.data()["error"] = e.what();
        report.data()["history"] = e.history();
        report.summary("converged", "false");
        finish(report, cfg, "potential_report.json");
        std::cerr << "potential: " << e.what() << '\n';
        return kSolver;
    }
    report.timing("solve", sw.seconds());
    const auto pos = check_positivity_u1(sol->u);
    const auto fluxes = cross_section_fluxes(sol->phi, sol->rho);
    const double target = -cfg.theta * plane_integral(data.grid, data.f_minus);
    double flux_dev = 0.0;
    for (double f : fluxes) flux_dev = std::max(flux_dev, std::abs(f - target));

    report.summary("converged", "true");
    report.summary("theta", sol->theta);
    report.summary("m", sol->m);
    report.summary("picard_iterations", sol->picard_iters);
    report.summary("max_mach", max_mach(gas, *sol));
    report.summary("max_speed_sq", sol->max_speed_sq);
    report.summary("min_u1", pos.min_u1);
    report.summary("mass_flux_target", target);
    report.summary("mass_flux_max_deviation", flux_dev);
    report.data()["history"] = sol->history;
    report.data()["min_u1_location"] = {pos.location.x1, pos.location.x2, pos.location.x3};
    report.data()["cross_section_fluxes"] = fluxes;

    if (cfg.write_fields) {
        ScalarField mach(sol->u.grid);
        for (std::size_t n = 0; n < mach.size(); ++n) {
            const auto u = sol->u.at(n);
            mach.values[n] = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]) / gas.sound_speed(sol->rho.values[n]);
        }
        const auto path = out_path(cfg, "potential_fields.csv");
        write_fields_csv(path, {{"phi", &sol->phi}, {"u1", &sol->u[0]}, {"u2", &sol->u[1]}, {"u3", &sol->u[2]},
                                {"rho", &sol->rho}, {"mach", &mach}});
        report.add_output(path);
    }
    report.timing("total", sw.seconds());
    finish(report, cfg, "potential_report.json");
    return kOk;
}

int cmd_critical(const RunConfig& cfg) {
    RunReport report("critical-theta", cfg);
    Stopwatch sw;
    const auto data = cfg.boundary_data();
    const auto csv_path = out_path(cfg, "critical_mach_trace.csv");
    std::ofstream csv(csv_path, std::ios::binary);
    csv << "m,theta,max_mach,max_speed_sq,converged\n";
    report.line("      m     theta*       bracket lo   bracket hi   open");
    nlohmann::json results = nlohmann::json::array();
    for (int m : cfg.m_list) {
        Stopwatch one;
        const auto res = find_critical_theta(cfg.gas, data, m, cfg.critical());
        report.timing("m=" + std::to_string(m), one.seconds());
        report.line(fmt("%7.0f %12.6f %12.6f %12.6f", m, res.theta_star, res.bracket.first, res.bracket.second) +
                    (res.open ? "   yes" : "   no"));
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& s : res.mach_trace) {
            csv << m << ',' << format_double(s.theta) << ',' << format_double(s.mach_max) << ','
                << format_double(s.max_speed_sq) << ',' << (s.converged ? 1 : 0) << '\n';
            trace.push_back({{"theta", s.theta}, {"max_mach", s.mach_max}, {"max_speed_sq", s.max_speed_sq},
                             {"converged", s.converged}});
        }
        results.push_back({{"m", m}, {"theta_star", res.theta_star}, {"bracket", {res.bracket.first, res.bracket.second}},
                           {"open", res.open}, {"mach_trace", trace}});
    }
    csv.close();
    report.data()["critical"] = results;
    report.add_output(csv_path);

    if (!cfg.theta_list.empty()) {
        report.line("  theta sweep (m = " + std::to_string(cfg.truncation_m) + ")");
        report.line("      theta     max Mach   converged");
        nlohmann::json sweep = nlohmann::json::array();
        for (double t : cfg.theta_list) {
            double mach = std::nan("");
            bool ok = true;
            try {
                mach = max_mach(cfg.gas, solve_potential(cfg.gas, data, t, cfg.truncation_m, cfg.picard()));
            } catch (const ConvergenceError&) {
                ok = false;
            }
            report.line(fmt("%11.6f %12.6f", t, mach) + (ok ? "   yes" : "   no"));
            sweep.push_back({{"theta", t}, {"max_mach", ok ? nlohmann::json(mach) : nlohmann::json()}, {"converged", ok}});
        }
        report.data()["theta_sweep"] = sweep;
    }
    report.timing("total", sw.seconds());
    finish(report, cfg, "critical_report.json");
    return kOk;
}

int cmd_euler(const RunConfig& cfg) {
    RunReport report("euler", cfg);
    Stopwatch sw;
    const auto data = cfg.boundary_data();
    const auto sol = run_euler(data, cfg.gas, cfg.euler());
    report.timing("run", sw.seconds());

    report.line("   iter     ||u^n - u^(n-1)||   relax");
    for (std::size_t n = 0; n < sol.history.size(); ++n)
        report.line(fmt("%7.0f %21.6e %8.4f", static_cast<double>(n + 1), sol.history[n], sol.relax[n]));
    report.data()["history"] = sol.history;
    report.data()["relax"] = sol.relax;
    report.summary("converged", sol.converged ? "true" : "false");
    report.summary("iterations", sol.iterations);
    report.summary("sigma0", sol.sigma0);
    report.summary("min_u1", check_positivity_u1(sol.u).min_u1);
    report.summary("div_omega_max", sol.vorticity.div_max);

    Stopwatch rw;
    const auto res = verify_euler_residuals(sol, data);
    report.timing("residuals", rw.seconds());
    const auto names = EulerResiduals::names();
    report.line("   residual                  max norm      rms norm");
    nlohmann::json table = nlohmann::json::object();
    for (int c = 0; c < EulerResiduals::kCount; ++c) {
        report.line(std::string("   ") + names[c] + std::string(24 - std::string(names[c]).size(), ' ') +
                    fmt("%12.4e  %12.4e", res.max[c], res.rms[c]));
        table[names[c]] = {{"max", res.max[c]}, {"rms", res.rms[c]}};
    }
    report.data()["residuals"] = table;

    if (cfg.write_fields) {
        const auto path = out_path(cfg, "euler_fields.csv");
        write_fields_csv(path, {{"u1", &sol.u[0]},
                                {"u2", &sol.u[1]},
                                {"u3", &sol.u[2]},
                                {"rho", &sol.rho},
                                {"B", &sol.B},
                                {"omega1", &sol.omega[0]},
                                {"omega2", &sol.omega[1]},
                                {"omega3", &sol.omega[2]},
                                {"W1", &sol.W[0]},
                                {"W2", &sol.W[1]},
                                {"W3", &sol.W[2]},
                                {"phi", &sol.phi}});
        report.add_output(path);
    }
    report.timing("total", sw.seconds());
    finish(report, cfg, "euler_report.json");
    return sol.converged ? kOk : kSolver;
}

int cmd_streamline(const RunConfig& cfg) {
    RunReport report("streamline", cfg);
    Stopwatch sw;
    const auto data = cfg.boundary_data();
    const auto flow = solve_potential(cfg.gas, data, cfg.streamline_theta, cfg.truncation_m, cfg.picard());
    const auto U = extend_velocity_ratio(flow.u);
    std::vector<Point> seeds = cfg.seeds;
    if (seeds.empty()) seeds = {{cfg.L, 0.5, 0.5}, {cfg.L, 0.25, 0.5}, {cfg.L, 0.1, 0.1}};
    const auto path = out_path(cfg, "streamlines.csv");
    std::ofstream csv(path, std::ios::binary);
    csv << "seed,s,X2,X3\n";
    nlohmann::json feet = nlohmann::json::array();
    for (std::size_t n = 0; n < seeds.size(); ++n) {
        const auto tr = trace_to_inlet(U, seeds[n], cfg.trace());
        for (std::size_t k = 0; k < tr.s.size(); ++k)
            csv << n << ',' << format_double(tr.s[k]) << ',' << format_double(tr.X2[k]) << ','
                << format_double(tr.X3[k]) << '\n';
        const std::string key = "seed" + std::to_string(n);
        report.summary(key + ".gamma2", tr.gamma2);
        report.summary(key + ".gamma3", tr.gamma3);
        report.summary(key + ".richardson", tr.richardson);
        feet.push_back({{"seed", {seeds[n].x1, seeds[n].x2, seeds[n].x3}}, {"steps", tr.s.size() - 1}});
    }
    csv.close();
    report.data()["traces"] = feet;
    report.add_output(path);
    report.timing("total", sw.seconds());
    finish(report, cfg, "streamline_report.json");
    return kOk;
}

int cmd_verify(const RunConfig& cfg, const std::string& fixtures, bool freeze) {
    RunReport report("verify", cfg);
    Stopwatch sw;
    BatteryOptions opts;
    opts.level = cfg.level;
    opts.fixture_path = fixtures;
    opts.freeze = freeze;
    const auto res = verify_battery(opts);
    report.line(battery_header());
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : res.rows) {
        report.line(format_row(r));
        rows.push_back({{"module", r.module}, {"oracle", r.oracle}, {"observed", r.observed}, {"required", r.required()},
                        {"pass", r.pass}, {"seconds", r.seconds}});
    }
    for (const auto& t : res.tables) report.line(t);
    report.data()["rows"] = rows;
    report.data()["regression"] = res.regression;
    report.timing("total", sw.seconds());
    const bool ok = res.all_pass();
    report.summary("rows", static_cast<double>(res.rows.size()));
    report.summary("failed", static_cast<double>(std::count_if(res.rows.begin(), res.rows.end(),
                                                               [](const VerifyRow& r) { return !r.pass; })));
    finish(report, cfg, "verify_report.json");
    return ok ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady subsonic nozzle flow solver"};
    app.require_subcommand(1);

    Common c_pot, c_crit, c_eul, c_str, c_ver;
    std::vector<std::pair<std::string, std::string>> flags;
    auto flag = [&](CLI::App* cmd, const std::string& name, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(
            name, [&flags, key](const std::string& v) { flags.emplace_back(key, v); }, help);
    };

    auto* pot = app.add_subcommand("potential", "Truncated potential flow at one flux multiplier");
    add_common(pot, c_pot);
    flag(pot, "--theta", "potential.theta", "Flux multiplier");
    flag(pot, "--m", "gas.truncation_m", "Truncation index");

    auto* crit = app.add_subcommand("critical-theta", "Critical flux multiplier per truncation index");
    add_common(crit, c_crit);
    flag(crit, "--m-list", "critical.m_list", "Comma separated truncation indices");
    flag(crit, "--theta-list", "critical.theta_list", "Ascending flux multipliers for a Mach sweep");

    auto* eul = app.add_subcommand("euler", "Steady Euler fixed point");
    add_common(eul, c_eul);
    flag(eul, "--epsilon-kappa", "boundary.eps_kappa", "Inlet normal vorticity amplitude");
    flag(eul, "--epsilon-b", "boundary.eps_b", "Inlet Bernoulli perturbation amplitude");
    flag(eul, "--fp-tol", "euler.fp_tol", "Fixed-point tolerance");

    auto* str = app.add_subcommand("streamline", "Backward streamlines of the potential flow");
    add_common(str, c_str);
    flag(str, "--theta", "streamline.theta", "Flux multiplier of the traced flow");
    flag(str, "--seeds", "streamline.seeds", "Seeds 'x1 x2 x3; ...'");

    auto* ver = app.add_subcommand("verify", "Verification battery");
    add_common(ver, c_ver);
    flag(ver, "--level", "verify.level", "quick or full");
    std::string fixtures;
    bool freeze = false;
    ver->add_option("--fixtures", fixtures, "Frozen regression values (JSON)");
    ver->add_flag("--freeze", freeze, "Record missing regression values into --fixtures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    RunConfig cfg;
    try {
        if (*pot) cfg = load(c_pot, flags);
        if (*crit) cfg = load(c_crit, flags);
        if (*eul) cfg = load(c_eul, flags);
        if (*str) cfg = load(c_str, flags);
        if (*ver) cfg = load(c_ver, flags);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    }

    try {
        if (*pot) return cmd_potential(cfg);
        if (*crit) return cmd_critical(cfg);
        if (*eul) return cmd_euler(cfg);
        if (*str) return cmd_streamline(cfg);
        return cmd_verify(cfg, fixtures, freeze);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const InvalidDataError& e) {
        std::cerr << "invalid data: " << e.what() << '\n';
        return kConfig;
    } catch (const Error& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolver;
    }
}
