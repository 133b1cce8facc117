#include "nozzle/config.hpp"

#include "nozzle/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace nozzle {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
    const std::string t = trim(v);
    double out = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(out))
        throw ConfigError("expected a finite number, got '" + t + "'");
    return out;
}

int to_int(const std::string& v) {
    const std::string t = trim(v);
    int out = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError("expected an integer, got '" + t + "'");
    return out;
}

bool to_bool(const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("expected true or false, got '" + t + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

std::vector<Point> parse_seeds(const std::string& text) {
    std::vector<Point> out;
    for (const auto& triple : split(text, ';')) {
        if (triple.empty()) continue;
        std::istringstream in(triple);
        std::vector<double> xs;
        std::string tok;
        while (in >> tok) xs.push_back(to_double(tok));
        if (xs.size() != 3) throw ConfigError("seed needs three coordinates: '" + triple + "'");
        out.push_back({xs[0], xs[1], xs[2]});
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"gas.gamma", [](RunConfig& c, const std::string& v) { c.gas.gamma = to_double(v); }},
        {"gas.entropy_const", [](RunConfig& c, const std::string& v) { c.gas.entropy_const = to_double(v); }},
        {"gas.bernoulli_const", [](RunConfig& c, const std::string& v) { c.gas.bernoulli_const = to_double(v); }},
        {"gas.truncation_m", [](RunConfig& c, const std::string& v) { c.truncation_m = to_int(v); }},
        {"grid.L", [](RunConfig& c, const std::string& v) { c.L = to_double(v); }},
        {"grid.n", [](RunConfig& c, const std::string& v) { c.n1 = c.n2 = c.n3 = to_int(v); }},
        {"grid.n1", [](RunConfig& c, const std::string& v) { c.n1 = to_int(v); }},
        {"grid.n2", [](RunConfig& c, const std::string& v) { c.n2 = to_int(v); }},
        {"grid.n3", [](RunConfig& c, const std::string& v) { c.n3 = to_int(v); }},
        {"boundary.family",
         [](RunConfig& c, const std::string& v) {
             c.family = trim(v);
             if (c.family != "cosine") throw ConfigError("unknown boundary family '" + c.family + "'");
         }},
        {"boundary.a2", [](RunConfig& c, const std::string& v) { c.boundary.a2 = to_double(v); }},
        {"boundary.a3", [](RunConfig& c, const std::string& v) { c.boundary.a3 = to_double(v); }},
        {"boundary.eps_kappa", [](RunConfig& c, const std::string& v) { c.boundary.eps_kappa = to_double(v); }},
        {"boundary.eps_b", [](RunConfig& c, const std::string& v) { c.boundary.eps_B = to_double(v); }},
        {"boundary.theta_bar", [](RunConfig& c, const std::string& v) { c.boundary.theta_bar = to_double(v); }},
        {"boundary.tol_compat", [](RunConfig& c, const std::string& v) { c.tol_compat = to_double(v); }},
        {"solver.linear_tol", [](RunConfig& c, const std::string& v) { c.linear_tol = to_double(v); }},
        {"solver.linear_max_iter", [](RunConfig& c, const std::string& v) { c.linear_max_iter = to_int(v); }},
        {"solver.picard_tol", [](RunConfig& c, const std::string& v) { c.picard_tol = to_double(v); }},
        {"solver.picard_relax", [](RunConfig& c, const std::string& v) { c.picard_relax = to_double(v); }},
        {"solver.picard_max_iter", [](RunConfig& c, const std::string& v) { c.picard_max_iter = to_int(v); }},
        {"solver.rk_tol", [](RunConfig& c, const std::string& v) { c.rk_tol = to_double(v); }},
        {"potential.theta", [](RunConfig& c, const std::string& v) { c.theta = to_double(v); }},
        {"critical.m_list", [](RunConfig& c, const std::string& v) { c.m_list = parse_m_list(v); }},
        {"critical.bis_tol", [](RunConfig& c, const std::string& v) { c.bis_tol = to_double(v); }},
        {"critical.theta_start", [](RunConfig& c, const std::string& v) { c.theta_start = to_double(v); }},
        {"critical.theta_max", [](RunConfig& c, const std::string& v) { c.theta_max = to_double(v); }},
        {"critical.theta_list", [](RunConfig& c, const std::string& v) { c.theta_list = parse_ascending_list(v); }},
        {"euler.sigma_fraction", [](RunConfig& c, const std::string& v) { c.sigma_fraction = to_double(v); }},
        {"euler.fp_tol", [](RunConfig& c, const std::string& v) { c.fp_tol = to_double(v); }},
        {"euler.max_outer", [](RunConfig& c, const std::string& v) { c.max_outer = to_int(v); }},
        {"euler.underrelax", [](RunConfig& c, const std::string& v) { c.underrelax = to_double(v); }},
        {"euler.divcurl_tol", [](RunConfig& c, const std::string& v) { c.divcurl_tol = to_double(v); }},
        {"euler.divcurl_relax", [](RunConfig& c, const std::string& v) { c.divcurl_relax = to_double(v); }},
        {"euler.divcurl_max_iter", [](RunConfig& c, const std::string& v) { c.divcurl_max_iter = to_int(v); }},
        {"streamline.seeds", [](RunConfig& c, const std::string& v) { c.seeds = parse_seeds(v); }},
        {"streamline.theta", [](RunConfig& c, const std::string& v) { c.streamline_theta = to_double(v); }},
        {"verify.level",
         [](RunConfig& c, const std::string& v) {
             c.level = trim(v);
             if (c.level != "quick" && c.level != "full")
                 throw ConfigError("verify level must be quick or full, got '" + c.level + "'");
         }},
        {"output.dir", [](RunConfig& c, const std::string& v) { c.out_dir = trim(v); }},
        {"output.fields", [](RunConfig& c, const std::string& v) { c.write_fields = to_bool(v); }},
    };
    return table;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

std::vector<double> parse_ascending_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        const double v = to_double(item);
        if (!out.empty() && v == out.back()) throw ConfigError("duplicate list entry " + item);
        if (!out.empty() && v < out.back()) throw ConfigError("list must be ascending at " + item);
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

std::vector<int> parse_m_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& item : split(text, ',')) {
        const int v = to_int(item);
        if (!out.empty() && v <= out.back()) throw ConfigError("m list must be strictly ascending at " + item);
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty m list");
    return out;
}

BoundaryData RunConfig::boundary_data() const {
    return boundary_family(grid(), boundary, gas.bernoulli_const);
}

PicardOptions RunConfig::picard() const {
    return PicardOptions{picard_tol, picard_relax, picard_max_iter, SolverOptions{linear_tol, linear_max_iter}};
}

CriticalOptions RunConfig::critical() const { return CriticalOptions{bis_tol, theta_start, theta_max, picard()}; }

EulerConfig RunConfig::euler() const {
    EulerConfig e;
    e.sigma_fraction = sigma_fraction;
    e.fp_tol = fp_tol;
    e.max_outer = max_outer;
    e.underrelax = underrelax;
    e.trace = trace();
    e.divcurl.tol = divcurl_tol;
    e.divcurl.relax = divcurl_relax;
    e.divcurl.max_iter = divcurl_max_iter;
    return e;
}

void RunConfig::validate() const {
    try {
        gas.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("gas: ") + e.what());
    }
    require(truncation_m == 0 || truncation_m >= 2, "truncation_m must be 0 (untruncated) or >= 2");
    require(L > 0.0, "grid L must be positive");
    require(n1 >= 3 && n2 >= 3 && n3 >= 3, "grid node counts must be >= 3");
    require(linear_tol > 0.0 && picard_tol > 0.0 && rk_tol > 0.0, "tolerances must be positive");
    require(picard_relax > 0.0 && picard_relax <= 1.0, "picard_relax must lie in (0, 1]");
    require(linear_max_iter >= 0 && picard_max_iter > 0, "iteration caps must be positive");
    require(theta > 0.0, "potential theta must be positive");
    require(streamline_theta > 0.0, "streamline theta must be positive");
    for (int m : m_list) require(m >= 2, "every m in m_list must be >= 2");
    require(bis_tol > 0.0, "bis_tol must be positive");
    require(theta_start > 0.0 && theta_max > theta_start, "need 0 < theta_start < theta_max");
    for (double t : theta_list) require(t > 0.0, "theta_list entries must be positive");
    require(sigma_fraction > 0.0 && sigma_fraction <= 1.0, "sigma_fraction must lie in (0, 1]");
    require(fp_tol > 0.0 && max_outer > 0, "fp_tol and max_outer must be positive");
    require(underrelax > 0.0 && underrelax <= 1.0, "underrelax must lie in (0, 1]");
    require(divcurl_tol > 0.0 && divcurl_max_iter > 0, "divcurl_tol and divcurl_max_iter must be positive");
    require(divcurl_relax > 0.0 && divcurl_relax <= 1.0, "divcurl_relax must lie in (0, 1]");
    for (const auto& p : seeds)
        require(p.x1 >= 0.0 && p.x1 <= L && p.x2 >= 0.0 && p.x2 <= 1.0 && p.x3 >= 0.0 && p.x3 <= 1.0,
                "streamline seed outside the domain");
    require(!out_dir.empty(), "output dir must not be empty");
    try {
        boundary_data().validate(tol_compat);
    } catch (const Error& e) {
        throw ConfigError(std::string("boundary: ") + e.what());
    }
}

void set_config_value(RunConfig& c, const std::string& dotted_key, const std::string& value) {
    const auto it = setters().find(trim(dotted_key));
    if (it == setters().end()) throw ConfigError("unknown key '" + dotted_key + "'");
    it->second(c, value);
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::string section;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("unterminated section header", line);
            section = trim(s.substr(1, s.size() - 2));
            static const std::set<std::string> sections{"gas",      "grid",   "boundary",   "solver", "potential",
                                                        "critical", "euler", "streamline", "verify", "output"};
            if (!sections.count(section)) throw ConfigError("unknown section [" + section + "]", line);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (section.empty()) throw ConfigError("key '" + key + "' outside any section", line);
        const std::string full = section + "." + key;
        const auto it = setters().find(full);
        if (it == setters().end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
        if (!seen.insert(full).second) throw ConfigError("duplicate key '" + key + "'", line);
        try {
            it->second(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(e.what()) + " (key " + full + ")", line);
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string echo_config(const RunConfig& c) {
    std::ostringstream o;
    o << std::setprecision(17);
    auto list = [](const auto& xs) {
        std::ostringstream s;
        s << std::setprecision(17);
        for (std::size_t i = 0; i < xs.size(); ++i) s << (i ? "," : "") << xs[i];
        return s.str();
    };
    o << "[gas]\ngamma = " << c.gas.gamma << "\nentropy_const = " << c.gas.entropy_const
      << "\nbernoulli_const = " << c.gas.bernoulli_const << "\ntruncation_m = " << c.truncation_m << "\n";
    o << "[grid]\nL = " << c.L << "\nn1 = " << c.n1 << "\nn2 = " << c.n2 << "\nn3 = " << c.n3 << "\n";
    o << "[boundary]\nfamily = " << c.family << "\na2 = " << c.boundary.a2 << "\na3 = " << c.boundary.a3
      << "\neps_kappa = " << c.boundary.eps_kappa << "\neps_b = " << c.boundary.eps_B
      << "\ntheta_bar = " << c.boundary.theta_bar << "\ntol_compat = " << c.tol_compat << "\n";
    o << "[solver]\nlinear_tol = " << c.linear_tol << "\nlinear_max_iter = " << c.linear_max_iter
      << "\npicard_tol = " << c.picard_tol << "\npicard_relax = " << c.picard_relax
      << "\npicard_max_iter = " << c.picard_max_iter << "\nrk_tol = " << c.rk_tol << "\n";
    o << "[potential]\ntheta = " << c.theta << "\n";
    o << "[critical]\nm_list = " << list(c.m_list) << "\nbis_tol = " << c.bis_tol
      << "\ntheta_start = " << c.theta_start << "\ntheta_max = " << c.theta_max << "\n";
    if (!c.theta_list.empty()) o << "theta_list = " << list(c.theta_list) << "\n";
    o << "[euler]\nsigma_fraction = " << c.sigma_fraction << "\nfp_tol = " << c.fp_tol
      << "\nmax_outer = " << c.max_outer << "\nunderrelax = " << c.underrelax << "\ndivcurl_tol = " << c.divcurl_tol
      << "\ndivcurl_relax = " << c.divcurl_relax << "\ndivcurl_max_iter = " << c.divcurl_max_iter << "\n";
    o << "[streamline]\ntheta = " << c.streamline_theta << "\n";
    if (!c.seeds.empty()) {
        o << "seeds = ";
        for (std::size_t i = 0; i < c.seeds.size(); ++i)
            o << (i ? "; " : "") << c.seeds[i].x1 << " " << c.seeds[i].x2 << " " << c.seeds[i].x3;
        o << "\n";
    }
    o << "[verify]\nlevel = " << c.level << "\n";
    o << "[output]\ndir = " << c.out_dir << "\nfields = " << (c.write_fields ? "true" : "false") << "\n";
    return o.str();
}

}  // namespace nozzle
