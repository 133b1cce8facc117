#include "doctest.h"

#include "nozzle/config.hpp"
#include "nozzle/errors.hpp"
#include "nozzle/io.hpp"
#include "nozzle/verify.hpp"

#include <cmath>
#include <sstream>

using namespace nozzle;

TEST_SUITE("cli_io") {

TEST_CASE("minimal config takes defaults") {
    const auto c = parse_config("");
    CHECK(c.gas.gamma == 2.0);
    CHECK(c.n1 == 17);
    CHECK(c.picard_tol == 1e-9);
    const auto d = parse_config("# comment\n[grid]\nn = 9  # trailing\n[gas]\ngamma=2\n");
    CHECK(d.n1 == 9);
    CHECK(d.n3 == 9);
}

TEST_CASE("errors carry line numbers") {
    try {
        parse_config("[gas]\ngamma = 2\n\nfoo = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 4);
        CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("[nope]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("gamma = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[gas]\ngamma\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[gas]\ngamma = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[gas]\ngamma = 2\ngamma = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nn1 = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[boundary]\na2 = 0.7\na3 = 0.4\n"), ConfigError);
}

TEST_CASE("gamma must exceed 1") { CHECK_THROWS_AS(parse_config("[gas]\ngamma = 0.9\n"), ConfigError); }

TEST_CASE("theta list parsing") {
    CHECK(parse_config("[critical]\ntheta_list = 0.1,0.5,0.9\n").theta_list == std::vector<double>{0.1, 0.5, 0.9});
    CHECK_THROWS_AS(parse_config("[critical]\ntheta_list = 0.1,0.5,0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[critical]\ntheta_list = 0.5,0.1\n"), ConfigError);
    CHECK(parse_m_list("4, 8,16") == std::vector<int>{4, 8, 16});
}

TEST_CASE("echoed config reproduces the config") {
    auto c = parse_config("[grid]\nn1 = 9\nL = 1.3\n[boundary]\na2 = 0.1\n[streamline]\nseeds = 0.5 0.5 0.5; 1 0.2 0.1\n"
                          "[critical]\ntheta_list = 0.3,0.7\n");
    const auto again = parse_config(echo_config(c));
    CHECK(echo_config(again) == echo_config(c));
    CHECK(again.L == 1.3);
    CHECK(again.seeds.size() == 2);
}

TEST_CASE("overrides") {
    auto c = parse_config("");
    set_config_value(c, "euler.fp_tol", "1e-9");
    CHECK(c.fp_tol == 1e-9);
    CHECK_THROWS_AS(set_config_value(c, "euler.nothing", "1"), ConfigError);
}

TEST_CASE("CSV layout") {
    const Grid g = Grid::make(1.0, 3, 3, 3);
    const auto f = sample(g, [](double x1, double x2, double x3) { return 100 * x1 + 10 * x2 + x3 + 0.1; });
    std::ostringstream out;
    write_fields_csv(out, {{"f", &f}});
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x1,x2,x3,f");
    std::getline(in, line);
    CHECK(line == "0,0,0,0.10000000000000001");
    std::getline(in, line);
    CHECK(line == "0,0,0.5,0.59999999999999998");
    int rows = 2;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 27);
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("FNV-1a") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(0xafULL) == "00000000000000af");
}

TEST_CASE("battery: mutated gradient stencil fails the order check") {
    BatteryOptions opts;
    opts.gradient = [](const ScalarField& phi) {
        auto g = gradient(phi);
        // Sign slip in the x2 stencil: (f[j+1] + f[j-1]) / 2h.
        const Grid& gr = phi.grid;
        for (int i = 0; i < gr.n1; ++i)
            for (int j = 0; j < gr.n2; ++j)
                for (int k = 0; k < gr.n3; ++k)
                    g[1](i, j, k) = (phi.ghost(i, j + 1, k) + phi.ghost(i, j - 1, k)) / (2 * gr.h2);
        return g;
    };
    const auto res = verify_battery(opts);
    bool found = false;
    for (const auto& r : res.rows)
        if (r.oracle.find("gradient of cos") != std::string::npos) {
            found = true;
            CHECK_FALSE(r.pass);
        }
    CHECK(found);
    // Everything else still passes.
    int failed = 0;
    for (const auto& r : res.rows) failed += !r.pass;
    CHECK(failed == 1);
}

TEST_CASE("battery rejects unknown levels") {
    BatteryOptions opts;
    opts.level = "medium";
    CHECK_THROWS_AS(verify_battery(opts), ConfigError);
}

}
