#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ttrace/indices.hpp"
#include "ttrace/json_io.hpp"

using namespace ttrace;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

// Run the installed binary with stderr folded into the captured stream.
RunResult run(const std::string& args) {
    std::string cmd = std::string(TTRACE_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("expression grammar maps onto the symbol families") {
    auto tw = parse_symbol_expression("z^2*(1+z)^1.5", 32);
    REQUIRE(tw.has_family());
    CHECK(tw.family()->variant() == "twisted_power");

    auto rat = parse_symbol_expression("(z-0.5)/(z-2)", 32);
    REQUIRE(rat.has_family());
    CHECK(rat.family()->variant() == "rational");
    CHECK(fredholm_index(rat) == -1);

    auto cs = parse_symbol_expression("coeffs{-1:1, 1:1}", 32);
    CHECK(!cs.has_family());
    CHECK(std::abs(cs.evaluate(0.0) - cd(2.0, 0.0)) < 1e-15);  // 2 cos t at t = 0

    // bare polynomial without parentheses, exact degree
    auto poly = parse_symbol_expression("1+z", 32);
    CHECK(poly.degree() == 1);
    CHECK(poly.circle_zeros().size() == 1);

    // repeated roots come back with multiplicity
    auto sq = parse_symbol_expression("1+2z+z^2", 32);
    REQUIRE(sq.has_family());
    auto zs = sq.circle_zeros();
    REQUIRE(zs.size() == 1);
    CHECK(zs[0].order == doctest::Approx(4.0));  // |f|^2 ~ |u|^4 for a double zero

    // z^{-k} prefactors keep finite support
    auto lau = parse_symbol_expression("z^-2*(2+z)", 32);
    CHECK(lau.degree() == 2);
    CHECK(fredholm_index(lau) == 2);

    CHECK_THROWS_AS(parse_symbol_expression("1+", 32), std::invalid_argument);
    CHECK_THROWS_AS(parse_symbol_expression("(1+5z)^1.5", 32), std::invalid_argument);
    CHECK_THROWS_AS(parse_symbol_expression("z/(z-1)", 32), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_symbol_expression("z^2*", 32), doctest::Contains("position 4"),
                         std::invalid_argument);
}

TEST_CASE("symbol JSON round trip") {
    for (const char* expr : {"z^2*(1+z)^1.5", "(z-0.5)/(z-2)", "coeffs{1:1+2i, -2:0.5i}", "1+z"}) {
        auto f = parse_symbol_expression(expr, 48);
        auto g = symbol_from_json(symbol_to_json(f), 48);
        for (double t : {0.1, 1.7, 3.0, 5.9})
            CHECK(std::abs(f.evaluate(t) - g.evaluate(t)) < 1e-14 * (1.0 + std::abs(f.evaluate(t))));
        CHECK(symbol_to_json(f) == symbol_to_json(g));
    }
    for (const char* fam :
         {R"({"family":{"kind":"shift_sum","n":3},"degree":16})",
          R"({"family":{"kind":"shift_plus","a":2.0},"degree":16})",
          R"({"family":{"kind":"log_power","alpha":1.0,"C":2.0,"reciprocal":false},"degree":16})"}) {
        auto f = symbol_from_json(json::parse(fam));
        auto g = symbol_from_json(symbol_to_json(f));
        CHECK(symbol_to_json(f) == symbol_to_json(g));
    }
    CHECK_THROWS_AS(symbol_from_json(json::parse(R"({"coeffs":{"0":1},"extra":2})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(symbol_from_json(json::parse(R"({"family":{"kind":"nope"}})")),
                    std::invalid_argument);
}

TEST_CASE("scalar function specs") {
    CHECK(parse_scalar_function("x")(3.0) == doctest::Approx(3.0));
    CHECK(parse_scalar_function("x^2")(3.0) == doctest::Approx(9.0));
    CHECK(parse_scalar_function("x^2").kind() == ScalarFunction::Kind::Polynomial);
    CHECK(parse_scalar_function("x^0.5").kind() == ScalarFunction::Kind::Power);
    CHECK(parse_scalar_function("power(0.5)")(4.0) == doctest::Approx(2.0));
    CHECK(parse_scalar_function("exp_heat(1)")(0.0) == doctest::Approx(1.0));
    CHECK(parse_scalar_function("resolvent(2)")(2.0) == doctest::Approx(0.5));
    CHECK(parse_scalar_function("poly{0,0,1}")(3.0) == doctest::Approx(9.0));
    CHECK_THROWS_AS(parse_scalar_function("power(-1)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scalar_function("sinh(x)"), std::invalid_argument);
}

TEST_CASE("jobspec JSON round trip is strict and lossless") {
    JobSpec job;
    job.command = "ssf";
    job.symbol = "1+z";
    job.grid = 32;
    job.route = "pushforward";
    job.format = "csv";
    job.settings.circle_nodes = 2048;
    json j = jobspec_to_json(job);
    JobSpec back = jobspec_from_json(j);
    CHECK(jobspec_to_json(back) == j);
    CHECK(back.route == "pushforward");
    CHECK(back.settings.circle_nodes == 2048);

    json bad = j;
    bad["surprise"] = 1;
    CHECK_THROWS_AS(jobspec_from_json(bad), std::invalid_argument);
    CHECK_THROWS_AS(settings_from_json(json::parse(R"({"circle_nodes":0})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(settings_from_json(json::parse(R"({"bogus":1})")), std::invalid_argument);
}

TEST_CASE("csv numbers carry 12 significant digits") {
    CHECK(csv_number(1.0) == "1");
    CHECK(csv_number(-0.5) == "-0.5");
    CHECK(csv_number(3.14159265358979) == "3.14159265359");
    CHECK(csv_number(1.23456789012345e-7) == "1.23456789012e-07");
}

TEST_CASE("witten command prints the route table and the consensus") {
    auto r = run("witten --symbol \"z^0*(1+z)^1\"");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("witten index   : -0.5") != std::string::npos);
    CHECK(r.out.find("pv_integral") != std::string::npos);
    CHECK(r.out.find("heat_limit") != std::string::npos);
    CHECK(r.out.find("closed_form") != std::string::npos);
    CHECK(r.out.find("routes agree   : yes") != std::string::npos);
}

TEST_CASE("index command and its refusal") {
    auto ok = run("index --symbol \"(z-0.5)/(z-2)\" --format csv");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out == "fredholm_index,winding\n-1,1\n");

    auto bad = run("index --symbol \"1+z\"");
    CHECK(bad.exit_code == 1);
    CHECK(bad.out.find("witten") != std::string::npos);
}

TEST_CASE("ssf csv has exactly the requested grid rows") {
    auto r = run("ssf --symbol \"1+z\" --grid 32 --format csv");
    CHECK(r.exit_code == 0);
    auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 33);  // header + 32 points
    CHECK(rows[0] == "x,xi");
    // spot-check the shift values against the closed form arccos(sqrt(x)/2)/pi
    for (size_t k = 1; k < rows.size(); ++k) {
        double x = 0, xi = 0;
        REQUIRE(std::sscanf(rows[k].c_str(), "%lf,%lf", &x, &xi) == 2);
        if (x < 3.9) CHECK(xi == doctest::Approx(std::acos(0.5 * std::sqrt(x)) / kPi).epsilon(1e-6));
    }
}

TEST_CASE("reproduce ids pass under default settings") {
    for (const char* id : {"rational", "anyv", "gamma", "elliptic_small_a", "elliptic_large_a",
                           "shift_sum_even", "shift_sum_odd", "helton_howe_monomials"}) {
        auto r = run(std::string("reproduce ") + id);
        INFO(id, " -> ", r.out);
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("verdict : PASS") != std::string::npos);
        CHECK(r.out.find("FAIL") == std::string::npos);
    }
    auto ex = run("reproduce helton_howe_monomials --m 3 --n 2 --h \"coeffs{1:1}\" --format csv");
    CHECK(ex.exit_code == 0);
    CHECK(ex.out.find("operator_trace,2,2,0,") != std::string::npos);
}

TEST_CASE("json output is byte-identical across runs and reparses") {
    auto a = run("krein-check --symbol \"1+z\" --phi \"x^2\" --size 64 --format json");
    auto b = run("krein-check --symbol \"1+z\" --phi \"x^2\" --size 64 --format json");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    json doc = json::parse(a.out);
    JobSpec echoed = jobspec_from_json(doc.at("job"));
    CHECK(echoed.command == "krein-check");
    CHECK(echoed.phi == "x^2");
    CHECK(jobspec_to_json(echoed) == doc.at("job"));
    CHECK(doc.at("result").at("agree").get<bool>() == true);
    auto routes = doc.at("result").at("routes");
    REQUIRE(routes.size() == 4);
    double v0 = routes[0].at("value").get<double>();
    for (const auto& rt : routes) CHECK(std::abs(rt.at("value").get<double>() - v0) < 2e-3);
}

TEST_CASE("output lands in --out unchanged") {
    std::string path = "cli_out_probe.csv";
    auto r = run("heat --symbol \"coeffs{0:2.2,1:0.7}\" --s 0.5,1 --size 64 --format csv --out " +
                 path);
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    auto rows = lines_of(ss.str());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "s,matrix,matrix_error,integral,integral_error");
    std::remove(path.c_str());
}

TEST_CASE("input errors exit 1") {
    CHECK(run("witten --symbol \"1+\"").exit_code == 1);
    CHECK(run("witten").exit_code == 1);                       // missing symbol
    CHECK(run("reproduce nosuch").exit_code == 1);             // unknown id
    CHECK(run("trace --symbol \"1+z\"").exit_code == 1);       // missing phi
    CHECK(run("besov --symbol \"1+z\"").exit_code == 1);       // missing p
    CHECK(run("witten --symbol \"1+z\" --config \"{\\\"nope\\\":1}\"").exit_code == 1);
    CHECK(run("ssf --symbol \"1+z\" --route sideways").exit_code == 1);
    CHECK(run("dump-matrix --symbol \"z\" --which spectral").exit_code == 1);
    CHECK(run("").exit_code == 1);                             // no subcommand
}

TEST_CASE("dump-matrix emits the exact section") {
    auto r = run("dump-matrix --symbol \"coeffs{-1:0.5, 1:1}\" --size 3 --which toeplitz "
                 "--format csv");
    CHECK(r.exit_code == 0);
    auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "0+0i,0.5+0i,0+0i");
    CHECK(rows[1] == "1+0i,0+0i,0.5+0i");
    CHECK(rows[2] == "0+0i,1+0i,0+0i");
}

TEST_CASE("config json steers the quadrature settings") {
    auto r = run("witten --symbol \"z^0*(1+z)^1\" --config "
                 "\"{\\\"circle_nodes\\\":2048,\\\"rings\\\":256,\\\"eps0_fraction\\\":0.25,"
                 "\\\"pv_levels\\\":5}\" --format json");
    CHECK(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc.at("job").at("config").at("pv_levels").get<int>() == 5);
    CHECK(doc.at("result").at("witten").get<double>() == doctest::Approx(-0.5).epsilon(1e-6));
}
