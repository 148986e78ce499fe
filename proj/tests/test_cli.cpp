#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fracspec/commands.hpp"
#include "fracspec/config.hpp"

using namespace fracspec;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::string& command, const std::string& text = "",
        const std::vector<std::pair<std::string, std::string>>& flags = {}) {
    auto cfg = parse_config(text, command, flags);
    std::ostringstream out, err;
    int code = run_command(cfg, out, err);
    return {code, out.str(), err.str()};
}

json result(const Run& r) {
    REQUIRE(r.code == exit_ok);
    return json::parse(r.out);
}

std::vector<std::string> collect_errors(const std::string& text, const std::string& command) {
    try {
        parse_config(text, command);
    } catch (const ConfigErrors& e) {
        return e.errors;
    }
    return {};
}

}  // namespace

TEST_CASE("config parsing") {
    auto cfg = parse_config("# comment\n[general]\nbc = neumann\ntol = 1e-8\n", "casimir");
    CHECK(cfg.bc() == Boundary::neumann);
    CHECK(cfg.number("tol") == 1e-8);
    CHECK(cfg.seed() == 0x5EED);
    CHECK(parse_config("seed = 0x10\n", "walk").seed() == 16);
    CHECK(parse_config("seed = 42\n", "walk").seed() == 42);
    // Section for the command applies, other sections are checked but ignored.
    auto sec = parse_config("[zeta]\ns = -1.5\n[count]\nx = 50\n", "zeta");
    CHECK(sec.number("s") == -1.5);
    CHECK_FALSE(sec.has("x"));
    // Flags override the file.
    CHECK(parse_config("tol = 1e-8\n", "zeta", {{"tol", "1e-6"}}).number("tol") == 1e-6);
    CHECK(parse_config("", "walk", {{"step_budget", "100"}}).number("step_budget") == 100);
    auto echo = parse_config("", "heat-trace").echo();
    CHECK(echo.at("t_min") == "1e-4");
    CHECK(echo.count("X") == 0);  // derived from t_min when absent
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("tol = -1\n", "zeta"), ConfigErrors);
    CHECK(collect_errors("tol = 2\n", "zeta").size() == 1);
    CHECK(collect_errors("bogus = 1\n", "zeta").size() == 1);
    CHECK(collect_errors("[nowhere]\n", "zeta").size() == 1);
    CHECK(collect_errors("tol = 1e-8\ntol = 1e-9\n", "zeta").size() == 1);
    auto many = collect_errors("tol = -1\nbogus = 2\nthreads = x\n[count]\nx = oops\n", "zeta");
    CHECK(many.size() == 4);
    CHECK(collect_errors("bc = sideways\n", "casimir").size() == 1);
    CHECK(collect_errors("seed = 0xZZ\n", "walk").size() == 1);
    CHECK(collect_errors("no equals sign\n", "zeta").size() == 1);
    CHECK_THROWS_AS(parse_config("", "not-a-command"), ConfigError);
}

TEST_CASE("dim and zeta") {
    auto d = result(run("dim"));
    CHECK(d["result"]["hausdorff_dim"].get<double>() == doctest::Approx(1.5849625007).epsilon(1e-10));
    CHECK(d["command"] == "dim");
    CHECK(d.contains("version"));
    CHECK(d["config"]["ratios"] == "0.5,0.5,0.5");

    auto z = result(run("zeta", "w = -3\ns = -0.5\n"));
    CHECK(z["result"].contains("error_bound"));
    CHECK(z["result"]["branch"] == "continuation");
    CHECK(z["result"]["error_bound"].get<double>() < 1e-10);
    auto zs = result(run("zeta", "w = -3\ns = 2\n"));
    CHECK(zs["result"]["branch"] == "series");
}

TEST_CASE("casimir") {
    auto c = result(run("casimir"));
    CHECK(c["result"]["E_cas"].get<double>() == doctest::Approx(-0.175159759336).epsilon(1e-10));
    auto p = result(run("casimir", "recipe = published\n"));
    CHECK(std::abs(p["result"]["E_cas"].get<double>() - 0.5474693544) < 5e-6);
    auto n = result(run("casimir", "bc = neumann\nrecipe = published\n"));
    CHECK(std::abs(n["result"]["E_cas"].get<double>() - 2.134394089264) < 5e-6);
}

TEST_CASE("custom system equals the built-in one") {
    std::string text =
        "system = custom\np = 0,5,1\nA = -2,-3,-5\nR = 0,1:1;0,0,0,3:1,-4,3;0,2,-5:1,-4,3\n";
    auto c = result(run("casimir", text));
    CHECK(c["result"]["E_cas"].get<double>() == doctest::Approx(-0.175159759336).epsilon(1e-9));
    auto n = result(run("count", text + "x = 5000\n"));
    auto b = result(run("count", "x = 5000\n"));
    CHECK(n["result"]["N"] == b["result"]["N"]);
    CHECK(run("casimir", text + "recipe = published\n").code == exit_usage);
    CHECK(run("casimir", "system = custom\np = 0,5,1\nA = 1\nR = 0,1:1\n").code == exit_usage);
}

TEST_CASE("reproducible output") {
    auto a = run("walk", "samples = 2000\nlevel = 2\n");
    auto b = run("walk", "samples = 2000\nlevel = 2\n");
    CHECK(a.out == b.out);
    auto t = run("walk", "samples = 2000\nlevel = 2\nthreads = 3\n");
    auto ja = json::parse(a.out), jt = json::parse(t.out);
    CHECK(ja["result"] == jt["result"]);
    auto s = run("walk", "samples = 2000\nlevel = 2\nseed = 7\n");
    CHECK(json::parse(s.out)["result"] != ja["result"]);
    CHECK(run("casimir").out == run("casimir").out);
}

TEST_CASE("exit codes") {
    CHECK(run("dim").code == exit_ok);
    // Budget shortfall
    auto b = run("walk", "samples = 100\nstep_budget = 2\n");
    CHECK(b.code == exit_accuracy);
    CHECK(b.err.find("budget") != std::string::npos);
    // Cutoff too small for the requested heat-trace accuracy
    auto h = run("heat-trace", "X = 1000\n");
    CHECK(h.code == exit_accuracy);
    // Pole and domain errors
    CHECK(run("zeta", "w = -2\ns = 0.43067655807339306\n").code == exit_usage);
    CHECK(run("julia", "a = 1\nomega = 0\n").code == exit_usage);
    CHECK(run("walk", "mode = returns\nlevel = 9\n").code == exit_accuracy);
}

TEST_CASE("files") {
    const std::string json_path = "cli_test_out.json", csv_path = "cli_test_out.csv";
    auto r = run("spectrum", "X = 500\noutput = " + json_path + "\ncsv = " + csv_path + "\n");
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("distinct eigenvalues") != std::string::npos);
    std::ifstream jf(json_path);
    auto doc = json::parse(jf);
    CHECK(doc["csv_schema"] == 1);
    CHECK(doc["result"]["total"].get<int>() > 0);
    std::ifstream cf(csv_path);
    std::string header;
    std::getline(cf, header);
    CHECK(header == "mu,multiplicity,m,w,word");
    std::remove(json_path.c_str());
    std::remove(csv_path.c_str());
}

TEST_CASE("every subcommand runs on defaults") {
    for (auto& c : subcommands()) {
        if (c == "heat-trace" || c == "walk") continue;  // covered above; defaults are slow
        auto r = run(c);
        CHECK_MESSAGE(r.code == exit_ok, c << ": " << r.err);
    }
}
