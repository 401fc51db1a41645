#include <catch_amalgamated.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bootlab/harness.hpp"

using namespace bootlab;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

nlohmann::json minimal() {
    return {{"name", "t"},
            {"distribution", {{"kind", "StdNormal"}}},
            {"statistic", {{"kind", "ScaledMeanPower"}, {"params", {{"p", 1}}}}},
            {"n_grid", {20}},
            {"B", 100},
            {"outer_reps", 1},
            {"law_reps", 0}};
}

struct Cmd {
    int status;
    std::string out;
};

Cmd shell(const std::string& args) {
    const std::string cmd = std::string(BOOTLAB_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), int(buf.size()), p)) out += buf.data();
    const int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("bootlab_unit_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("config parsing rejects unknown keys and bad values", "[config]") {
    CHECK_NOTHROW(scenario_from_json(minimal()));
    auto j = minimal();
    j["Bee"] = 10;
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
    j = minimal();
    j["method"] = {{"kind", "plain"}, {"alpah", 0.1}};
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
    j = minimal();
    j["B"] = 50;
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
    j = minimal();
    j["estimand"] = "sample";
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
    j = minimal();
    j["statistic"]["kind"] = "Median";
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
    j = minimal();
    j.erase("n_grid");
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
}

TEST_CASE("config json round-trip", "[config]") {
    for (const auto& name : builtin_names()) {
        const ScenarioConfig c = builtin_scenario(name, "desk");
        const ScenarioConfig d = scenario_from_json(to_json(c));
        CHECK(to_json(d) == to_json(c));
    }
}

TEST_CASE("toml config loading", "[config]") {
    const fs::path dir = scratch("toml");
    const fs::path ok = dir / "ok.toml";
    std::ofstream(ok) << "name = \"tiny\"\nn_grid = [30]\nB = 200\nouter_reps = 2\nlaw_reps = 0\n"
                         "[distribution]\nkind = \"UniformUnit\"\n"
                         "[statistic]\nkind = \"ScaledMeanPower\"\nparams = { p = 1 }\n"
                         "[method]\nkind = \"plain\"\nalpha = 0.1\n";
    const ScenarioConfig c = load_config(ok.string());
    CHECK(c.name == "tiny");
    CHECK(c.B == 200);
    CHECK(c.method.alpha == 0.1);
    CHECK(c.distribution.kind == DistributionSpec::Kind::UniformUnit);

    try {
        load_config((dir / "missing.toml").string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("config file not found") != std::string::npos);
    }
    const fs::path bad = dir / "bad.toml";
    std::ofstream(bad) << "name = \n";
    CHECK_THROWS_AS(load_config(bad.string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("a single outer replication gives one coverage indicator", "[harness]") {
    const ScenarioReport r = run(scenario_from_json(minimal()));
    REQUIRE(r.rows.size() == 1);
    REQUIRE(r.rows[0].covered.has_value());
    const double cov = *r.rows[0].covered;
    CHECK((cov == 0.0 || cov == 1.0));
    CHECK(r.get(20, "coverage") == cov);
    CHECK_THROWS(r.get(21, "coverage"));
}

TEST_CASE("csv report layout", "[harness]") {
    const ScenarioReport r = run(scenario_from_json(minimal()));
    const std::string csv = report_csv(r);
    CHECK(csv.rfind("schema_version,scenario,kind,n,rep,method,", 0) == 0);
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    CHECK(lines == 2);
    const auto s = report_summary(r);
    CHECK(s.at("schema_version") == kSchemaVersion);
    CHECK(s.at("scenario") == "t");
    CHECK(s.at("per_n").size() == 1);
}

TEST_CASE("results do not depend on the thread count", "[harness]") {
    for (const auto& name : {"ex41_power", "prop71_kernel", "prop83_double"}) {
        ScenarioConfig c = builtin_scenario(name, "smoke");
        c.threads = 1;
        const std::string a = report_csv(run(c));
        c.threads = 3;
        CHECK(report_csv(run(c)) == a);
    }
}

TEST_CASE("every built-in scenario runs at smoke scale", "[harness]") {
    const auto names = builtin_names();
    CHECK(names.size() == 16);
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& name : names) {
        ScenarioConfig c = builtin_scenario(name, "smoke");
        c.threads = 2;
        const ScenarioReport r = run(c);
        CHECK_FALSE(r.rows.empty());
        CHECK_FALSE(r.per_n.empty());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 300.0);
    CHECK_THROWS_AS(builtin_scenario("no_such_scenario"), ConfigError);
}

TEST_CASE("double bootstrap with tiny B is well formed", "[harness]") {
    ScenarioConfig c = builtin_scenario("prop83_double", "smoke");
    c.B = 2;
    c.outer_reps = 2;
    c.n_grid = {20};
    const ScenarioReport r = run(c);
    REQUIRE_FALSE(r.rows.empty());
    for (const auto& row : r.rows) CHECK(row.n == 20);
}

TEST_CASE("double bootstrap with one base estimator matches the single bootstrap", "[harness]") {
    // A single base prediction makes the weights trivial, so both laws coincide in distribution.
    ScenarioConfig c = builtin_scenario("prop83_double", "smoke");
    c.statistic.base_predictions = {0.5};
    c.B = 2000;
    c.outer_reps = 3;
    c.n_grid = {200};
    CHECK(run(c).get(200, "ks_single") <= 0.05);
}

TEST_CASE("isolation probability oracle matches the uniform closed form", "[harness]") {
    DistributionSpec u;
    u.kind = DistributionSpec::Kind::UniformUnit;
    for (double n : {20.0, 200.0}) {
        const double a = std::pow(1.0 - 2.0 / n, n), b = std::pow(1.0 - 1.0 / n, n);
        const double exact = a + 2.0 * (b - a) / n;
        const double mc = isolation_probability_mc(u, std::size_t(n), 200000, {8, std::uint64_t(n)});
        CHECK(mc == Approx(exact).margin(0.004));
    }
    const double p20 = isolation_probability_mc(u, 20, 200000, {8, 1});
    CHECK(std::fabs(p20 - std::exp(-1.0)) > 0.2);
}

TEST_CASE("cli subcommands and exit codes", "[cli]") {
    const fs::path dir = scratch("cli");
    const Cmd list = shell("list-scenarios");
    CHECK(list.status == 0);
    CHECK(list.out.find("prop83_double") != std::string::npos);

    const std::string rep = "reproduce ex41_power --seed 3 --threads 2 --out ";
    REQUIRE(shell(rep + (dir / "a").string()).status == 0);
    REQUIRE(shell(rep + (dir / "b").string()).status == 0);
    const std::string a = slurp(dir / "a" / "ex41_power.csv");
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / "b" / "ex41_power.csv"));
    CHECK(fs::exists(dir / "a" / "ex41_power.summary.json"));

    const Cmd missing = shell("run --config " + (dir / "missing.toml").string());
    CHECK(missing.status == 1);
    CHECK(missing.out.find("config file not found") != std::string::npos);
    CHECK(shell("list-scenarios --bogus").status == 1);
    CHECK(shell("selftest").status == 0);
    fs::remove_all(dir);
}
