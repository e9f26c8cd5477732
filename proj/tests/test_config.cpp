#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include "wlab/commands.hpp"
#include "wlab/config.hpp"

using namespace wlab;
namespace fs = std::filesystem;

namespace {

const char* degenerate_yaml = R"(system:
  cells: 3
  lambda: 0.6
  g: piecewise-linear
  g_slopes: [0, 0, 0]
  g_intercepts: [1, 1, 1]
compute:
  scan_xi: 8
  scan_x: 16
)";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("wlab_test_config_" + name);
    fs::remove_all(p);
    return p;
}

Json read_json(const fs::path& p) {
    std::ifstream in(p);
    return Json::parse(in);
}

}  // namespace

TEST_CASE("defaults") {
    const RunConfig c = parse_config("");
    CHECK(c.system == SystemSpec::equal(3).tau_power(0.2).cosine());
    CHECK(c.measure.kind == MeasureKind::equilibrium);
    CHECK(c.compute.seed == 42);
    CHECK(c.compute.tol == 1e-9);
    CHECK(c.compute.graph_points == 4000000);
    CHECK(c.compute.scale_min == 4);
    CHECK(c.compute.scale_max == 14);
    CHECK(c.output.dir == "out");
    RunConfig expected;
    expected.system = SystemSpec::equal(3).tau_power(0.2).cosine();
    CHECK(c == expected);
}

TEST_CASE("echo round-trips") {
    const std::string text = R"(system:
  breakpoints: [0, 0.2, 0.55, 1]
  lambda: [0.5, 0.6, 0.7]
  g: piecewise-linear
  g_slopes: [1.5, -2, 0.25]
  g_intercepts: [0.1, 1, -0.3]
measure:
  kind: bernoulli
  p: [0.5, 0.3, 0.2]
compute:
  seed: 7
  scales: [3, 11]
  theta_x: 0.1
  sweep:
    gamma0: 0.4
    t: [0.5, 0.6]
output:
  dir: elsewhere
  csv: false
)";
    const RunConfig c = parse_config(text);
    CHECK(c.measure.p == std::vector<double>{0.5, 0.3, 0.2});
    CHECK(c.compute.scale_min == 3);
    CHECK(c.compute.sweep.family.gamma0 == 0.4);
    CHECK_FALSE(c.output.csv);
    CHECK(parse_config(echo_config(c)) == c);
    CHECK(echo_config(parse_config(echo_config(c))) == echo_config(c));
    CHECK(parse_config(echo_config(parse_config(""))) == parse_config(""));
}

TEST_CASE("invalid documents") {
    CHECK_THROWS_AS(parse_config("system:\n  cells: 3\n  lambda: 0.3\n"), InvalidSystem);
    try {
        parse_config("compute:\n  seed: 1\n  sead: 2\n");
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("sead") != std::string::npos);
        CHECK(what.find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("measure:\n  kind: bernoulli\n  p: [0.5, 0.6, 0.2]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("measure:\n  kind: bernoulli\n  p: [0.5, 0.5]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("compute:\n  scales: [9, 4]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("compute: [1, 2\n"), ConfigError);
}

TEST_CASE("measure resolution and sweep values") {
    const RunConfig c = parse_config("");
    const System sys(c.system);
    const BernoulliMeasure m = resolve_measure(c, sys);
    for (double p : m.p()) CHECK(p == doctest::Approx(1.0 / 3));
    SweepSection s;
    s.t_count = 4;
    const auto ts = sweep_values(s);
    REQUIRE(ts.size() == 4);
    CHECK(ts.back() == doctest::Approx(sweep_t_max(s.family)));
    CHECK(ts.front() > sweep_t_min(s.family));
    s.t = {0.6};
    CHECK(sweep_values(s) == std::vector<double>{0.6});
}

TEST_CASE("command exit codes and artifacts") {
    RunConfig c = parse_config("");
    const fs::path dir = scratch("bowen");
    const CommandResult r = run_command("bowen", c, dir);
    CHECK(r.exit_code == exit_ok);
    CHECK(r.summary["kind"] == "bowen");
    for (const char* f : {"bowen.json", "config.yaml", "schema.json"}) CHECK(fs::exists(dir / f));
    const Json j = read_json(dir / "bowen.json");
    CHECK(j == r.summary);
    CHECK(std::regex_match(j["provenance"]["config_hash"].get<std::string>(), std::regex("[0-9a-f]{16}")));
    CHECK(parse_config(std::string(std::istreambuf_iterator<char>(std::ifstream(dir / "config.yaml").rdbuf()), {})) == c);

    // the hash ignores where the output goes and how many workers run
    RunConfig moved = c;
    moved.output.dir = "somewhere/else";
    CHECK(document_header("bowen", &moved)["provenance"]["config_hash"] == j["provenance"]["config_hash"]);
    moved.compute.threads = 3;
    CHECK(document_header("bowen", &moved)["provenance"]["config_hash"] == j["provenance"]["config_hash"]);
    moved.compute.seed = 43;
    CHECK(document_header("bowen", &moved)["provenance"]["config_hash"] != j["provenance"]["config_hash"]);

    CHECK(run_command("no-such-command", c, dir).exit_code == exit_invalid);

    const CommandResult t = run_command("tsujii", parse_config(degenerate_yaml), scratch("tsujii"));
    CHECK(t.exit_code == exit_numerical);
    CHECK(t.summary["kind"] == "error");

    c.compute.sweep.t = {0.1};
    CHECK(run_command("sweep", c, scratch("sweep")).exit_code == exit_invalid);
    fs::remove_all(dir);
}

TEST_CASE("certification verdict") {
    const Verdict b = certification_verdict(System(SystemSpec::equal(3).tau_power(0.2).cosine()));
    CHECK(b.certified);
    CHECK(b.by == "example2-conditions");
    CHECK(b.claimed_dim == doctest::Approx(1.8));

    const Verdict h = certification_verdict(System(SystemSpec::equal(3).tau_power(0.5).cosine()));
    CHECK_FALSE(h.certified);
    CHECK(h.by.empty());

    const Verdict d = certification_verdict(System(parse_config(degenerate_yaml).system));
    CHECK_FALSE(d.certified);

    // the verdict is the disjunction of the two analytic checks
    for (double theta : {0.05, 0.15, 0.3, 0.45}) {
        const System s(SystemSpec::with_breakpoints({0.0, 0.3, 0.62, 1.0}).tau_power(theta).cosine());
        const bool expected = thm_example2_check(s).certified || cosine_lemma_check(s).holds;
        CHECK(certification_verdict(s).certified == expected);
    }
}

TEST_CASE("schema covers every summary kind") {
    const Json s = output_schema();
    CHECK(s["$schema"] == "http://json-schema.org/draft-07/schema#");
    for (const auto& name : command_names()) {
        bool found = false;
        for (const auto& rule : s["allOf"])
            if (rule["if"]["properties"]["kind"]["const"] == name) found = true;
        CHECK_MESSAGE(found, name);
    }
}
