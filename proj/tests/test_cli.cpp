#include "commands.hpp"
#include "config.hpp"
#include "table.hpp"

#include "semiclass/error.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace semiclass;
using namespace semiclass::cli;

namespace fs = std::filesystem;

namespace {

const fs::path configs = SEMICLASS_CONFIG_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "semiclass_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = scratch(name);
    std::ofstream(p) << body;
    return p;
}

int run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + SEMICLASS_CLI_PATH + " " + args + " 2>/dev/null >/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text, configs);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("parses a full configuration") {
    const RunConfig c = parse_config(R"({
        "potential": "potentials/quartic.json",
        "command": "scaling",
        "hbar": [0.1, 0.05],
        "window": [0.5, 2],
        "levels": {"nearest": 1.0},
        "format": "json",
        "oracle": false,
        "quantizer": "smooth",
        "tolerances": {"oracle": 1e-9, "scheme": "numerov", "decay": 30, "max_cells": 65536},
        "weights": ["potential", {"type": "indicator", "above": 0.2}, {"type": "monomial", "power": 2}],
        "study": "observable",
        "samples": 100
    })", configs);
    REQUIRE(c.potential);
    CHECK(c.command == Command::scaling);
    CHECK(c.hbar == std::vector<double>{0.1, 0.05});
    CHECK(c.window.lo == 0.5);
    CHECK(c.window.hi == 2.0);
    CHECK(c.levels.kind == LevelSelection::Kind::nearest);
    CHECK(c.levels.nearest == 1.0);
    CHECK(c.format == Format::json);
    CHECK_FALSE(c.oracle);
    CHECK(c.quantizer == Quantizer::smooth);
    CHECK(c.oracle_options.tol == 1e-9);
    CHECK(c.oracle_options.scheme == Scheme::numerov);
    CHECK(c.oracle_options.decay == 30.0);
    CHECK(c.oracle_options.max_cells == 65536);
    REQUIRE(c.weights.size() == 3);
    CHECK(c.weights[1].kind == WeightSpec::Kind::indicator_above);
    CHECK(c.weights[1].parameter == 0.2);
    CHECK(c.weights[2].kind == WeightSpec::Kind::monomial);
    CHECK(c.study == Study::observable);
    CHECK(c.samples == 100);
    CHECK(c.potential->value(1.0) == doctest::Approx(1.0));
}

TEST_CASE("inline potentials and boundary conditions") {
    const RunConfig c = parse_config(R"({
        "potential": {"type": "table", "domain": "half_line", "branches": [{"kind": "poly", "coeffs": [0, 0, 1]}]},
        "hbar": 0.1,
        "window": [0, 2],
        "quantizer": "halfline_robin",
        "boundary": {"robin": 5}
    })", configs);
    REQUIRE(c.potential);
    CHECK(c.potential->domain() == DomainKind::half_line);
    CHECK(c.boundary.kind == BoundaryKind::robin);
    CHECK(c.boundary.b == 5.0);
    CHECK(c.hbar == std::vector<double>{0.1});
    CHECK_FALSE(c.command);
}

TEST_CASE("configuration errors are located") {
    CHECK(config_error("{\"hbar\": [0.1,\n  }").find("line 2") != std::string::npos);
    CHECK(config_error(R"({"potential": "potentials/harmonic.json", "hbar": 0.1, "window": [0, 1], "colour": 1})")
              .find("colour") != std::string::npos);
    CHECK(config_error(R"({"potential": "potentials/harmonic.json", "hbar": -0.1, "window": [0, 1]})")
              .find("hbar") != std::string::npos);
    CHECK(config_error(R"({"potential": "potentials/harmonic.json", "hbar": 0.1, "window": [1, 0]})")
              .find("window") != std::string::npos);
    CHECK(config_error(R"({"potential": "potentials/missing.json", "hbar": 0.1, "window": [0, 1]})")
              .find("missing.json") != std::string::npos);
    CHECK_FALSE(config_error(R"({"potential": {"type": "power_law", "alpha_plus": 0}, "hbar": 0.1, "window": [0, 1]})").empty());
}

TEST_CASE("doubles round-trip through the table text") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int i = 0; i < 5000; ++i) {
        const double x = std::ldexp(mant(rng), expo(rng));
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("CSV and JSON writers") {
    Table t{{"a", "b", "c"}, {{1L, 0.5, std::string("x,y")}, {2L, std::monostate{}, std::string("z")}}};
    std::ostringstream csv;
    write_csv(t, csv);
    CHECK(csv.str() == "a,b,c\n1,0.5,\"x,y\"\n2,,z\n");

    std::ostringstream js;
    write_json(t, js);
    const auto parsed = nlohmann::json::parse(js.str());
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0]["b"] == 0.5);
    CHECK(parsed[1]["b"].is_null());
    CHECK(js.str().find("\"a\"") < js.str().find("\"b\""));
}

TEST_CASE("levels table for the harmonic well") {
    RunConfig c = load_config(configs / "levels_harmonic.json");
    const Report r = cmd_levels(c);
    REQUIRE(r.table.columns.at(5) == "oracle_error");
    REQUIRE(r.table.columns.at(6) == "delta_lambda");
    CHECK(r.table.rows.size() == 30);
    for (const auto& row : r.table.rows)
        CHECK(std::abs(std::get<double>(row[6])) <= c.oracle_options.tol);
}

TEST_CASE("quartic residuals shrink like hbar^2") {
    const Report r = cmd_scaling(load_config(configs / "scaling_levels_quartic.json"));
    REQUIRE(!r.table.rows.empty());
    CHECK(std::get<double>(r.table.rows[0][3]) >= 1.8);
}

TEST_CASE("count sweep stays within the Weyl bound") {
    const Report r = cmd_count(load_config(configs / "count_sweep.json"));
    REQUIRE(!r.table.rows.empty());
    const auto& cols = r.table.columns;
    const auto col = std::find(cols.begin(), cols.end(), "oracle_epsilon") - cols.begin();
    for (const auto& row : r.table.rows) {
        CHECK(std::abs(std::get<double>(row[5])) <= 1.0);
        CHECK(std::abs(std::get<double>(row[col])) <= 1.0);
    }
}

TEST_CASE("wavefunction export") {
    const Report r = cmd_wavefunction(load_config(configs / "wavefunction_quartic.json"));
    CHECK(r.table.columns == std::vector<std::string>{"hbar", "n", "x", "psi_semiclassical", "psi_oracle", "abs_err"});
    CHECK(r.table.rows.size() >= 100);
    REQUIRE(!r.notes.empty());
    CHECK(r.notes[0].find("sup_error") != std::string::npos);
}

TEST_CASE("observable scaling slopes") {
    const Report r = cmd_scaling(load_config(configs / "scaling_observable_quartic.json"));
    for (const auto& row : r.table.rows)
        CHECK(std::get<double>(row[3]) >= 0.25);
}

TEST_CASE("empty window") {
    RunConfig c = load_config(configs / "levels_harmonic.json");
    c.window = {0.31, 0.32};
    c.hbar = {0.1};
    const Report r = cmd_levels(c);
    CHECK(r.table.rows.empty());
    CHECK_FALSE(r.table.columns.empty());

    const fs::path p = write_config("empty.json", R"({"potential": ")" + (configs / "potentials/harmonic.json").string() +
                                                       R"(", "hbar": 0.1, "window": [0.31, 0.32]})");
    const fs::path out = scratch("empty.csv");
    CHECK(run_cli("levels --config " + p.string() + " --out " + out.string()) == 0);
    CHECK(slurp(out).find('\n') == slurp(out).size() - 1);
}

TEST_CASE("exit codes") {
    const std::string harmonic = (configs / "potentials/harmonic.json").string();
    CHECK(run_cli("levels --config " + (configs / "levels_harmonic.json").string() + " --out " + scratch("ok.csv").string()) == 0);
    CHECK(run_cli("levels --config /nonexistent.json") == 2);
    CHECK(run_cli("frobnicate --config " + (configs / "levels_harmonic.json").string()) == 2);
    CHECK(run_cli("count --config " + (configs / "levels_harmonic.json").string()) == 2);
    CHECK(run_cli("levels --config " + write_config("bad.json", "{\"hbar\": ").string()) == 2);

    const fs::path well = write_config("double_well.json", R"({
        "potential": {"type": "table", "branches": [{"kind": "poly", "coeffs": [0, 0, -1, 0, 1]}]},
        "hbar": 0.05, "window": [-0.2, -0.1]})");
    CHECK(run_cli("levels --config " + well.string()) == 3);

    const fs::path smooth_step = write_config("smooth_step.json", R"({
        "potential": ")" + (configs / "potentials/step_harmonic.json").string() + R"(",
        "hbar": 0.05, "window": [0.6, 2], "quantizer": "smooth"})");
    CHECK(run_cli("levels --config " + smooth_step.string()) == 3);

    const fs::path tight = write_config("tight.json", R"({
        "potential": ")" + harmonic + R"(",
        "hbar": 0.02, "window": [0.5, 2], "tolerances": {"oracle": 1e-10, "max_cells": 4096}})");
    CHECK(run_cli("levels --config " + tight.string()) == 4);
    CHECK(run_cli("levels --no-oracle --config " + tight.string()) == 0);
}

TEST_CASE("output is deterministic") {
    for (const char* name : {"levels_step.json", "count_sweep.json", "observable_quartic.json"}) {
        const fs::path cfg = configs / name;
        const std::string cmd = std::string(name).substr(0, std::string(name).find('_'));
        const fs::path a = scratch("a.csv"), b = scratch("b.csv"), c = scratch("c.json");
        REQUIRE(run_cli(cmd + " --config " + cfg.string() + " --out " + a.string()) == 0);
        REQUIRE(run_cli(cmd + " --config " + cfg.string() + " --out " + b.string(), "SEMICLASS_THREADS=1") == 0);
        const std::string text = slurp(a);
        CHECK(text == slurp(b));
        CHECK_FALSE(text.empty());
        REQUIRE(run_cli(cmd + " --format json --config " + cfg.string() + " --out " + c.string()) == 0);
        const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
        CHECK(nlohmann::json::parse(slurp(c)).size() + 1 == lines);
    }
}
