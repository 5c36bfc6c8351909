#include "commands.hpp"
#include "config.hpp"

#include "semiclass/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace semiclass;

namespace {

constexpr int exit_config = 2;
constexpr int exit_certification = 3;
constexpr int exit_convergence = 4;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical eigenvalues, eigenfunctions and observables of one-dimensional wells"};
    std::string command, config_path, out_path, format;
    bool no_oracle = false;
    app.add_option("command", command, "levels, count, wavefunction, observable or scaling")
        ->required()
        ->check(CLI::IsMember({"levels", "count", "wavefunction", "observable", "scaling"}));
    app.add_option("--config", config_path, "run configuration (JSON)")->required();
    app.add_option("--out", out_path, "output file (default: the config's output, else stdout)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--no-oracle", no_oracle, "skip the finite-difference reference");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        cli::RunConfig config = cli::load_config(config_path);
        const cli::Command cmd = *cli::parse_command(command);
        if (config.command && *config.command != cmd)
            throw ConfigError("config names command '" + std::string(cli::to_string(*config.command)) +
                              "' but '" + command + "' was requested");
        config.command = cmd;
        if (!format.empty())
            config.format = format == "json" ? cli::Format::json : cli::Format::csv;
        if (!out_path.empty())
            config.output = out_path;
        if (no_oracle)
            config.oracle = false;

        const cli::Report report = cli::run(config);
        std::ofstream file;
        if (config.output) {
            file.open(*config.output);
            if (!file)
                throw ConfigError("cannot write " + config.output->string());
        }
        std::ostream& os = config.output ? file : std::cout;
        if (config.format == cli::Format::json)
            cli::write_json(report.table, os);
        else
            cli::write_csv(report.table, os);
        for (const auto& line : report.notes)
            std::cerr << line << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const CertificationError& e) {
        std::cerr << "certification failure: " << e.what() << '\n';
        return exit_certification;
    } catch (const ConvergenceError& e) {
        std::cerr << "no convergence: " << e.what() << '\n';
        return exit_convergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
