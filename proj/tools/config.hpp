#pragma once

#include "semiclass/action.hpp"
#include "semiclass/oracle.hpp"
#include "semiclass/potential.hpp"
#include "semiclass/quantize.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace semiclass::cli {

enum class Command { levels, count, wavefunction, observable, scaling };
enum class Format { csv, json };
enum class Quantizer { automatic, smooth, discontinuous, halfline_dirichlet, halfline_robin };
enum class Study { levels, disc, observable, wavefunction };

const char* to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

struct LevelSelection {
    enum class Kind { all, list, nearest };
    Kind kind = Kind::all;
    std::vector<int> n;
    double nearest = 0.0;
};

struct WeightSpec {
    enum class Kind { potential, kinetic, indicator_above, indicator_below, monomial };
    Kind kind = Kind::potential;
    double parameter = 0.0; ///< threshold or power
    std::string name;
};

struct RunConfig {
    std::filesystem::path source;
    std::optional<Potential> potential;
    std::optional<Command> command; ///< as named in the file, if at all
    std::vector<double> hbar;
    Window window;
    std::vector<Window> extra_windows; ///< count: further windows after `window`
    LevelSelection levels;
    std::optional<std::filesystem::path> output;
    Format format = Format::csv;
    bool oracle = true;
    Quantizer quantizer = Quantizer::automatic;
    HalfLineBC boundary;
    OracleOptions oracle_options;
    std::vector<WeightSpec> weights;
    Study study = Study::levels;
    std::size_t samples = 400;
    std::optional<std::pair<double, double>> x_range;
};

/// Potential from its JSON description; `where` prefixes error messages.
Potential parse_potential(const nlohmann::json& j, const std::string& where = "potential");

/// Parses a run configuration.  Relative potential paths resolve against `base`.
/// Throws ConfigError with line/column or field diagnostics.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base);

RunConfig load_config(const std::filesystem::path& path);

Weight make_weight(const WeightSpec& spec, const Potential& pot);

} // namespace semiclass::cli
