#include "config.hpp"

#include "semiclass/error.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace semiclass::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("field '" + field + "': " + what);
}

double number(const json& j, const std::string& field) {
    if (!j.is_number())
        fail(field, "expected a number, got " + std::string(j.type_name()));
    const double x = j.get<double>();
    if (!std::isfinite(x))
        fail(field, "must be finite");
    return x;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key))
        return fallback;
    return number(obj.at(key), where + "." + key);
}

std::vector<double> numbers(const json& j, const std::string& field) {
    if (!j.is_array())
        fail(field, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

std::string text(const json& j, const std::string& field) {
    if (!j.is_string())
        fail(field, "expected a string");
    return j.get<std::string>();
}

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            fail(where + "." + key, "unknown field");
    }
}

BranchFn parse_branch(const json& b, const std::string& where) {
    if (!b.is_object())
        fail(where, "expected an object");
    const std::string kind = text(b.value("kind", json()), where + ".kind");
    if (kind == "poly") {
        only_keys(b, {"kind", "coeffs", "origin"}, where);
        if (!b.contains("coeffs"))
            fail(where + ".coeffs", "required");
        return branch::poly(numbers(b.at("coeffs"), where + ".coeffs"), number_or(b, "origin", 0.0, where));
    }
    if (kind == "power") {
        only_keys(b, {"kind", "offset", "scale", "exponent", "origin", "orientation"}, where);
        const double orientation = number_or(b, "orientation", 1.0, where);
        if (orientation != 1.0 && orientation != -1.0)
            fail(where + ".orientation", "must be 1 or -1");
        if (!b.contains("exponent"))
            fail(where + ".exponent", "required");
        return branch::power(number_or(b, "offset", 0.0, where), number_or(b, "scale", 1.0, where),
                             number(b.at("exponent"), where + ".exponent"), number_or(b, "origin", 0.0, where),
                             static_cast<int>(orientation));
    }
    if (kind == "exp_quadratic") {
        only_keys(b, {"kind", "offset", "scale", "rate", "center"}, where);
        if (!b.contains("rate"))
            fail(where + ".rate", "required");
        return branch::exp_quadratic(number_or(b, "offset", 0.0, where), number_or(b, "scale", 1.0, where),
                                     number(b.at("rate"), where + ".rate"), number_or(b, "center", 0.0, where));
    }
    fail(where + ".kind", "unknown branch kind '" + kind + "' (poly, power, exp_quadratic)");
}

DomainKind parse_domain(const json& obj, const std::string& where) {
    if (!obj.contains("domain"))
        return DomainKind::full_line;
    const std::string d = text(obj.at("domain"), where + ".domain");
    if (d == "full_line")
        return DomainKind::full_line;
    if (d == "half_line")
        return DomainKind::half_line;
    fail(where + ".domain", "expected full_line or half_line");
}

std::string location(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        if (const auto pos = msg.find(": "); pos != std::string::npos)
            msg = msg.substr(pos + 2);
        throw ConfigError(what + ": " + location(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + msg);
    }
}

std::string read_file(const std::filesystem::path& path, const std::string& what) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(what + ": cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Window parse_window(const json& j, const std::string& field) {
    const std::vector<double> w = numbers(j, field);
    if (w.size() != 2)
        fail(field, "expected [lo, hi]");
    if (!(w[0] < w[1]))
        fail(field, "window must satisfy lo < hi");
    return {w[0], w[1]};
}

WeightSpec parse_weight(const json& j, const std::string& where) {
    WeightSpec w;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "potential")
            w.kind = WeightSpec::Kind::potential;
        else if (s == "kinetic")
            w.kind = WeightSpec::Kind::kinetic;
        else
            fail(where, "unknown weight '" + s + "' (potential, kinetic or an object)");
        w.name = s;
        return w;
    }
    if (!j.is_object())
        fail(where, "expected a string or an object");
    const std::string type = text(j.value("type", json()), where + ".type");
    if (type == "indicator") {
        only_keys(j, {"type", "above", "below"}, where);
        if (j.contains("above") == j.contains("below"))
            fail(where, "indicator needs exactly one of 'above' or 'below'");
        const bool above = j.contains("above");
        w.kind = above ? WeightSpec::Kind::indicator_above : WeightSpec::Kind::indicator_below;
        w.parameter = number(j.at(above ? "above" : "below"), where + (above ? ".above" : ".below"));
        std::ostringstream os;
        os << "indicator(x" << (above ? '>' : '<') << w.parameter << ")";
        w.name = os.str();
        return w;
    }
    if (type == "monomial") {
        only_keys(j, {"type", "power"}, where);
        w.kind = WeightSpec::Kind::monomial;
        w.parameter = number(j.value("power", json()), where + ".power");
        if (w.parameter != std::floor(w.parameter) || w.parameter < 0)
            fail(where + ".power", "must be a non-negative integer");
        w.name = "x^" + std::to_string(static_cast<int>(w.parameter));
        return w;
    }
    fail(where + ".type", "unknown weight type '" + type + "' (indicator, monomial)");
}

} // namespace

const char* to_string(Command c) {
    switch (c) {
    case Command::levels:
        return "levels";
    case Command::count:
        return "count";
    case Command::wavefunction:
        return "wavefunction";
    case Command::observable:
        return "observable";
    case Command::scaling:
        return "scaling";
    }
    return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
    for (Command c : {Command::levels, Command::count, Command::wavefunction, Command::observable, Command::scaling})
        if (name == to_string(c))
            return c;
    return std::nullopt;
}

Potential parse_potential(const json& j, const std::string& where) {
    if (!j.is_object())
        fail(where, "expected an object");
    const std::string type = text(j.value("type", json()), where + ".type");
    try {
        if (type == "power_law") {
            only_keys(j, {"type", "a_plus", "v_plus", "alpha_plus", "a_minus", "v_minus", "alpha_minus"}, where);
            PowerLawParams p;
            p.a_plus = number_or(j, "a_plus", p.a_plus, where);
            p.v_plus = number_or(j, "v_plus", p.v_plus, where);
            p.alpha_plus = number_or(j, "alpha_plus", p.alpha_plus, where);
            p.a_minus = number_or(j, "a_minus", p.a_minus, where);
            p.v_minus = number_or(j, "v_minus", p.v_minus, where);
            p.alpha_minus = number_or(j, "alpha_minus", p.alpha_minus, where);
            return make_power_law(p);
        }
        if (type == "table") {
            only_keys(j, {"type", "domain", "breakpoints", "branches", "decay_exponent", "search_extent"}, where);
            if (!j.contains("branches") || !j.at("branches").is_array() || j.at("branches").empty())
                fail(where + ".branches", "expected a non-empty array");
            std::vector<BranchFn> branches;
            for (std::size_t i = 0; i < j.at("branches").size(); ++i)
                branches.push_back(parse_branch(j.at("branches")[i], where + ".branches[" + std::to_string(i) + "]"));
            std::vector<double> breaks;
            if (j.contains("breakpoints"))
                breaks = numbers(j.at("breakpoints"), where + ".breakpoints");
            if (breaks.size() + 1 != branches.size())
                fail(where + ".breakpoints", "need one fewer breakpoint than branches");
            std::optional<double> decay;
            if (j.contains("decay_exponent"))
                decay = number(j.at("decay_exponent"), where + ".decay_exponent");
            return Potential(std::move(branches), std::move(breaks), parse_domain(j, where), decay,
                             number_or(j, "search_extent", 50.0, where));
        }
    } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    fail(where + ".type", "unknown potential type '" + type + "' (power_law, table)");
}

RunConfig parse_config(const std::string& source, const std::filesystem::path& base) {
    const json j = parse_json(source, "config");
    if (!j.is_object())
        throw ConfigError("config: expected a JSON object at the top level");
    only_keys(j,
              {"potential", "command", "hbar", "window", "windows", "levels", "output", "format", "oracle",
               "quantizer", "boundary", "tolerances", "weights", "study", "samples", "x_range"},
              "config");
    RunConfig c;

    if (!j.contains("potential"))
        fail("potential", "required (a path or an inline object)");
    const json& pj = j.at("potential");
    if (pj.is_string()) {
        std::filesystem::path p = pj.get<std::string>();
        if (p.is_relative())
            p = base / p;
        const std::string text = read_file(p, "potential");
        c.potential = parse_potential(parse_json(text, p.string()), p.filename().string());
    } else {
        c.potential = parse_potential(pj, "potential");
    }

    if (j.contains("command")) {
        const auto cmd = parse_command(text(j.at("command"), "command"));
        if (!cmd)
            fail("command", "unknown command '" + j.at("command").get<std::string>() + "'");
        c.command = *cmd;
    }

    if (!j.contains("hbar"))
        fail("hbar", "required");
    c.hbar = j.at("hbar").is_number() ? std::vector<double>{number(j.at("hbar"), "hbar")} : numbers(j.at("hbar"), "hbar");
    if (c.hbar.empty())
        fail("hbar", "must not be empty");
    std::set<double> seen;
    for (double h : c.hbar) {
        if (!(h > 0.0))
            fail("hbar", "values must be positive");
        if (!seen.insert(h).second)
            fail("hbar", "values must be distinct");
    }

    if (!j.contains("window"))
        fail("window", "required");
    c.window = parse_window(j.at("window"), "window");
    if (j.contains("windows")) {
        const json& ws = j.at("windows");
        if (!ws.is_array())
            fail("windows", "expected an array of [lo, hi] pairs");
        for (std::size_t i = 0; i < ws.size(); ++i)
            c.extra_windows.push_back(parse_window(ws[i], "windows[" + std::to_string(i) + "]"));
    }

    if (j.contains("levels")) {
        const json& l = j.at("levels");
        if (l.is_string()) {
            if (l.get<std::string>() != "all")
                fail("levels", "expected \"all\", a list of n, or {\"nearest\": lambda}");
        } else if (l.is_array()) {
            c.levels.kind = LevelSelection::Kind::list;
            for (std::size_t i = 0; i < l.size(); ++i) {
                if (!l[i].is_number_integer() || l[i].get<long>() < 0)
                    fail("levels[" + std::to_string(i) + "]", "expected a non-negative integer");
                c.levels.n.push_back(l[i].get<int>());
            }
        } else if (l.is_object()) {
            only_keys(l, {"nearest"}, "levels");
            c.levels.kind = LevelSelection::Kind::nearest;
            c.levels.nearest = number(l.value("nearest", json()), "levels.nearest");
        } else {
            fail("levels", "expected \"all\", a list of n, or {\"nearest\": lambda}");
        }
    }

    if (j.contains("output")) {
        std::filesystem::path p = text(j.at("output"), "output");
        c.output = p.is_relative() ? base / p : p;
    }
    if (j.contains("format")) {
        const std::string f = text(j.at("format"), "format");
        if (f == "csv")
            c.format = Format::csv;
        else if (f == "json")
            c.format = Format::json;
        else
            fail("format", "expected csv or json");
    }
    if (j.contains("oracle")) {
        if (!j.at("oracle").is_boolean())
            fail("oracle", "expected true or false");
        c.oracle = j.at("oracle").get<bool>();
    }

    if (j.contains("quantizer")) {
        const std::string q = text(j.at("quantizer"), "quantizer");
        if (q == "auto")
            c.quantizer = Quantizer::automatic;
        else if (q == "smooth")
            c.quantizer = Quantizer::smooth;
        else if (q == "discontinuous")
            c.quantizer = Quantizer::discontinuous;
        else if (q == "halfline_dirichlet")
            c.quantizer = Quantizer::halfline_dirichlet;
        else if (q == "halfline_robin")
            c.quantizer = Quantizer::halfline_robin;
        else
            fail("quantizer", "expected auto, smooth, discontinuous, halfline_dirichlet or halfline_robin");
    }
    if (j.contains("boundary")) {
        const json& b = j.at("boundary");
        if (b.is_string() && b.get<std::string>() == "dirichlet") {
            c.boundary = {BoundaryKind::dirichlet, 0.0};
        } else if (b.is_object() && b.contains("robin") && b.size() == 1) {
            c.boundary = {BoundaryKind::robin, number(b.at("robin"), "boundary.robin")};
        } else {
            fail("boundary", "expected \"dirichlet\" or {\"robin\": b}");
        }
    }
    if (c.quantizer == Quantizer::halfline_robin && c.boundary.kind != BoundaryKind::robin)
        c.boundary.kind = BoundaryKind::robin;
    if (c.quantizer == Quantizer::halfline_dirichlet && c.boundary.kind == BoundaryKind::robin)
        fail("boundary", "a Robin condition contradicts quantizer halfline_dirichlet");
    c.oracle_options.halfline = c.boundary;

    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        if (!t.is_object())
            fail("tolerances", "expected an object");
        only_keys(t, {"oracle", "scheme", "decay", "max_cells"}, "tolerances");
        c.oracle_options.tol = number_or(t, "oracle", c.oracle_options.tol, "tolerances");
        if (!(c.oracle_options.tol >= 1e-10))
            fail("tolerances.oracle", "must be at least 1e-10");
        if (t.contains("scheme")) {
            const std::string s = text(t.at("scheme"), "tolerances.scheme");
            if (s == "second_order")
                c.oracle_options.scheme = Scheme::second_order;
            else if (s == "numerov")
                c.oracle_options.scheme = Scheme::numerov;
            else
                fail("tolerances.scheme", "expected second_order or numerov");
        }
        c.oracle_options.decay = number_or(t, "decay", c.oracle_options.decay, "tolerances");
        if (!(c.oracle_options.decay > 0.0))
            fail("tolerances.decay", "must be positive");
        if (t.contains("max_cells")) {
            const double m = number(t.at("max_cells"), "tolerances.max_cells");
            if (!(m >= 64.0))
                fail("tolerances.max_cells", "must be at least 64");
            c.oracle_options.max_cells = static_cast<std::size_t>(m);
        }
    }

    if (j.contains("weights")) {
        const json& w = j.at("weights");
        if (!w.is_array() || w.empty())
            fail("weights", "expected a non-empty array");
        for (std::size_t i = 0; i < w.size(); ++i)
            c.weights.push_back(parse_weight(w[i], "weights[" + std::to_string(i) + "]"));
    } else {
        c.weights = {parse_weight("potential", "weights"), parse_weight("kinetic", "weights")};
    }

    if (j.contains("study")) {
        const std::string s = text(j.at("study"), "study");
        if (s == "levels")
            c.study = Study::levels;
        else if (s == "disc")
            c.study = Study::disc;
        else if (s == "observable")
            c.study = Study::observable;
        else if (s == "wavefunction")
            c.study = Study::wavefunction;
        else
            fail("study", "expected levels, disc, observable or wavefunction");
    }
    if (j.contains("samples")) {
        const json& s = j.at("samples");
        if (!s.is_number_integer() || s.get<long>() < 2)
            fail("samples", "expected an integer of at least 2");
        c.samples = s.get<std::size_t>();
    }
    if (j.contains("x_range")) {
        const Window r = parse_window(j.at("x_range"), "x_range");
        c.x_range = std::make_pair(r.lo, r.hi);
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    RunConfig c = parse_config(read_file(path, "config"), path.parent_path());
    c.source = path;
    return c;
}

Weight make_weight(const WeightSpec& spec, const Potential& pot) {
    switch (spec.kind) {
    case WeightSpec::Kind::potential: {
        Weight w{[pot](double x) { return pot.value(x); }, {}};
        for (const auto& s : pot.singular_points())
            w.discontinuities.push_back(s.x);
        return w;
    }
    case WeightSpec::Kind::indicator_above: {
        const double t = spec.parameter;
        return {[t](double x) { return x > t ? 1.0 : 0.0; }, {t}};
    }
    case WeightSpec::Kind::indicator_below: {
        const double t = spec.parameter;
        return {[t](double x) { return x < t ? 1.0 : 0.0; }, {t}};
    }
    case WeightSpec::Kind::monomial: {
        const int k = static_cast<int>(spec.parameter);
        return {[k](double x) { return std::pow(x, k); }, {}};
    }
    case WeightSpec::Kind::kinetic:
        break;
    }
    throw DomainError("the kinetic energy is not a position weight");
}

} // namespace semiclass::cli
