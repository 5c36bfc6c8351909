#include "commands.hpp"

#include "semiclass/action.hpp"
#include "semiclass/error.hpp"
#include "semiclass/langer.hpp"
#include "semiclass/oracle.hpp"
#include "semiclass/parallel.hpp"
#include "semiclass/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace semiclass::cli {

namespace {

constexpr double pi = std::numbers::pi;

const Potential& potential(const RunConfig& c) {
    if (!c.potential)
        throw ConfigError("no potential configured");
    return *c.potential;
}

Quantizer resolve(const RunConfig& c, Window window) {
    if (c.quantizer != Quantizer::automatic)
        return c.quantizer;
    const Potential& pot = potential(c);
    if (pot.domain() == DomainKind::half_line)
        return c.boundary.kind == BoundaryKind::robin ? Quantizer::halfline_robin : Quantizer::halfline_dirichlet;
    const TurningPoints tp = turning_points(pot, window.hi);
    for (const auto& s : pot.singular_points())
        if (s.kind == Singularity::value_jump && tp.x_minus < s.x && s.x < tp.x_plus)
            return Quantizer::discontinuous;
    return Quantizer::smooth;
}

std::vector<SemiclassicalLevel> quantize(const RunConfig& c, Quantizer q, double hbar, Window window) {
    const Potential& pot = potential(c);
    switch (q) {
    case Quantizer::discontinuous:
        return disc_levels(pot, window, hbar);
    case Quantizer::halfline_dirichlet:
        return halfline_levels(pot, window, hbar, {BoundaryKind::dirichlet, 0.0});
    case Quantizer::halfline_robin:
        return halfline_levels(pot, window, hbar, {BoundaryKind::robin, c.boundary.b});
    case Quantizer::smooth:
    case Quantizer::automatic:
        break;
    }
    return bs_levels(pot, window, hbar);
}

double offset(Quantizer q) {
    switch (q) {
    case Quantizer::halfline_dirichlet:
        return 0.75;
    case Quantizer::halfline_robin:
        return 0.25;
    default:
        return 0.5;
    }
}

/// |Phi(lambda) - pi (n + offset) hbar|, or |F(lambda)| for the jump condition.
double condition_residual(const RunConfig& c, Quantizer q, double hbar, int n, double lambda) {
    const Potential& pot = potential(c);
    if (q == Quantizer::discontinuous)
        return std::abs(disc_function(pot, lambda, hbar));
    return std::abs(phi(pot, lambda).phi - pi * (n + offset(q)) * hbar);
}

struct Work {
    unsigned outer;
    unsigned inner;
};

Work split_threads(std::size_t items) {
    const unsigned total = thread_limit();
    const auto outer = static_cast<unsigned>(std::clamp<std::size_t>(items, 1, total));
    return {outer, std::max(1u, total / outer)};
}

OracleSpectrum oracle(const RunConfig& c, double hbar, Window window, unsigned threads) {
    OracleOptions opt = c.oracle_options;
    opt.threads = threads;
    return solve_spectrum(potential(c), hbar, window, opt);
}

std::vector<SemiclassicalLevel> select(const std::vector<SemiclassicalLevel>& all, const LevelSelection& s) {
    switch (s.kind) {
    case LevelSelection::Kind::all:
        return all;
    case LevelSelection::Kind::list: {
        std::vector<SemiclassicalLevel> out;
        for (const auto& l : all)
            if (std::find(s.n.begin(), s.n.end(), l.n) != s.n.end())
                out.push_back(l);
        return out;
    }
    case LevelSelection::Kind::nearest: {
        if (all.empty())
            return {};
        auto best = std::min_element(all.begin(), all.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.lambda - s.nearest) < std::abs(b.lambda - s.nearest);
        });
        return {*best};
    }
    }
    return all;
}

/// Level nearest the selection target (the window midpoint unless `levels` names one).
SemiclassicalLevel target_level(const RunConfig& c, Quantizer q, double hbar) {
    LevelSelection s = c.levels;
    if (s.kind != LevelSelection::Kind::nearest) {
        s.kind = LevelSelection::Kind::nearest;
        s.nearest = 0.5 * (c.window.lo + c.window.hi);
    }
    const auto levels = select(quantize(c, q, hbar, c.window), s);
    if (levels.empty())
        throw DomainError("no semiclassical level in the window at hbar " + format_double(hbar));
    return levels.front();
}

/// Index into spec.eigenvalues of the eigenvalue with global label n, or -1.
long oracle_index(const OracleSpectrum& spec, int n) {
    const long k = n - spec.first_index;
    return k >= 0 && k < static_cast<long>(spec.eigenvalues.size()) ? k : -1;
}

/// Oracle spectrum on a small window around one level.
std::pair<OracleSpectrum, std::size_t> oracle_for(const RunConfig& c, const SemiclassicalLevel& level,
                                                  unsigned threads) {
    const double pad = 0.25 * level.hbar / std::max(phi_prime(potential(c), level.lambda), 1e-3);
    const Window w{level.lambda - pad, level.lambda + pad};
    OracleSpectrum spec = oracle(c, level.hbar, w, threads);
    const long k = oracle_index(spec, level.n);
    if (k < 0)
        throw ConvergenceError("oracle has no eigenvalue with label " + std::to_string(level.n) + " near " +
                               format_double(level.lambda));
    return {std::move(spec), static_cast<std::size_t>(k)};
}

Cell opt(double x, bool have) { return have ? Cell{x} : Cell{}; }

void require_oracle(const RunConfig& c, const char* what) {
    if (!c.oracle)
        throw ConfigError(std::string(what) + " compares against the oracle; remove --no-oracle");
}

struct Sampled {
    std::vector<double> x, sc, oracle;
    double sup = 0.0, max_psi = 0.0;
};

/// Samples psi on [lo, hi] (oracle nodes if present, else a uniform grid).
Sampled sample(const Eigenfunction& ef, const GridFunction* psi, double lo, double hi, std::size_t samples) {
    Sampled s;
    if (psi) {
        const double a = std::max(lo, psi->x_min), b = std::min(hi, psi->x_max());
        const auto i0 = static_cast<std::size_t>(std::ceil((a - psi->x_min) / psi->step - 1e-9));
        const auto i1 = static_cast<std::size_t>(std::floor((b - psi->x_min) / psi->step + 1e-9));
        if (!(a < b) || i1 < i0)
            return s;
        const std::size_t stride = std::max<std::size_t>(1, (i1 - i0) / samples);
        for (std::size_t i = i0; i <= i1; i += stride) {
            s.x.push_back(psi->x(i));
            s.oracle.push_back(psi->values[i]);
        }
    } else {
        for (std::size_t i = 0; i <= samples; ++i)
            s.x.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples));
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        s.sc.push_back(ef(s.x[i]));
        if (psi) {
            s.sup = std::max(s.sup, std::abs(s.sc[i] - s.oracle[i]));
            s.max_psi = std::max(s.max_psi, std::abs(s.oracle[i]));
        }
    }
    return s;
}

/// [x1, x+ + 1]: the region the uniform comparison covers.
std::pair<double, double> right_region(const Eigenfunction& ef) {
    return {ef.match_point(), ef.chart(WellSide::plus).turning_point() + 1.0};
}

std::string note(const char* fmt_name, double hbar, int n) {
    std::ostringstream os;
    os << fmt_name << " hbar=" << format_double(hbar) << " n=" << n;
    return os.str();
}

} // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DomainError("slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw DomainError("slope fit needs positive values");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Report cmd_levels(const RunConfig& c) {
    Report r;
    r.table.columns = {"hbar", "n", "kind", "lambda_semiclassical", "lambda_oracle", "oracle_error",
                       "delta_lambda", "action_residual"};
    const Quantizer q = resolve(c, c.window);
    const Work work = split_threads(c.hbar.size());
    std::vector<std::vector<std::vector<Cell>>> blocks(c.hbar.size());
    parallel_for(c.hbar.size(), [&](std::size_t i) {
        const double hbar = c.hbar[i];
        const auto levels = quantize(c, q, hbar, c.window);
        std::optional<OracleSpectrum> spec;
        if (c.oracle)
            spec = oracle(c, hbar, c.window, work.inner);
        std::vector<int> labels;
        for (const auto& l : levels)
            labels.push_back(l.n);
        if (spec)
            for (std::size_t k = 0; k < spec->eigenvalues.size(); ++k)
                labels.push_back(spec->first_index + static_cast<int>(k));
        std::sort(labels.begin(), labels.end());
        labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        for (int n : labels) {
            if (c.levels.kind == LevelSelection::Kind::list &&
                std::find(c.levels.n.begin(), c.levels.n.end(), n) == c.levels.n.end())
                continue;
            const auto sc = std::find_if(levels.begin(), levels.end(), [n](const auto& l) { return l.n == n; });
            const bool have_sc = sc != levels.end();
            const long k = spec ? oracle_index(*spec, n) : -1;
            const bool have_or = k >= 0;
            const double l_sc = have_sc ? sc->lambda : 0.0;
            const double l_or = have_or ? spec->eigenvalues[static_cast<std::size_t>(k)] : 0.0;
            const char* kind = have_sc ? to_string(sc->kind) : "";
            blocks[i].push_back({hbar, static_cast<long>(n), std::string(kind), opt(l_sc, have_sc), opt(l_or, have_or),
                                 opt(have_or ? spec->est_error[static_cast<std::size_t>(k)] : 0.0, have_or),
                                 opt(l_or - l_sc, have_sc && have_or),
                                 opt(have_or ? condition_residual(c, q, hbar, n, l_or) : 0.0, have_or)});
        }
        if (c.levels.kind == LevelSelection::Kind::nearest) {
            const auto keep = select(levels, c.levels);
            std::erase_if(blocks[i], [&](const std::vector<Cell>& row) {
                return keep.empty() || std::get<long>(row[1]) != keep.front().n;
            });
        }
    }, work.outer);
    for (auto& b : blocks)
        for (auto& row : b)
            r.table.rows.push_back(std::move(row));
    return r;
}

Report cmd_count(const RunConfig& c) {
    Report r;
    r.table.columns = {"hbar", "a1", "a2", "predicted", "count", "epsilon", "phase_volume", "oracle_count",
                       "oracle_epsilon"};
    std::vector<Window> windows{c.window};
    windows.insert(windows.end(), c.extra_windows.begin(), c.extra_windows.end());
    std::vector<std::pair<double, Window>> items;
    for (double h : c.hbar)
        for (Window w : windows)
            items.emplace_back(h, w);
    const Work work = split_threads(items.size());
    std::vector<std::vector<Cell>> rows(items.size());
    parallel_for(items.size(), [&](std::size_t i) {
        const auto [hbar, w] = items[i];
        const Potential& pot = potential(c);
        const Quantizer q = resolve(c, w);
        const double bottom = pot.bottom();
        const double phi_lo = w.lo <= bottom ? 0.0 : phi(pot, w.lo).phi;
        const double phi_hi = phi(pot, w.hi).phi;
        const double predicted = (phi_hi - phi_lo) / (pi * hbar);
        const long count = static_cast<long>(quantize(c, q, hbar, w).size());
        long oracle_count = 0;
        if (c.oracle)
            oracle_count = static_cast<long>(oracle(c, hbar, w, work.inner).eigenvalues.size());
        rows[i] = {hbar, w.lo, w.hi, predicted, count, static_cast<double>(count) - predicted,
                   2.0 * (phi_hi - phi_lo), c.oracle ? Cell{oracle_count} : Cell{},
                   opt(static_cast<double>(oracle_count) - predicted, c.oracle)};
    }, work.outer);
    r.table.rows = std::move(rows);
    return r;
}

Report cmd_wavefunction(const RunConfig& c) {
    Report r;
    r.table.columns = {"hbar", "n", "x", "psi_semiclassical", "psi_oracle", "abs_err"};
    const Quantizer q = resolve(c, c.window);
    std::vector<SemiclassicalLevel> items;
    for (double hbar : c.hbar) {
        LevelSelection s = c.levels;
        auto levels = select(quantize(c, q, hbar, c.window), s);
        items.insert(items.end(), levels.begin(), levels.end());
    }
    const Work work = split_threads(items.size());
    std::vector<Sampled> out(items.size());
    parallel_for(items.size(), [&](std::size_t i) {
        const SemiclassicalLevel& level = items[i];
        const Eigenfunction ef(potential(c), level);
        const TurningPoints& tp = ef.chart(WellSide::plus).turning();
        double lo = potential(c).domain() == DomainKind::half_line ? 0.0 : tp.x_minus - 1.0;
        double hi = tp.x_plus + 1.0;
        if (c.x_range) {
            lo = c.x_range->first;
            hi = c.x_range->second;
        }
        if (c.oracle) {
            const auto [spec, k] = oracle_for(c, level, work.inner);
            const GridFunction psi = eigenvector(spec, k);
            out[i] = sample(ef, &psi, lo, hi, c.samples);
        } else {
            out[i] = sample(ef, nullptr, lo, hi, c.samples);
        }
    }, work.outer);
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Sampled& s = out[i];
        for (std::size_t j = 0; j < s.x.size(); ++j) {
            const bool have = c.oracle;
            r.table.rows.push_back({items[i].hbar, static_cast<long>(items[i].n), s.x[j], s.sc[j],
                                    opt(have ? s.oracle[j] : 0.0, have),
                                    opt(have ? std::abs(s.sc[j] - s.oracle[j]) : 0.0, have)});
        }
        if (c.oracle)
            r.notes.push_back(note("wavefunction", items[i].hbar, items[i].n) + " sup_error=" +
                              format_double(s.sup) + " max_psi=" + format_double(s.max_psi));
    }
    return r;
}

Report cmd_observable(const RunConfig& c) {
    Report r;
    r.table.columns = {"hbar", "n", "lambda", "weight", "classical", "oracle", "abs_err"};
    const Quantizer q = resolve(c, c.window);
    std::vector<SemiclassicalLevel> items;
    for (double hbar : c.hbar) {
        const auto levels = select(quantize(c, q, hbar, c.window), c.levels);
        items.insert(items.end(), levels.begin(), levels.end());
    }
    const Potential& pot = potential(c);
    const Work work = split_threads(items.size());
    std::vector<std::vector<std::vector<Cell>>> blocks(items.size());
    parallel_for(items.size(), [&](std::size_t i) {
        const SemiclassicalLevel& level = items[i];
        std::optional<std::pair<OracleSpectrum, std::size_t>> spec;
        std::optional<GridFunction> psi;
        if (c.oracle) {
            spec = oracle_for(c, level, work.inner);
            psi = eigenvector(spec->first, spec->second);
        }
        for (const WeightSpec& ws : c.weights) {
            double classical = 0.0, value = 0.0;
            if (ws.kind == WeightSpec::Kind::kinetic) {
                classical = kinetic_cl(pot, level.lambda);
                if (spec)
                    value = energy_split(spec->first, spec->second).kinetic;
            } else {
                const Weight w = make_weight(ws, pot);
                classical = classical_average(pot, level.lambda, w);
                if (psi)
                    value = observable(*psi, w);
            }
            blocks[i].push_back({level.hbar, static_cast<long>(level.n), level.lambda, ws.name, classical,
                                 opt(value, c.oracle), opt(std::abs(value - classical), c.oracle)});
        }
    }, work.outer);
    for (auto& b : blocks)
        for (auto& row : b)
            r.table.rows.push_back(std::move(row));
    return r;
}

Report cmd_scaling(const RunConfig& c) {
    require_oracle(c, "scaling");
    Report r;
    r.table.columns = {"quantity", "hbar", "value", "fitted_slope", "predicted_slope"};
    const Potential& pot = potential(c);
    const Quantizer q = resolve(c, c.window);

    struct Series {
        std::string name;
        std::optional<double> predicted;
        std::vector<double> values;
    };
    std::vector<Series> series;
    const std::size_t m = c.hbar.size();
    const auto add = [&](std::string name, std::optional<double> predicted) {
        series.push_back({std::move(name), predicted, std::vector<double>(m, 0.0)});
    };
    switch (c.study) {
    case Study::levels:
        add("action_residual", 2.0);
        break;
    case Study::disc:
        add("eigenvalue_error", 5.0 / 3.0);
        add("condition_residual", 2.0 / 3.0);
        break;
    case Study::observable:
        for (const auto& w : c.weights)
            add(w.kind == WeightSpec::Kind::kinetic ? "kinetic" : "observable:" + w.name, 1.0 / 3.0);
        break;
    case Study::wavefunction:
        add("sup_error_relative", std::nullopt);
        add("peak_value", -1.0 / 6.0);
        break;
    }

    const Work work = split_threads(m);
    parallel_for(m, [&](std::size_t i) {
        const double hbar = c.hbar[i];
        switch (c.study) {
        case Study::levels: {
            const OracleSpectrum spec = oracle(c, hbar, c.window, work.inner);
            double worst = 0.0;
            for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k)
                worst = std::max(worst, condition_residual(c, q, hbar, spec.first_index + static_cast<int>(k),
                                                           spec.eigenvalues[k]));
            series[0].values[i] = worst;
            break;
        }
        case Study::disc: {
            const auto levels = disc_levels(pot, c.window, hbar);
            const OracleSpectrum spec = oracle(c, hbar, c.window, work.inner);
            double worst = 0.0, cond = 0.0;
            for (const auto& l : levels) {
                const long k = oracle_index(spec, l.n);
                if (k < 0)
                    continue;
                const double lo = spec.eigenvalues[static_cast<std::size_t>(k)];
                worst = std::max(worst, std::abs(lo - l.lambda));
                cond = std::max(cond, std::abs(disc_function(pot, lo, hbar)));
            }
            series[0].values[i] = worst;
            series[1].values[i] = cond;
            break;
        }
        case Study::observable: {
            const SemiclassicalLevel level = target_level(c, q, hbar);
            const auto [spec, k] = oracle_for(c, level, work.inner);
            const GridFunction psi = eigenvector(spec, k);
            for (std::size_t j = 0; j < c.weights.size(); ++j) {
                const WeightSpec& ws = c.weights[j];
                double err;
                if (ws.kind == WeightSpec::Kind::kinetic) {
                    err = std::abs(energy_split(spec, k).kinetic - kinetic_cl(pot, level.lambda));
                } else {
                    const Weight w = make_weight(ws, pot);
                    err = std::abs(observable(psi, w) - classical_average(pot, level.lambda, w));
                }
                series[j].values[i] = err;
            }
            break;
        }
        case Study::wavefunction: {
            const SemiclassicalLevel level = target_level(c, q, hbar);
            const Eigenfunction ef(pot, level);
            const auto [spec, k] = oracle_for(c, level, work.inner);
            const GridFunction psi = eigenvector(spec, k);
            const auto [lo, hi] = right_region(ef);
            const Sampled s = sample(ef, &psi, lo, hi, psi.values.size());
            series[0].values[i] = s.sup / s.max_psi;
            series[1].values[i] = std::abs(psi(ef.chart(WellSide::plus).turning_point()));
            break;
        }
        }
    }, work.outer);

    for (const Series& s : series) {
        std::optional<double> slope;
        if (m >= 2 && std::all_of(s.values.begin(), s.values.end(), [](double v) { return v > 0.0; }))
            slope = loglog_slope(c.hbar, s.values);
        for (std::size_t i = 0; i < m; ++i)
            r.table.rows.push_back({s.name, c.hbar[i], s.values[i], slope ? Cell{*slope} : Cell{},
                                    s.predicted ? Cell{*s.predicted} : Cell{}});
        std::ostringstream os;
        os << "scaling " << s.name << ": fitted slope " << (slope ? format_double(*slope) : "n/a");
        if (s.predicted)
            os << ", predicted " << format_double(*s.predicted);
        r.notes.push_back(os.str());
    }
    return r;
}

Report run(const RunConfig& c) {
    if (!c.command)
        throw ConfigError("no command given");
    switch (*c.command) {
    case Command::levels:
        return cmd_levels(c);
    case Command::count:
        return cmd_count(c);
    case Command::wavefunction:
        return cmd_wavefunction(c);
    case Command::observable:
        return cmd_observable(c);
    case Command::scaling:
        return cmd_scaling(c);
    }
    throw ConfigError("unknown command");
}

} // namespace semiclass::cli
