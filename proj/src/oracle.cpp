#include "semiclass/oracle.hpp"

#include "semiclass/action.hpp"
#include "semiclass/error.hpp"
#include "semiclass/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace semiclass {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

/// v at every node of the grid; the mean of the one-sided limits on singular points.
std::vector<double> node_values(const Potential& pot, const OracleGrid& grid) {
    const double h = grid.step();
    std::vector<double> v(grid.cells + 1);
    std::vector<char> fixed(v.size(), 0);
    for (const auto& s : pot.singular_points()) {
        const double r = (s.x - grid.x_min) / h;
        const double i = std::round(r);
        if (i < 0.0 || i > static_cast<double>(grid.cells) || std::abs(r - i) > 1e-9)
            continue;
        const auto idx = static_cast<std::size_t>(i);
        v[idx] = 0.5 * (s.left_value + s.right_value);
        fixed[idx] = 1;
    }
    for (std::size_t i = 0; i <= grid.cells; ++i)
        if (!fixed[i])
            v[i] = pot.value(grid.x_min + h * static_cast<double>(i));
    return v;
}

/// tridiag(-1, 2 + g(s_i), -1) with s_i = h^2 (v_i - lambda) / hbar^2, g(s) = s or s / (1 - s/12).
/// Its inertia counts the discrete eigenvalues below lambda.
struct Discretization {
    OracleGrid grid;
    double c = 0.0; ///< h^2 / hbar^2
    std::size_t first = 1;
    std::vector<double> v; ///< at the unknowns
    bool robin = false;
    double robin_diag = 0.0; ///< 2 h b
    bool numerov = false;
    double v_min = 0.0;

    std::size_t size() const { return v.size(); }

    double diag(std::size_t i, double lambda) const {
        const double s = c * (v[i] - lambda);
        double a = 2.0 + (numerov ? s / (1.0 - s / 12.0) : s);
        if (robin && i == 0)
            a += robin_diag;
        return a;
    }

    /// Product of the off-diagonal pair between unknowns i - 1 and i.
    double coupling(std::size_t i) const { return robin && i == 1 ? 2.0 : 1.0; }

    int count(double lambda) const {
        constexpr double pivmin = 1e-290;
        int neg = 0;
        double q = 1.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            double a = diag(i, lambda);
            if (i > 0)
                a -= coupling(i) / q;
            if (std::abs(a) < pivmin)
                a = -pivmin;
            if (a < 0.0)
                ++neg;
            q = a;
        }
        return neg;
    }
};

Discretization discretize(const Potential& pot, double hbar, const OracleGrid& grid, const OracleOptions& opt,
                          OracleBC bc) {
    Discretization d;
    d.grid = grid;
    const double h = grid.step();
    d.c = h * h / (hbar * hbar);
    d.robin = bc == OracleBC::halfline_robin;
    d.robin_diag = 2.0 * h * opt.halfline.b;
    d.numerov = opt.scheme == Scheme::numerov;
    d.first = d.robin ? 0 : 1;
    std::vector<double> all = node_values(pot, grid);
    d.v.assign(all.begin() + static_cast<std::ptrdiff_t>(d.first), all.end() - 1);
    d.v_min = *std::min_element(d.v.begin(), d.v.end());
    return d;
}

/// Eigenvalues with global indices [a, b), bisected to adjacent doubles so the result does
/// not depend on the bracketing history.
std::vector<double> bisect_range(const Discretization& d, int a, int b, double upper,
                                 const std::map<int, std::pair<double, double>>& hints) {
    const auto n = static_cast<std::size_t>(b - a);
    double lower = d.v_min;
    if (d.robin)
        while (d.count(lower) > a)
            lower -= std::max(1.0, std::abs(lower));
    std::vector<double> lo(n, lower), hi(n, upper);
    const auto update = [&](double mu, int below) {
        for (std::size_t j = 0; j < n; ++j) {
            if (a + static_cast<int>(j) < below)
                hi[j] = std::min(hi[j], mu);
            else
                lo[j] = std::max(lo[j], mu);
        }
    };
    for (std::size_t j = 0; j < n; ++j) {
        const auto it = hints.find(a + static_cast<int>(j));
        if (it == hints.end())
            continue;
        const auto [centre, width] = it->second;
        for (double mu : {centre - width, centre + width})
            if (mu > lo[j] && mu < hi[j])
                update(mu, d.count(mu));
    }
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (;;) {
            const double mid = 0.5 * (lo[j] + hi[j]);
            if (!(mid > lo[j] && mid < hi[j]))
                break;
            update(mid, d.count(mid));
        }
        out[j] = hi[j];
    }
    return out;
}

struct Box {
    double x_min, x_max;
};

double edge(const Potential& pot, double lambda, const TurningPoints& tp, WellSide side, double target) {
    const double xt = side == WellSide::plus ? tp.x_plus : tp.x_minus;
    const double dir = side == WellSide::plus ? 1.0 : -1.0;
    const double limit = 4.0 * pot.search_extent() + std::abs(pot.anchor());
    double near = 0.0, far = 0.25 * tp.width();
    auto action = [&](double dx) { return forbidden_action(pot, lambda, tp, xt + dir * dx, side); };
    while (action(far) < target) {
        near = far;
        far *= 2.0;
        if (far > limit)
            throw DomainError("window touches the truncation-induced spectrum edge: the forbidden region beyond " +
                              fmt(xt) + " does not confine lambda = " + fmt(lambda));
    }
    for (int i = 0; i < 40 && far - near > 1e-3 * far; ++i) {
        const double mid = 0.5 * (near + far);
        (action(mid) < target ? near : far) = mid;
    }
    return xt + dir * far;
}

Box truncation(const Potential& pot, double hbar, double lambda, double decay) {
    const TurningPoints tp = turning_points(pot, lambda);
    Box b;
    b.x_max = edge(pot, lambda, tp, WellSide::plus, decay * hbar);
    b.x_min = pot.domain() == DomainKind::half_line ? 0.0 : edge(pot, lambda, tp, WellSide::minus, decay * hbar);
    return b;
}

/// Aligns the grid so that a node falls on the strongest singular point inside the box.
OracleGrid initial_grid(const Potential& pot, Box box, std::size_t cells) {
    const SingularPoint* anchor = nullptr;
    for (const auto& s : pot.singular_points()) {
        if (!(box.x_min < s.x && s.x < box.x_max))
            continue;
        if (!anchor || (s.kind == Singularity::value_jump && anchor->kind != Singularity::value_jump))
            anchor = &s;
    }
    double h = (box.x_max - box.x_min) / static_cast<double>(cells);
    OracleGrid g{box.x_min, box.x_max, cells};
    if (!anchor)
        return g;
    if (pot.domain() == DomainKind::half_line) {
        h = anchor->x / std::max(1.0, std::round(anchor->x / h));
    } else {
        g.x_min = anchor->x - std::ceil((anchor->x - box.x_min) / h) * h;
    }
    g.cells = static_cast<std::size_t>(std::ceil((box.x_max - g.x_min) / h - 1e-9));
    g.x_max = g.x_min + h * static_cast<double>(g.cells);
    return g;
}

OracleGrid refine(const OracleGrid& g, int level) {
    return {g.x_min, g.x_max, g.cells << level};
}

} // namespace

const char* to_string(Scheme scheme) {
    return scheme == Scheme::numerov ? "numerov" : "second_order";
}

const char* to_string(OracleBC bc) {
    switch (bc) {
    case OracleBC::dirichlet_both:
        return "dirichlet_both";
    case OracleBC::halfline_dirichlet:
        return "halfline_dirichlet";
    case OracleBC::halfline_robin:
        return "halfline_robin";
    }
    return "unknown";
}

OracleSpectrum solve_spectrum(const Potential& pot, double hbar, Window window, const OracleOptions& opt) {
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    if (!(window.lo < window.hi))
        throw DomainError("empty window (" + fmt(window.lo) + ", " + fmt(window.hi) + ")");
    if (!(opt.tol >= 1e-10))
        throw DomainError("oracle tolerance must be at least 1e-10");
    if (!(window.hi > pot.bottom()))
        throw CertificationError(Clause::below_well_bottom, "window lies below the bottom of the potential");

    OracleSpectrum spec{.potential = pot, .hbar = hbar, .window = window, .scheme = opt.scheme};
    if (pot.domain() == DomainKind::half_line)
        spec.bc = opt.halfline.kind == BoundaryKind::robin ? OracleBC::halfline_robin : OracleBC::halfline_dirichlet;
    spec.robin_b = spec.bc == OracleBC::halfline_robin ? opt.halfline.b : 0.0;
    if (spec.bc == OracleBC::halfline_robin && opt.scheme == Scheme::numerov)
        throw DomainError("the Numerov scheme is not available with a Robin condition");

    const Box box = truncation(pot, hbar, window.hi, opt.decay);
    const double wavelength = 2.0 * std::numbers::pi * hbar / std::sqrt(window.hi - pot.bottom());
    std::size_t cells = std::max(opt.min_cells, static_cast<std::size_t>(std::ceil(32.0 * (box.x_max - box.x_min) /
                                                                                   wavelength)));
    OracleGrid base = initial_grid(pot, box, cells);
    if (opt.scheme == Scheme::numerov) {
        const std::vector<double> v = node_values(pot, base);
        const double spread = *std::max_element(v.begin(), v.end()) - std::min(window.lo, pot.bottom());
        while (base.step() * base.step() / (hbar * hbar) * spread > 6.0) {
            cells *= 2;
            base = initial_grid(pot, box, cells);
        }
    }

    bool singular_inside = false;
    for (const auto& s : pot.singular_points())
        singular_inside = singular_inside || (base.x_min < s.x && s.x < base.x_max);
    spec.order = opt.scheme == Scheme::numerov && !singular_inside ? 4 : 2;
    const double ratio = std::ldexp(1.0, spec.order) - 1.0;
    const unsigned threads = opt.threads ? opt.threads : thread_limit();

    std::vector<std::map<int, double>> values;
    int a = std::numeric_limits<int>::max(), b = 0;
    std::vector<double> last_est;

    const auto compute = [&](const Discretization& d, int level, int from, int to) {
        auto& have = values[static_cast<std::size_t>(level)];
        std::vector<int> need;
        for (int k = from; k < to; ++k)
            if (!have.count(k))
                need.push_back(k);
        if (need.empty())
            return;
        std::map<int, std::pair<double, double>> hints;
        if (level >= 2) {
            for (int k : need) {
                const auto& p1 = values[static_cast<std::size_t>(level - 1)];
                const auto& p2 = values[static_cast<std::size_t>(level - 2)];
                if (p1.count(k) && p2.count(k)) {
                    const double diff = std::abs(p1.at(k) - p2.at(k));
                    hints[k] = {p1.at(k), 2.0 * diff + 1e-13 * std::max(1.0, std::abs(p1.at(k)))};
                }
            }
        }
        double upper = window.hi;
        while (d.count(upper) < need.back() + 1)
            upper += std::max(1.0, upper - d.v_min);
        // contiguous runs of missing indices, split across threads
        std::vector<std::pair<int, int>> runs;
        for (int k : need) {
            if (!runs.empty() && runs.back().second == k)
                ++runs.back().second;
            else
                runs.emplace_back(k, k + 1);
        }
        std::vector<std::pair<int, int>> blocks;
        for (auto [s, e] : runs) {
            const int pieces = std::min<int>(e - s, static_cast<int>(threads));
            for (int t = 0; t < pieces; ++t)
                blocks.emplace_back(s + (e - s) * t / pieces, s + (e - s) * (t + 1) / pieces);
        }
        std::vector<std::vector<double>> found(blocks.size());
        parallel_for(blocks.size(), [&](std::size_t i) {
            found[i] = bisect_range(d, blocks[i].first, blocks[i].second, upper, hints);
        }, threads);
        for (std::size_t i = 0; i < blocks.size(); ++i)
            for (int k = blocks[i].first; k < blocks[i].second; ++k)
                have[k] = found[i][static_cast<std::size_t>(k - blocks[i].first)];
    };

    for (int level = 0;; ++level) {
        const OracleGrid grid = refine(base, level);
        if (grid.cells > opt.max_cells) {
            std::ostringstream os;
            os << "oracle did not converge by " << opt.max_cells << " cells; last estimates";
            for (double e : last_est)
                os << ' ' << fmt(e);
            throw ConvergenceError(os.str());
        }
        values.emplace_back();
        const Discretization d = discretize(pot, hbar, grid, opt, spec.bc);
        const int k_lo = d.count(window.lo), k_hi = d.count(window.hi);
        a = std::min(a, std::max(0, k_lo - 1));
        b = std::max(b, k_hi + 1);
        compute(d, level, a, b);
        if (level < 2)
            continue;
        for (int back = 1; back <= 2; ++back) {
            bool missing = false;
            for (int k = a; k < b; ++k)
                missing = missing || !values[static_cast<std::size_t>(level - back)].count(k);
            if (missing)
                compute(discretize(pot, hbar, refine(base, level - back), opt, spec.bc), level - back, a, b);
        }

        const auto& v0 = values[static_cast<std::size_t>(level - 2)];
        const auto& v1 = values[static_cast<std::size_t>(level - 1)];
        const auto& v2 = values[static_cast<std::size_t>(level)];
        std::vector<int> idx;
        std::vector<double> lam, est;
        bool done = true;
        last_est.clear();
        for (int k = a; k < b; ++k) {
            const double r1 = v1.at(k) + (v1.at(k) - v0.at(k)) / ratio;
            const double r2 = v2.at(k) + (v2.at(k) - v1.at(k)) / ratio;
            if (!(r2 > window.lo && r2 < window.hi))
                continue;
            idx.push_back(k);
            lam.push_back(r2);
            est.push_back(std::abs(r2 - r1));
            last_est.push_back(est.back());
            done = done && est.back() < opt.tol;
        }
        if (!done)
            continue;
        spec.grid = grid;
        spec.first_index = idx.empty() ? k_lo : idx.front();
        spec.eigenvalues = std::move(lam);
        spec.est_error = std::move(est);
        for (int k : idx)
            spec.grid_eigenvalues.push_back(v2.at(k));
        for (int l = 0; l <= level; ++l) {
            std::vector<double> row;
            for (int k : idx) {
                const auto it = values[static_cast<std::size_t>(l)].find(k);
                row.push_back(it == values[static_cast<std::size_t>(l)].end()
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : it->second);
            }
            spec.history.push_back(std::move(row));
        }
        for (std::size_t i = 1; i < spec.eigenvalues.size(); ++i)
            if (!(spec.eigenvalues[i] > spec.eigenvalues[i - 1]))
                throw ConvergenceError("oracle eigenvalues are not strictly increasing near " +
                                       fmt(spec.eigenvalues[i]));
        return spec;
    }
}

double GridFunction::operator()(double x) const {
    if (values.empty())
        return 0.0;
    const double r = (x - x_min) / step;
    if (r < 0.0 || r > static_cast<double>(values.size() - 1))
        return 0.0;
    const auto i = std::min(static_cast<std::size_t>(r), values.size() - 2);
    const double t = r - static_cast<double>(i);
    return (1.0 - t) * values[i] + t * values[i + 1];
}

namespace {

double trapezoid_norm(const GridFunction& psi) {
    double sum = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const double weight = i == 0 || i + 1 == psi.values.size() ? 0.5 : 1.0;
        sum += weight * psi.values[i] * psi.values[i];
    }
    return std::sqrt(sum * psi.step);
}

void normalize(GridFunction& psi, const Potential& pot) {
    const double scale = 1.0 / trapezoid_norm(psi);
    const double x_plus = turning_points(pot, psi.lambda, false).x_plus;
    const double sign = psi(x_plus) < 0.0 ? -1.0 : 1.0;
    for (auto& x : psi.values)
        x *= sign * scale;
}

/// Null vector of T(lambda) on one grid by inverse iteration.
GridFunction grid_vector(const OracleSpectrum& spec, const OracleGrid& grid, double lambda, double tol) {
    OracleOptions opt;
    opt.scheme = spec.scheme;
    opt.halfline = {spec.bc == OracleBC::halfline_robin ? BoundaryKind::robin : BoundaryKind::dirichlet,
                    spec.robin_b};
    const Discretization d = discretize(spec.potential, spec.hbar, grid, opt, spec.bc);
    const std::size_t n = d.size();

    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i)
        diag[i] = d.diag(i, lambda);
    // row 0 of the Robin system couples to unknown 1 with -2, every other off-diagonal is -1
    const auto upper = [&](std::size_t i) { return d.robin && i == 0 ? -2.0 : -1.0; };
    const auto apply = [&](const std::vector<double>& w, std::size_t i) {
        double r = diag[i] * w[i];
        if (i > 0)
            r -= w[i - 1];
        if (i + 1 < n)
            r += upper(i) * w[i + 1];
        return r;
    };

    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> w(n), cprime(n), dprime(n);
    for (auto& x : w)
        x = uni(rng);
    double residual = HUGE_VAL;
    for (int it = 0; it < 6 && residual > 1e-13 * d.c * std::max(1.0, std::abs(lambda)); ++it) {
        double den = diag[0] != 0.0 ? diag[0] : 1e-300;
        cprime[0] = upper(0) / den;
        dprime[0] = w[0] / den;
        for (std::size_t i = 1; i < n; ++i) {
            den = diag[i] + cprime[i - 1];
            if (den == 0.0)
                den = 1e-300;
            cprime[i] = i + 1 < n ? upper(i) / den : 0.0;
            dprime[i] = (w[i] + dprime[i - 1]) / den;
        }
        w[n - 1] = dprime[n - 1];
        for (std::size_t i = n - 1; i-- > 0;)
            w[i] = dprime[i] - cprime[i] * w[i + 1];
        double norm = 0.0;
        for (double x : w)
            norm += x * x;
        norm = std::sqrt(norm);
        for (auto& x : w)
            x /= norm;
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = apply(w, i);
            r2 += r * r;
        }
        residual = std::sqrt(r2);
    }
    const double residual_lambda = residual / d.c;
    if (residual_lambda > 100.0 * tol * std::max(1.0, std::abs(lambda)))
        throw ConvergenceError("inverse iteration stagnated at lambda = " + fmt(lambda) + ", residual " +
                               fmt(residual_lambda));

    GridFunction psi;
    psi.x_min = grid.x_min;
    psi.step = grid.step();
    psi.lambda = lambda;
    psi.residual = residual_lambda;
    psi.values.assign(grid.cells + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double value = w[i];
        if (d.numerov)
            value /= 1.0 - d.c * (d.v[i] - lambda) / 12.0;
        psi.values[i + d.first] = value;
    }
    normalize(psi, spec.potential);
    return psi;
}

} // namespace

GridFunction eigenvector(const OracleSpectrum& spec, std::size_t k) {
    if (k >= spec.eigenvalues.size())
        throw DomainError("eigenvector index " + std::to_string(k) + " outside the window's " +
                          std::to_string(spec.eigenvalues.size()) + " levels");
    const double tol = std::max(1e-10, spec.est_error[k]);
    GridFunction fine = grid_vector(spec, spec.grid, spec.grid_eigenvalues[k], tol);
    if (spec.history.size() < 2 || spec.grid.cells % 2 != 0)
        return fine;
    const OracleGrid half{spec.grid.x_min, spec.grid.x_max, spec.grid.cells / 2};
    GridFunction out = grid_vector(spec, half, spec.history[spec.history.size() - 2][k], tol);
    const double ratio = std::ldexp(1.0, spec.order) - 1.0;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = fine.values[2 * i] + (fine.values[2 * i] - out.values[i]) / ratio;
    out.lambda = spec.eigenvalues[k];
    out.residual = std::max(out.residual, fine.residual);
    normalize(out, spec.potential);
    return out;
}

double observable(const GridFunction& psi, const Weight& w) {
    const auto& jumps = w.discontinuities;
    const auto piece = [&](double a, double b, double pa, double pb) {
        const double shift = 1e-9 * (b - a);
        return 0.5 * (b - a) * (w.fn(a + shift) * pa * pa + w.fn(b - shift) * pb * pb);
    };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < psi.values.size(); ++i) {
        const double a = psi.x(i), b = psi.x(i + 1);
        const double pa = psi.values[i], pb = psi.values[i + 1];
        if (pa == 0.0 && pb == 0.0)
            continue;
        double lo = a, plo = pa;
        for (double d : jumps) {
            if (!(d > lo && d < b))
                continue;
            const double pd = psi(d);
            sum += piece(lo, d, plo, pd);
            lo = d;
            plo = pd;
        }
        sum += piece(lo, b, plo, pb);
    }
    return sum;
}

double observable(const OracleSpectrum& spec, std::size_t k, const Weight& w) {
    return observable(eigenvector(spec, k), w);
}

EnergySplit energy_split(const OracleSpectrum& spec, std::size_t k) {
    const GridFunction psi = eigenvector(spec, k);
    const OracleGrid grid{psi.x_min, psi.x_max(), psi.values.size() - 1};
    const std::vector<double> v = node_values(spec.potential, grid);
    double sum = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const double weight = i == 0 || i + 1 == psi.values.size() ? 0.5 : 1.0;
        sum += weight * v[i] * psi.values[i] * psi.values[i];
    }
    EnergySplit e;
    e.potential = sum * psi.step;
    e.kinetic = spec.eigenvalues[k] - e.potential;
    return e;
}

std::size_t sign_changes(const GridFunction& psi) {
    std::size_t changes = 0;
    int last = 0;
    for (double x : psi.values) {
        const int s = (x > 0.0) - (x < 0.0);
        if (s != 0 && last != 0 && s != last)
            ++changes;
        if (s != 0)
            last = s;
    }
    return changes;
}

} // namespace semiclass
