#include "semiclass/action.hpp"
#include "semiclass/airy.hpp"
#include "semiclass/langer.hpp"
#include "semiclass/oracle.hpp"
#include "semiclass/quantize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace semiclass;

namespace {

constexpr double pi = 3.14159265358979323846;

Potential harmonic() { return make_power_law({}); }
Potential quartic() { return make_power_law({0.0, 1.0, 4.0, 0.0, 1.0, 4.0}); }
Potential half_harmonic() { return Potential(branch::poly({0.0, 0.0, 1.0}), DomainKind::half_line); }

double slope(const std::vector<double>& h, const std::vector<double>& r) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        mx += std::log(h[i]);
        my += std::log(r[i]);
    }
    mx /= h.size();
    my /= h.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        sxy += (std::log(h[i]) - mx) * (std::log(r[i]) - my);
        sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
    }
    return sxy / sxx;
}

bool decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1]))
            return false;
    return true;
}

std::string list(const std::vector<double>& v) {
    std::string s;
    char buf[32];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, "%s%.3g", s.empty() ? "" : " ", x);
        s += buf;
    }
    return s;
}

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// 1
Outcome harmonic_exactness() {
    Outcome o;
    double worst = 0;
    for (double hbar : {0.1, 0.05}) {
        const auto levels = bs_levels(harmonic(), {0.0, 2.0}, hbar);
        const OracleSpectrum s = solve_spectrum(harmonic(), hbar, {0.0, 2.0});
        o.require(levels.size() == s.eigenvalues.size(), fmt("hbar %g: level count %g", hbar, double(levels.size())));
        for (std::size_t i = 0; i < std::min(levels.size(), s.eigenvalues.size()); ++i)
            worst = std::max(worst, std::abs(levels[i].lambda - s.eigenvalues[i]));
    }
    o.require(worst <= 1e-7, fmt("max |lambda_BS - lambda_oracle| = %.3g", worst));
    return o;
}

// 2
Outcome residual_law() {
    Outcome o;
    const Potential q = quartic();
    const std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
    std::vector<double> r;
    for (double hbar : hs) {
        const OracleSpectrum s = solve_spectrum(q, hbar, {0.5, 2.0});
        double m = 0;
        for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
            const int n = s.first_index + static_cast<int>(i);
            m = std::max(m, std::abs(phi(q, s.eigenvalues[i]).phi - pi * (n + 0.5) * hbar));
        }
        r.push_back(m);
    }
    o.note("r(hbar) = " + list(r));
    const double k = slope(hs, r);
    o.require(k >= 1.8, fmt("fitted slope %.4f (>= 1.8)", k));
    return o;
}

// 3
Outcome weyl_remainder_bound() {
    Outcome o;
    const std::pair<double, double> windows[] = {{0.3456, 1.7321}, {1.1234, 2.9371}};
    const Potential pots[] = {harmonic(), quartic()};
    int cases = 0;
    double worst = 0;
    for (const auto& pot : pots)
        for (double hbar : {0.05, 0.04, 0.03, 0.02, 0.01})
            for (auto [a1, a2] : windows) {
                const OracleSpectrum s = solve_spectrum(pot, hbar, {a1, a2});
                const double eps = weyl_remainder(pot, a1, a2, hbar, static_cast<int>(s.eigenvalues.size()));
                worst = std::max(worst, std::abs(eps));
                ++cases;
            }
    o.require(cases == 20, fmt("%g (window, hbar) pairs", cases));
    o.require(worst <= 1.0, fmt("max |epsilon| = %.4f", worst));
    return o;
}

struct NearestLevel {
    SemiclassicalLevel level;
    OracleSpectrum spectrum;
    std::size_t k;
};

NearestLevel nearest(const Potential& pot, double hbar, double lambda) {
    const auto levels = bs_levels(pot, {0.0, 2.0 * lambda}, hbar);
    SemiclassicalLevel best = levels.front();
    for (const auto& l : levels)
        if (std::abs(l.lambda - lambda) < std::abs(best.lambda - lambda))
            best = l;
    OracleSpectrum s = solve_spectrum(pot, hbar, {best.lambda - 0.5 * hbar, best.lambda + 0.5 * hbar});
    std::size_t k = 0;
    while (k < s.eigenvalues.size() && s.first_index + static_cast<int>(k) != best.n)
        ++k;
    if (k == s.eigenvalues.size())
        throw std::runtime_error("oracle level " + std::to_string(best.n) + " not found");
    return {best, std::move(s), k};
}

// 4
Outcome uniform_eigenfunction() {
    Outcome o;
    const Potential q = quartic();
    std::vector<double> sup, rel;
    double peak = 0, predicted = 0;
    for (double hbar : {0.1, 0.05, 0.025}) {
        const NearestLevel m = nearest(q, hbar, 1.0);
        const GridFunction psi = eigenvector(m.spectrum, m.k);
        const Eigenfunction ef(q, m.level);
        const double xp = ef.chart(WellSide::plus).turning_point();
        double err = 0, top = 0;
        for (std::size_t i = 0; i < psi.values.size(); ++i) {
            const double x = psi.x(i);
            if (x < ef.match_point() || x > xp + 1)
                continue;
            err = std::max(err, std::abs(ef(x) - psi.values[i]));
            top = std::max(top, std::abs(psi.values[i]));
        }
        sup.push_back(err);
        rel.push_back(err / top);
        peak = std::abs(psi(xp));
        predicted = ef.peak_prediction();
    }
    o.note("sup error = " + list(sup) + ", relative = " + list(rel));
    o.require(decreasing(sup), "sup error decreases with hbar");
    o.require(rel.back() <= 0.15, fmt("sup error / max psi at hbar = 0.025: %.4f (<= 0.15)", rel.back()));
    o.require(std::abs(peak / predicted - 1) <= 0.15, fmt("peak %.5f vs alpha hbar^{-1/6} = %.5f", peak, predicted));
    return o;
}

// 5
Outcome observables() {
    Outcome o;
    const Potential q = quartic();
    const std::vector<double> hs{0.1, 0.05, 0.025};
    const Weight wv{[&q](double x) { return q.value(x); }, {}};
    const Weight wi{[](double x) { return x > 0.2 ? 1.0 : 0.0; }, {0.2}};
    std::vector<double> ev, ei, ek;
    for (double hbar : hs) {
        const NearestLevel m = nearest(q, hbar, 1.0);
        const GridFunction psi = eigenvector(m.spectrum, m.k);
        const double lambda = m.level.lambda;
        ev.push_back(std::abs(observable(psi, wv) - classical_average(q, lambda, wv)));
        ei.push_back(std::abs(observable(psi, wi) - classical_average(q, lambda, wi)));
        ek.push_back(std::abs(energy_split(m.spectrum, m.k).kinetic - kinetic_cl(q, lambda)));
    }
    const std::pair<const char*, const std::vector<double>*> rows[] = {
        {"w = v", &ev}, {"w = 1(x > 0.2)", &ei}, {"kinetic", &ek}};
    for (auto [name, e] : rows) {
        const double k = slope(hs, *e);
        o.note(std::string(name) + ": errors " + list(*e));
        o.require(decreasing(*e) && k >= 0.25, std::string(name) + fmt(": decreasing, slope %.3f (>= 0.25)", k));
    }
    return o;
}

// 6
Outcome airy_correctness() {
    Outcome o;
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const double t = -30.0 + 60.0 * i / 9999.0;
        const AiryValues v = airy_eval(t);
        worst = std::max(worst, std::abs((v.ai_prime * v.bi - v.ai * v.bi_prime) * pi + 1.0));
    }
    o.require(worst <= 1e-12, fmt("Wronskian max relative error %.3g", worst));

    std::ifstream in(SEMICLASS_FIXTURE_DIR "/airy_golden.csv");
    std::string line;
    std::getline(in, line);
    bool found = false;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double t, ai, aip;
        ss >> t >> ai >> aip;
        if (t != 0.0)
            continue;
        found = true;
        const AiryValues v = airy_eval(0.0);
        const double e1 = std::abs(v.ai / ai - 1), e2 = std::abs(v.ai_prime / aip - 1);
        o.require(e1 <= 1e-13 && e2 <= 1e-13, fmt("Ai(0), Ai'(0) relative errors %.2g, %.2g", e1, e2));
    }
    o.require(found, "golden fixture has t = 0");

    double jump = 0;
    for (double t : {-airy_switch, airy_switch}) {
        const AiryValues a = detail::airy_series(t), b = detail::airy_asymptotic(t);
        const double floor = t < 0 ? 1.0 : 0.0;
        jump = std::max({jump, std::abs(a.ai - b.ai) / std::max(std::abs(a.ai), floor),
                         std::abs(a.ai_prime - b.ai_prime) / std::max(std::abs(a.ai_prime), floor),
                         std::abs(a.bi - b.bi) / std::max(std::abs(a.bi), floor),
                         std::abs(a.bi_prime - b.bi_prime) / std::max(std::abs(a.bi_prime), floor)});
    }
    o.require(jump <= 1e-11, fmt("handoff at |t| = %g: %.3g", airy_switch, jump));
    return o;
}

// 7
Outcome discontinuous() {
    Outcome o;
    const Potential d = make_power_law({0.5, 1.0, 2.0, 0.0, 1.0, 2.0});
    const Window w{0.6, 2.0};
    const std::vector<double> hs{0.05, 0.025, 0.0125};
    std::vector<double> errs;
    for (double hbar : hs) {
        const auto levels = disc_levels(d, w, hbar);
        const OracleSpectrum s = solve_spectrum(d, hbar, w);
        const bool same = levels.size() == s.eigenvalues.size() && !levels.empty() && levels.front().n == s.first_index;
        o.require(same, fmt("hbar %g: %g roots", hbar, double(levels.size())) +
                            fmt(" vs %g oracle levels", double(s.eigenvalues.size())));
        double e = 0;
        for (std::size_t i = 0; i < std::min(levels.size(), s.eigenvalues.size()); ++i)
            e = std::max(e, std::abs(levels[i].lambda - s.eigenvalues[i]));
        errs.push_back(e);
    }
    o.note("max per-level error = " + list(errs));
    o.require(decreasing(errs), "per-level error decreases with hbar");
    const double k = slope(hs, errs);
    o.require(k >= 1.3, fmt("fitted slope %.3f (>= 1.3)", k));

    const Potential c = make_power_law({0.0, 1.0, 2.0, 0.0, 4.0, 2.0});
    double gap = 0;
    for (double hbar : hs) {
        const auto a = disc_levels(c, {0.2, 2.0}, hbar), b = bs_levels(c, {0.2, 2.0}, hbar);
        if (a.size() != b.size()) {
            gap = INFINITY;
            break;
        }
        for (std::size_t i = 0; i < a.size(); ++i)
            gap = std::max(gap, std::abs(a[i].lambda - b[i].lambda));
    }
    o.require(gap <= 1e-10, fmt("continuous limit: max |disc - bs| = %.3g", gap));
    return o;
}

// 8
Outcome halfline() {
    Outcome o;
    const Potential half = half_harmonic();
    const double noise = 1e-7;
    for (auto [kind, parity] : {std::pair{BoundaryKind::dirichlet, 1}, std::pair{BoundaryKind::robin, 0}}) {
        const char* name = kind == BoundaryKind::dirichlet ? "Dirichlet vs odd" : "Robin vs even";
        std::vector<double> r;
        for (double hbar : {0.1, 0.05}) {
            const auto levels = halfline_levels(half, {0.0, 2.0}, hbar, {kind, 5.0});
            const OracleSpectrum full = solve_spectrum(harmonic(), hbar, {0.0, 2.0});
            double e = 0;
            for (const auto& l : levels) {
                const std::size_t k = static_cast<std::size_t>(2 * l.n + parity - full.first_index);
                e = k < full.eigenvalues.size() ? std::max(e, std::abs(l.lambda - full.eigenvalues[k])) : INFINITY;
            }
            r.push_back(e);
        }
        o.require(r[0] <= 0.01 && r[1] <= std::max(1.25 * r[0] / 4, noise),
                  std::string(name) + " full-line levels: max gap " + list(r));
    }

    bool identical = true;
    for (double hbar : {0.1, 0.05}) {
        const auto a = halfline_levels(half, {0.0, 2.0}, hbar, {BoundaryKind::robin, 0.0});
        const auto b = halfline_levels(half, {0.0, 2.0}, hbar, {BoundaryKind::robin, 100.0});
        identical = identical && a.size() == b.size();
        for (std::size_t i = 0; identical && i < a.size(); ++i)
            identical = a[i].n == b[i].n && a[i].lambda == b[i].lambda && a[i].residual == b[i].residual;
    }
    o.require(identical, "Robin b = 0 and b = 100 give identical level tables");

    for (double b : {0.0, 1.0}) {
        OracleOptions opts;
        opts.halfline = {BoundaryKind::robin, b};
        std::vector<double> r;
        for (double hbar : {0.1, 0.05}) {
            const OracleSpectrum s = solve_spectrum(half, hbar, {0.0, 2.0}, opts);
            double e = 0;
            for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
                e = std::max(e, std::abs(pi * s.eigenvalues[i] / 4 - pi * hbar * (s.first_index + i + 0.25)));
            r.push_back(e);
        }
        o.note(fmt("finite-b Robin oracle, b = %g: action residual ", b) + list(r));
    }
    return o;
}

// 9
Outcome classical_identities() {
    Outcome o;
    double worst = 0;
    const Potential pots[] = {harmonic(), quartic()};
    for (const auto& pot : pots)
        for (double lambda : {0.3, 0.7, 1.0, 1.6, 2.5}) {
            const Weight wv{[&pot](double x) { return pot.value(x); }, {}};
            const double k = kinetic_cl(pot, lambda);
            worst = std::max({worst, std::abs(k - phi(pot, lambda).phi / (2 * phi_prime(pot, lambda))),
                              std::abs(k + classical_average(pot, lambda, wv) - lambda)});
        }
    o.require(worst <= 1e-8, fmt("kinetic identities: max deviation %.3g", worst));

    double rel = 0;
    for (auto [ap, am] : {std::pair{2.0, 2.0}, std::pair{2.0, 4.0}, std::pair{1.0, 3.0}}) {
        const PowerLawParams p{0.0, 1.0, ap, 0.0, 1.0, am};
        const Potential pot = make_power_law(p);
        for (double lambda : {0.5, 1.0, 2.0}) {
            const PowerLawActions c = power_law_closed_forms(p, lambda);
            rel = std::max({rel, std::abs(c.phi / phi(pot, lambda).phi - 1),
                            std::abs(c.phi_prime / phi_prime(pot, lambda) - 1)});
        }
    }
    o.require(rel <= 1e-8, fmt("Beta closed forms vs quadrature: max relative deviation %.3g", rel));
    return o;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget; // seconds; 0 for none
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"harmonic exactness", 10, harmonic_exactness},
        {"hbar^2 residual law", 120, residual_law},
        {"Weyl remainder", 180, weyl_remainder_bound},
        {"uniform eigenfunction", 120, uniform_eigenfunction},
        {"observables", 0, observables},
        {"Airy correctness", 0, airy_correctness},
        {"discontinuous quantization", 0, discontinuous},
        {"half-line offsets", 0, halfline},
        {"classical identities", 0, classical_identities},
    };
    int failures = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget > 0)
            o.require(secs < c.budget, fmt("runtime %.2f s (< %g s)", secs, c.budget));
        std::printf("%s %d %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", index, c.name, secs);
        for (const auto& d : o.details)
            std::printf("    %s\n", d.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
