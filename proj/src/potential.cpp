#include "semiclass/potential.hpp"

#include "semiclass/error.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace semiclass {

const char* to_string(Clause clause) {
    switch (clause) {
    case Clause::multiple_crossings: return "multiple crossings";
    case Clause::no_crossing: return "no crossing";
    case Clause::critical_turning_point: return "critical turning point";
    case Clause::insufficient_growth: return "insufficient growth";
    case Clause::below_well_bottom: return "below well bottom";
    case Clause::singular_turning_point: return "turning point at a singular point";
    case Clause::unsupported_singularity: return "unsupported singularity";
    }
    return "unknown";
}

const char* to_string(Singularity kind) {
    switch (kind) {
    case Singularity::value_jump: return "value_jump";
    case Singularity::slope_jump: return "slope_jump";
    case Singularity::curvature_jump: return "curvature_jump";
    }
    return "unknown";
}

namespace branch {

BranchFn poly(std::vector<double> coeffs, double origin) {
    return [coeffs = std::move(coeffs), origin](double x) {
        const double s = x - origin;
        Jet j;
        // Horner for the value and both derivatives at once.
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            j.d2v = j.d2v * s + 2.0 * j.dv;
            j.dv = j.dv * s + j.v;
            j.v = j.v * s + *it;
        }
        return j;
    };
}

BranchFn power(double offset, double scale, double exponent, double origin, int orientation) {
    return [=](double x) {
        const double s = x - origin;
        const double r = std::abs(s);
        const double sign = s < 0.0 ? -1.0 : (s > 0.0 ? 1.0 : (orientation < 0 ? -1.0 : 1.0));
        Jet j;
        j.v = offset + scale * std::pow(r, exponent);
        if (r == 0.0) {
            // One-sided limits at the origin; callers pick the side through the piece table.
            j.dv = exponent == 1.0 ? sign * scale : (exponent > 1.0 ? 0.0 : sign * scale * HUGE_VAL);
            j.d2v = (exponent == 1.0 || exponent == 2.0)
                        ? scale * exponent * (exponent - 1.0)
                        : (exponent > 2.0 ? 0.0 : scale * exponent * (exponent - 1.0) * HUGE_VAL);
            return j;
        }
        j.dv = sign * scale * exponent * std::pow(r, exponent - 1.0);
        j.d2v = scale * exponent * (exponent - 1.0) * std::pow(r, exponent - 2.0);
        return j;
    };
}

BranchFn exp_quadratic(double offset, double scale, double rate, double center) {
    return [=](double x) {
        const double s = x - center;
        const double e = scale * std::exp(rate * s * s);
        return Jet{offset + e, 2.0 * rate * s * e, (2.0 * rate + 4.0 * rate * rate * s * s) * e};
    };
}

} // namespace branch

struct Potential::Impl {
    std::vector<BranchFn> branches;
    std::vector<double> breakpoints;
    std::vector<SingularPoint> singular;
    DomainKind domain = DomainKind::full_line;
    std::optional<double> decay;
    double extent = 50.0;
    double anchor = 0.0;
    double bottom = 0.0;

    std::size_t piece_index(double x) const {
        return static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), x) -
                                        breakpoints.begin());
    }
};

namespace {

bool differs(double a, double b) {
    if (std::isinf(a) || std::isinf(b))
        return a != b;
    return std::abs(a - b) > 1e-12 * (1.0 + std::max(std::abs(a), std::abs(b)));
}

double low_bound(DomainKind domain, double extent) {
    return domain == DomainKind::half_line ? 0.0 : -extent;
}

} // namespace

Potential::Potential(std::vector<BranchFn> branches, std::vector<double> breakpoints, DomainKind domain,
                     std::optional<double> decay_exponent, double search_extent) {
    if (branches.empty())
        throw ConfigError("potential needs at least one branch");
    if (breakpoints.size() + 1 != branches.size())
        throw ConfigError("potential needs exactly one breakpoint between consecutive branches");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()) ||
        std::adjacent_find(breakpoints.begin(), breakpoints.end()) != breakpoints.end())
        throw ConfigError("breakpoints must be strictly increasing");
    if (domain == DomainKind::half_line && !breakpoints.empty() && breakpoints.front() <= 0.0)
        throw ConfigError("half-line breakpoints must be positive");
    if (decay_exponent && *decay_exponent <= 1.0)
        throw ConfigError("decay exponent must exceed 1");
    if (!(search_extent > 0.0))
        throw ConfigError("search extent must be positive");

    auto impl = std::make_shared<Impl>();
    impl->branches = std::move(branches);
    impl->breakpoints = std::move(breakpoints);
    impl->domain = domain;
    impl->decay = decay_exponent;
    impl->extent = search_extent;

    for (std::size_t i = 0; i < impl->breakpoints.size(); ++i) {
        const double b = impl->breakpoints[i];
        const Jet l = impl->branches[i](b);
        const Jet r = impl->branches[i + 1](b);
        std::optional<Singularity> kind;
        if (differs(l.v, r.v))
            kind = Singularity::value_jump;
        else if (differs(l.dv, r.dv))
            kind = Singularity::slope_jump;
        else if (differs(l.d2v, r.d2v))
            kind = Singularity::curvature_jump;
        if (kind)
            impl->singular.push_back({b, *kind, l.v, r.v});
    }

    // Locate the bottom of the well on a dense sample, then polish with Brent.
    const double lo = low_bound(domain, search_extent);
    const double hi = search_extent;
    constexpr int samples = 8192;
    const double step = (hi - lo) / samples;
    auto sample_value = [&](double x) {
        const std::size_t k = impl->piece_index(x);
        return impl->branches[k](x).v;
    };
    double best_x = lo;
    double best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= samples; ++i) {
        const double x = lo + i * step;
        const double v = sample_value(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    const double a = std::max(lo, best_x - step);
    const double b = std::min(hi, best_x + step);
    const auto [xm, vm] = boost::math::tools::brent_find_minima(sample_value, a, b, 40);
    if (vm < best_v) {
        best_x = xm;
        best_v = vm;
    }
    for (const auto& s : impl->singular) {
        if (s.x == best_x)
            best_x = std::nextafter(best_x, s.left_value < s.right_value ? -HUGE_VAL : HUGE_VAL);
        best_v = std::min({best_v, s.left_value, s.right_value});
    }
    impl->anchor = best_x;
    impl->bottom = best_v;
    impl_ = std::move(impl);
}

Potential::Potential(BranchFn fn, DomainKind domain, std::optional<double> decay_exponent, double search_extent)
    : Potential(std::vector<BranchFn>{std::move(fn)}, {}, domain, decay_exponent, search_extent) {}

Jet Potential::eval(double x, Side side) const {
    if (!std::isfinite(x) || (impl_->domain == DomainKind::half_line && x < 0.0)) {
        std::ostringstream msg;
        msg << "x = " << x << " outside the potential's domain";
        throw DomainError(msg.str());
    }
    std::size_t k = impl_->piece_index(x);
    if (k > 0 && impl_->breakpoints[k - 1] == x) {
        const bool singular = std::any_of(impl_->singular.begin(), impl_->singular.end(),
                                          [x](const SingularPoint& s) { return s.x == x; });
        if (singular) {
            if (side == Side::none) {
                std::ostringstream msg;
                msg << "evaluation exactly at singular point " << x << " needs a side selector";
                throw DomainError(msg.str());
            }
            if (side == Side::left)
                --k;
        }
    }
    return impl_->branches[k](x);
}

const std::vector<SingularPoint>& Potential::singular_points() const { return impl_->singular; }
DomainKind Potential::domain() const { return impl_->domain; }
double Potential::domain_lo() const {
    return impl_->domain == DomainKind::half_line ? 0.0 : -std::numeric_limits<double>::infinity();
}
std::optional<double> Potential::decay_exponent() const { return impl_->decay; }
double Potential::search_extent() const { return impl_->extent; }
double Potential::anchor() const { return impl_->anchor; }
double Potential::bottom() const { return impl_->bottom; }

namespace {

// v - lambda, taking the limit from `toward` at singular points.
double excess(const Potential& pot, double x, double lambda, Side toward) {
    return pot.eval(x, toward).v - lambda;
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

// Walks outward from `start` (where v < lambda) in direction `dir` and returns
// the root of v - lambda to turning_tolerance.
double find_crossing(const Potential& pot, double lambda, double start, int dir) {
    const double extent = pot.search_extent();
    const double limit = dir > 0 ? extent : low_bound(pot.domain(), extent);
    const Side back = dir > 0 ? Side::left : Side::right;
    double inside = start;
    double step = 1e-4 * extent;
    double outside = start;
    while (true) {
        outside = inside + dir * step;
        if ((dir > 0 && outside >= limit) || (dir < 0 && outside <= limit)) {
            outside = limit;
            if (excess(pot, outside, lambda, back) <= 0.0)
                throw CertificationError(Clause::insufficient_growth,
                                         "v stays below lambda = " + fmt(lambda) + " up to x = " + fmt(limit));
            break;
        }
        if (excess(pot, outside, lambda, back) > 0.0)
            break;
        inside = outside;
        step *= 2.0;
    }
    double a = inside, b = outside; // f(a) <= 0 < f(b)
    while (std::abs(b - a) > turning_tolerance) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b)
            break;
        if (excess(pot, m, lambda, back) > 0.0)
            b = m;
        else
            a = m;
    }
    for (const auto& s : pot.singular_points()) {
        if (std::min(a, b) <= s.x && s.x <= std::max(a, b))
            throw CertificationError(Clause::singular_turning_point,
                                     "v - lambda changes sign at singular point " + fmt(s.x));
    }
    // Secant polish inside the bracket.
    const double fa = excess(pot, a, lambda, back);
    const double fb = excess(pot, b, lambda, back);
    double root = 0.5 * (a + b);
    if (fb != fa) {
        const double secant = a - fa * (b - a) / (fb - fa);
        if (std::min(a, b) <= secant && secant <= std::max(a, b))
            root = secant;
    }
    return root;
}

std::size_t count_crossings(const Potential& pot, double lambda, double lo, double hi, std::size_t points) {
    std::size_t crossings = 0;
    bool prev = false;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        const bool above = excess(pot, x, lambda, Side::right) > 0.0;
        if (i > 0 && above != prev)
            ++crossings;
        prev = above;
    }
    return crossings;
}

TurningPoints locate(const Potential& pot, double lambda) {
    const double start = pot.anchor();
    if (!(pot.eval(start, Side::right).v < lambda))
        throw CertificationError(Clause::below_well_bottom,
                                 "lambda = " + fmt(lambda) + " is not above the bottom of the well");
    TurningPoints tp;
    tp.x_plus = find_crossing(pot, lambda, start, +1);
    tp.slope_plus = pot.eval(tp.x_plus, Side::left).dv;
    if (pot.domain() == DomainKind::half_line) {
        tp.x_minus = 0.0;
        tp.slope_minus = 0.0;
        if (!(pot.eval(0.0).v < lambda))
            throw CertificationError(Clause::below_well_bottom,
                                     "half-line well needs v(0) < lambda = " + fmt(lambda));
    } else {
        tp.x_minus = find_crossing(pot, lambda, start, -1);
        tp.slope_minus = pot.eval(tp.x_minus, Side::right).dv;
        if (!(tp.slope_minus < 0.0))
            throw CertificationError(Clause::critical_turning_point,
                                     "v'(x-) = " + fmt(tp.slope_minus) + " at x- = " + fmt(tp.x_minus));
    }
    if (!(tp.slope_plus > 0.0))
        throw CertificationError(Clause::critical_turning_point,
                                 "v'(x+) = " + fmt(tp.slope_plus) + " at x+ = " + fmt(tp.x_plus));
    return tp;
}

// First point past which v exceeds `target`; the edge of the search region if v
// never gets there but still stays above `floor`.
double walk_to_level(const Potential& pot, double from, double target, double floor, int dir) {
    const double extent = pot.search_extent();
    const double limit = dir > 0 ? extent : low_bound(pot.domain(), extent);
    double step = 1e-3 * std::max(1.0, std::abs(from));
    double x = from;
    while (pot.eval(x, Side::right).v < target) {
        x += dir * step;
        step *= 1.5;
        if ((dir > 0 && x >= limit) || (dir < 0 && x <= limit)) {
            if (pot.eval(limit, Side::right).v > floor)
                return limit;
            throw CertificationError(Clause::insufficient_growth,
                                     "v does not stay above " + fmt(floor) + " within the search extent");
        }
    }
    return x;
}

} // namespace

std::pair<double, double> truncation_bounds(const Potential& pot, double lambda, double margin) {
    const TurningPoints tp = locate(pot, lambda);
    const double hi = walk_to_level(pot, tp.x_plus, lambda + margin, lambda, +1);
    const double lo = pot.domain() == DomainKind::half_line ? 0.0
                                                           : walk_to_level(pot, tp.x_minus, lambda + margin, lambda, -1);
    return {lo, hi};
}

namespace {

void audit_well(const Potential& pot, double lambda, std::size_t points) {
    const auto [lo, hi] = truncation_bounds(pot, lambda);
    const std::size_t expected = pot.domain() == DomainKind::half_line ? 1 : 2;
    const std::size_t found = count_crossings(pot, lambda, lo, hi, points);
    if (found != expected)
        throw CertificationError(Clause::multiple_crossings,
                                 std::to_string(found) + " sign changes of v - lambda at lambda = " + fmt(lambda) +
                                     " (expected " + std::to_string(expected) + ")");
}

} // namespace

TurningPoints turning_points(const Potential& pot, double lambda, bool audit) {
    if (audit)
        audit_well(pot, lambda, default_audit_points);
    return locate(pot, lambda);
}

TurningPoints WellCertificate::turning(double lambda) const {
    if (lambda < lambda_lo || lambda > lambda_hi)
        throw DomainError("lambda = " + fmt(lambda) + " outside the certified window");
    return locate(potential, lambda);
}

bool WellCertificate::has_value_jump() const {
    return std::any_of(interior_singularities.begin(), interior_singularities.end(),
                       [](const SingularPoint& s) { return s.kind == Singularity::value_jump; });
}

WellCertificate certify_well(const Potential& pot, double lambda_lo, double lambda_hi, std::size_t audit_points) {
    if (!(lambda_lo < lambda_hi))
        throw DomainError("certification window must satisfy lambda_lo < lambda_hi");
    if (audit_points < 16)
        throw DomainError("audit grid needs at least 16 points");

    WellCertificate cert{pot, lambda_lo, lambda_hi, {}, HUGE_VAL, {}};
    constexpr int window_samples = 16;
    TurningPoints prev;
    for (int i = 0; i <= window_samples; ++i) {
        const double lambda = lambda_lo + (lambda_hi - lambda_lo) * i / window_samples;
        audit_well(pot, lambda, audit_points);
        const TurningPoints tp = locate(pot, lambda);
        if (i > 0 && (tp.x_plus < prev.x_plus || tp.x_minus > prev.x_minus))
            throw CertificationError(Clause::multiple_crossings,
                                     "turning points are not monotone in lambda near " + fmt(lambda));
        double margin = std::abs(tp.slope_plus);
        if (pot.domain() == DomainKind::full_line)
            margin = std::min(margin, std::abs(tp.slope_minus));
        cert.criticality_margin = std::min(cert.criticality_margin, margin);
        prev = tp;
    }
    if (!(cert.criticality_margin > 0.0))
        throw CertificationError(Clause::critical_turning_point, "zero slope at a turning point");

    const TurningPoints low = locate(pot, lambda_lo);
    const TurningPoints high = prev;
    for (const auto& s : pot.singular_points()) {
        const bool inside_low = low.x_minus < s.x && s.x < low.x_plus;
        const bool inside_high = high.x_minus < s.x && s.x < high.x_plus;
        if (inside_low != inside_high)
            throw CertificationError(Clause::singular_turning_point,
                                     "singular point " + fmt(s.x) + " meets a turning point inside the window");
        if (inside_low)
            cert.interior_singularities.push_back(s);
    }
    cert.truncation = truncation_bounds(pot, lambda_hi);
    return cert;
}

Potential make_power_law(const PowerLawParams& p) {
    if (!(p.v_plus > 0.0) || !(p.v_minus > 0.0))
        throw DomainError("power-law coefficients v+ and v- must be positive");
    if (!(p.alpha_plus > 0.0) || !(p.alpha_minus > 0.0))
        throw DomainError("power-law exponents must be positive");
    std::vector<BranchFn> branches{
        branch::power(p.a_minus, p.v_minus, p.alpha_minus, 0.0, -1),
        branch::power(p.a_plus, p.v_plus, p.alpha_plus),
    };
    return Potential(std::move(branches), {0.0}, DomainKind::full_line, 2.0);
}

} // namespace semiclass
