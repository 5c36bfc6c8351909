#include "semiclass/quantize.hpp"

#include "semiclass/action.hpp"
#include "semiclass/error.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace semiclass {

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

void check_hbar(double hbar) {
    if (!(hbar > 0.0) || !std::isfinite(hbar))
        throw DomainError("hbar must be positive, got " + fmt(hbar));
}

void check_window(Window w) {
    if (!(w.lo < w.hi) || !std::isfinite(w.lo) || !std::isfinite(w.hi))
        throw DomainError("empty window (" + fmt(w.lo) + ", " + fmt(w.hi) + ")");
}

/// The part of the window where a well exists, certified.  `floor` is true when the
/// window starts at or below the bottom, in which case Phi(lo) is taken as 0.
struct Certified {
    double lo;
    double hi;
    bool floor;
    WellCertificate cert;
};

Certified certify(const Potential& pot, Window w) {
    check_window(w);
    const double bottom = pot.bottom();
    if (w.hi <= bottom)
        throw CertificationError(Clause::below_well_bottom,
                                 "window (" + fmt(w.lo) + ", " + fmt(w.hi) + ") lies below the bottom " + fmt(bottom));
    const bool floor = w.lo <= bottom;
    const double lo = floor ? bottom : w.lo;
    const double audit_lo = floor ? bottom + 1e-2 * (w.hi - bottom) : lo;
    return {lo, w.hi, floor, certify_well(pot, audit_lo, w.hi)};
}

double action_at(const Potential& pot, const Certified& c, double lambda) {
    if (c.floor && lambda <= c.lo)
        return 0.0;
    return phi(pot, lambda).phi;
}

/// Solves Phi(lambda) = target in [lo, hi] with Phi(lo) < target < Phi(hi).
double solve_action(const Potential& pot, double target, double lo, double phi_lo, double hi, double phi_hi,
                    double& residual) {
    double x = lo + (target - phi_lo) / (phi_hi - phi_lo) * (hi - lo);
    for (int it = 0; it < 200; ++it) {
        if (!(x > lo && x < hi))
            x = 0.5 * (lo + hi);
        const ActionProfile a = phi(pot, x);
        const double g = a.phi - target;
        residual = std::abs(g);
        if (g < 0.0)
            lo = x;
        else
            hi = x;
        const double step = g / a.phi_prime;
        const double next = x - step;
        const double tol = level_tolerance(x);
        if (std::abs(step) <= tol || hi - lo <= tol)
            return next > lo && next < hi ? next : x;
        x = next;
    }
    throw ConvergenceError("action root not found in bracket [" + fmt(lo) + ", " + fmt(hi) + "]");
}

std::vector<SemiclassicalLevel> action_levels(const Potential& pot, Window window, double hbar, double offset,
                                              LevelKind kind, double robin_b) {
    check_hbar(hbar);
    const Certified c = certify(pot, window);
    if (kind == LevelKind::smooth || kind == LevelKind::discontinuous) {
        if (pot.domain() != DomainKind::full_line)
            throw DomainError("Bohr-Sommerfeld levels need a full-line potential; use halfline_levels");
    } else if (pot.domain() != DomainKind::half_line) {
        throw DomainError("half-line levels need a half-line potential");
    }
    if (c.cert.has_value_jump())
        throw CertificationError(Clause::unsupported_singularity,
                                 "v jumps inside the well; use disc_levels");

    const double phi_lo = action_at(pot, c, c.lo);
    const double phi_hi = action_at(pot, c, c.hi);
    const double unit = pi * hbar;
    const long first = static_cast<long>(std::floor(phi_lo / unit - offset)) + 1;
    std::vector<SemiclassicalLevel> out;
    double lo = c.lo, f_lo = phi_lo;
    for (long n = std::max(first, 0L);; ++n) {
        const double target = unit * (static_cast<double>(n) + offset);
        if (!(target < phi_hi))
            break;
        if (target <= phi_lo)
            continue;
        SemiclassicalLevel lv;
        lv.n = static_cast<int>(n);
        lv.hbar = hbar;
        lv.kind = kind;
        lv.lambda = solve_action(pot, target, lo, f_lo, c.hi, phi_hi, lv.residual);
        lv.amplitude_a = n % 2 == 0 ? 1.0 : -1.0;
        lv.robin_b = robin_b;
        lo = lv.lambda;
        f_lo = target;
        out.push_back(lv);
    }
    return out;
}

double beta_plus(double theta, double p) {
    const double s = std::sin(theta), co = std::cos(theta);
    return theta + std::atan((p * p - 1.0) * s * co / (co * co + p * p * s * s));
}

/// The one jump of v among `points`; a lone derivative-class point stands in for a zero jump.
const SingularPoint& split_point(const std::vector<const SingularPoint*>& points) {
    std::vector<const SingularPoint*> jumps;
    for (const auto* s : points)
        if (s->kind == Singularity::value_jump)
            jumps.push_back(s);
    if (jumps.size() == 1)
        return *jumps.front();
    if (jumps.empty() && points.size() == 1)
        return *points.front();
    throw CertificationError(Clause::unsupported_singularity,
                             "the jump condition needs exactly one singular point of v inside the well, found " +
                                 std::to_string(jumps.empty() ? points.size() : jumps.size()));
}

const SingularPoint& single_jump(const WellCertificate& cert) {
    std::vector<const SingularPoint*> points;
    for (const auto& s : cert.interior_singularities)
        points.push_back(&s);
    return split_point(points);
}

const SingularPoint& find_jump(const Potential& pot, double lambda) {
    const TurningPoints tp = turning_points(pot, lambda, false);
    std::vector<const SingularPoint*> points;
    for (const auto& s : pot.singular_points())
        if (tp.x_minus < s.x && s.x < tp.x_plus)
            points.push_back(&s);
    return split_point(points);
}

} // namespace

double level_tolerance(double lambda) { return 1e-12 * std::max(1.0, std::abs(lambda)); }

std::vector<SemiclassicalLevel> bs_levels(const Potential& pot, Window window, double hbar) {
    return action_levels(pot, window, hbar, 0.5, LevelKind::smooth, 0.0);
}

CountResult weyl_count(const Potential& pot, double a1, double a2, double hbar) {
    check_hbar(hbar);
    const Certified c = certify(pot, {a1, a2});
    const double phi1 = action_at(pot, c, c.lo);
    const double phi2 = action_at(pot, c, c.hi);
    const double unit = pi * hbar;
    // n with phi1 < unit (n + 1/2) < phi2
    const long lo = std::max(0L, static_cast<long>(std::floor(phi1 / unit - 0.5)) + 1);
    const long hi = static_cast<long>(std::ceil(phi2 / unit - 0.5)) - 1;
    CountResult r;
    r.window = {a1, a2};
    r.hbar = hbar;
    r.predicted = (phi2 - phi1) / unit;
    r.count = hi >= lo ? static_cast<int>(hi - lo + 1) : 0;
    r.epsilon = r.count - r.predicted;
    r.phase_volume = 2.0 * (phi2 - phi1);
    return r;
}

double weyl_remainder(const Potential& pot, double a1, double a2, double hbar, int count) {
    check_hbar(hbar);
    const Certified c = certify(pot, {a1, a2});
    return count - (action_at(pot, c, c.hi) - action_at(pot, c, c.lo)) / (pi * hbar);
}

double discontinuity_ratio(const Potential& pot, double x0, double lambda) {
    const double left = lambda - pot.value(x0, Side::left);
    const double right = lambda - pot.value(x0, Side::right);
    if (!(left > 0.0) || !(right > 0.0))
        throw DomainError("lambda " + fmt(lambda) + " does not exceed both one-sided values of v at " + fmt(x0));
    return std::pow(left / right, 0.25);
}

DiscPhases disc_phases(const Potential& pot, double x0, double lambda, double hbar) {
    check_hbar(hbar);
    DiscPhases d;
    d.p = discontinuity_ratio(pot, x0, lambda);
    d.theta_plus = partial_action(pot, lambda, x0, WellSide::plus) / hbar + pi / 4;
    d.theta_minus = partial_action(pot, lambda, x0, WellSide::minus) / hbar + pi / 4;
    d.f = d.p * std::sin(d.theta_plus) * std::cos(d.theta_minus) +
          std::cos(d.theta_plus) * std::sin(d.theta_minus) / d.p;
    d.label_phase = beta_plus(d.theta_plus, d.p) + d.theta_minus;
    return d;
}

double disc_function(const Potential& pot, double lambda, double hbar) {
    return disc_phases(pot, find_jump(pot, lambda).x, lambda, hbar).f;
}

std::vector<SemiclassicalLevel> disc_levels(const Potential& pot, Window window, double hbar) {
    check_hbar(hbar);
    check_window(window);
    if (pot.domain() != DomainKind::full_line)
        throw DomainError("disc_levels needs a full-line potential");
    const WellCertificate cert = certify_well(pot, window.lo, window.hi);
    const SingularPoint& jump = single_jump(cert);
    const double x0 = jump.x;
    const double top = std::max(jump.left_value, jump.right_value);
    if (!(window.lo > top))
        throw DomainError("window (" + fmt(window.lo) + ", " + fmt(window.hi) + ") dips below max v(x0 +- 0) = " +
                          fmt(top));

    double max_slope = 0.0;
    constexpr int probes = 9;
    for (int i = 0; i <= probes; ++i)
        max_slope = std::max(max_slope, phi_prime(pot, window.lo + (window.hi - window.lo) * i / probes));
    const double base_step = hbar / (4.0 * max_slope);

    const auto f = [&](double lambda) { return disc_phases(pot, x0, lambda, hbar).f; };

    std::vector<SemiclassicalLevel> out;
    for (int refine = 0; refine < 4; ++refine) {
        const double step = base_step / std::ldexp(1.0, refine);
        const auto cells = static_cast<long>(std::ceil((window.hi - window.lo) / step));
        out.clear();
        double a = window.lo, fa = f(a);
        for (long i = 1; i <= cells; ++i) {
            const double b = i == cells ? window.hi : window.lo + (window.hi - window.lo) * i / cells;
            const double fb = f(b);
            if (fb == 0.0 && i < cells) {
                SemiclassicalLevel lv;
                lv.lambda = b;
                out.push_back(lv);
            } else if (fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0)) {
                auto tol = [](double l, double r) { return r - l <= level_tolerance(r); };
                std::uintmax_t iters = 200;
                const auto [l, r] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
                if (iters >= 200)
                    throw ConvergenceError("jump condition root not found in [" + fmt(a) + ", " + fmt(b) + "]");
                SemiclassicalLevel lv;
                lv.lambda = 0.5 * (l + r);
                out.push_back(lv);
            }
            a = b;
            fa = fb;
        }
        std::erase_if(out, [&](const SemiclassicalLevel& lv) {
            return lv.lambda - window.lo <= level_tolerance(lv.lambda) ||
                   window.hi - lv.lambda <= level_tolerance(lv.lambda);
        });
        for (auto& lv : out) {
            const DiscPhases d = disc_phases(pot, x0, lv.lambda, hbar);
            lv.hbar = hbar;
            lv.kind = LevelKind::discontinuous;
            lv.residual = std::abs(d.f);
            lv.n = static_cast<int>(std::lround(d.label_phase / pi)) - 1;
            const double c_plus = std::cos(d.theta_plus), s_plus = std::sin(d.theta_plus);
            const double signed_a = std::abs(c_plus) >= std::abs(s_plus)
                                        ? -d.p * std::cos(d.theta_minus) / c_plus
                                        : std::sin(d.theta_minus) / (d.p * s_plus);
            const double c_minus = std::cos(d.theta_minus), s_minus = std::sin(d.theta_minus);
            const double a2 = d.p * d.p * c_minus * c_minus + s_minus * s_minus / (d.p * d.p);
            lv.amplitude_a = std::copysign(std::sqrt(a2), signed_a);
        }
        bool consecutive = true;
        for (std::size_t i = 1; i < out.size(); ++i)
            consecutive = consecutive && out[i].n == out[i - 1].n + 1;
        if (consecutive)
            return out;
    }
    std::ostringstream os;
    os << "jump condition roots could not be separated at hbar " << fmt(hbar) << "; labels";
    for (const auto& lv : out)
        os << ' ' << lv.n << '@' << fmt(lv.lambda);
    throw ConvergenceError(os.str());
}

DiscNormalization disc_normalization(const Potential& pot, const SemiclassicalLevel& level) {
    if (level.kind != LevelKind::discontinuous)
        throw DomainError("disc_normalization needs a discontinuous level");
    const double x0 = find_jump(pot, level.lambda).x;
    const DiscPhases d = disc_phases(pot, x0, level.lambda, level.hbar);
    const double p2 = d.p * d.p;
    const double cm = std::cos(d.theta_minus), sm = std::sin(d.theta_minus);
    const double cp = std::cos(d.theta_plus), sp = std::sin(d.theta_plus);
    DiscNormalization out;
    out.a_squared = p2 * cm * cm + sm * sm / p2;
    out.a_squared_alt = 1.0 / (p2 * sp * sp + cp * cp / p2);
    const Normalization n = disc_constants(pot, level.lambda, level.hbar, x0, std::sqrt(out.a_squared));
    out.c_plus = n.c_plus;
    out.c_minus = n.c_minus;
    return out;
}

std::vector<SemiclassicalLevel> halfline_levels(const Potential& pot, Window window, double hbar, HalfLineBC bc) {
    if (bc.kind == BoundaryKind::dirichlet)
        return action_levels(pot, window, hbar, 0.75, LevelKind::halfline_dirichlet, 0.0);
    return action_levels(pot, window, hbar, 0.25, LevelKind::halfline_robin, bc.b);
}

} // namespace semiclass
