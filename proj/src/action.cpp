#include "semiclass/action.hpp"

#include "semiclass/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace semiclass {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

constexpr double gk_rel_tol = 1e-13;
constexpr std::size_t max_panels = 4000;

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

double apply(Root root, double q) { return root == Root::half ? std::sqrt(q) : 1.0 / std::sqrt(q); }

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

// 15-point Kronrod rule with the embedded 7-point Gauss rule as error estimate.
template <class F>
Panel gk15(F& f, double a, double b) {
    const auto& x = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double f0 = f(mid);
    double k = wk[0] * f0, g = wg[0] * f0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double pair = f(mid + half * x[i]) + f(mid - half * x[i]);
        k += wk[i] * pair;
        if (i % 2 == 0)
            g += wg[i / 2] * pair;
    }
    return {a, b, k * half, std::abs(k - g) * half};
}

// Globally adaptive bisection, worst panel first; accumulates the error estimate.
template <class F>
double integrate(F f, double a, double b, double& err) {
    std::priority_queue<Panel> panels;
    panels.push(gk15(f, a, b));
    double total = panels.top().value, total_err = panels.top().error;
    while (total_err > gk_rel_tol * std::max(1.0, std::abs(total)) && panels.size() < max_panels) {
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b))
            break;
        panels.pop();
        const Panel l = gk15(f, worst.a, mid), r = gk15(f, mid, worst.b);
        total += l.value + r.value - worst.value;
        total_err += l.error + r.error - worst.error;
        panels.push(l);
        panels.push(r);
    }
    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    total_err = 0.0;
    for (; !panels.empty(); panels.pop()) {
        total += panels.top().value;
        total_err += panels.top().error;
    }
    if (!std::isfinite(total))
        throw ConvergenceError("well integral is not finite on [" + fmt(a) + ", " + fmt(b) + "]");
    err += total_err;
    return total;
}

// `sign` = +1 integrates over the well (q = lambda - v), -1 over a forbidden region (q = v - lambda).

// Segment whose end `x_t` is a turning point; x = x_t + dir s^2 with dir pointing into the segment.
double turning_segment(const Potential& pot, double lambda, double x_t, double other, int dir, int sign, Root root,
                       const Weight* w, double& err) {
    const Side inward = dir > 0 ? Side::right : Side::left;
    const Jet at = pot.eval(x_t, inward);
    const double slope = std::abs(at.dv);
    const double length = std::abs(other - x_t);
    // Near x_t, q loses its leading digits to cancellation; use the cubic Taylor model there.
    const double switch_level = 1e-5 * std::max({1.0, std::abs(lambda), std::abs(pot.bottom())});
    const double fd = 1e-5 * std::min(length, 1.0);
    const double d3v = (pot.eval(x_t + dir * fd, inward).d2v - at.d2v) / (dir * fd);
    auto model = [&](double s2) {
        return -sign * (dir * at.dv * s2 + 0.5 * at.d2v * s2 * s2 + dir * d3v * s2 * s2 * s2 / 6.0);
    };
    const Side away = dir > 0 ? Side::left : Side::right; // side selector at the far end
    auto f = [&](double s, bool near) {
        const double s2 = s * s;
        const double x = x_t + dir * s2;
        double q = near ? model(s2) : sign * (lambda - pot.eval(x, s2 < 0.5 * length ? inward : away).v);
        if (!(q > 0.0))
            q = model(s2);
        if (!(q > 0.0))
            return 0.0;
        const double weight = w ? w->fn(x) : 1.0;
        return 2.0 * s * weight * apply(root, q);
    };
    const double end = std::sqrt(length);
    const double split = std::min(end, std::sqrt(switch_level / slope));
    double total = integrate([&](double s) { return f(s, true); }, 0.0, split, err);
    if (split < end)
        total += integrate([&](double s) { return f(s, false); }, split, end, err);
    return total;
}

double plain_segment(const Potential& pot, double lambda, double a, double b, int sign, Root root, const Weight* w,
                     double& err) {
    const double mid = 0.5 * (a + b);
    auto f = [&](double x) {
        const double q = sign * (lambda - pot.eval(x, x < mid ? Side::right : Side::left).v);
        if (!(q > 0.0))
            throw DomainError("q changes sign inside an integration segment at x = " + fmt(x));
        const double weight = w ? w->fn(x) : 1.0;
        return weight * apply(root, q);
    };
    return integrate(f, a, b, err);
}

double segments(const Potential& pot, double lambda, double a, double b, bool left_turning, bool right_turning,
                int sign, Root root, const Weight* w, double* error) {
    double err = 0.0;
    if (a == b) {
        if (error)
            *error = 0.0;
        return 0.0;
    }
    std::vector<double> cuts{a, b};
    for (const auto& s : pot.singular_points())
        if (a < s.x && s.x < b)
            cuts.push_back(s.x);
    if (w)
        for (double d : w->discontinuities)
            if (a < d && d < b)
                cuts.push_back(d);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (cuts.size() == 2 && left_turning && right_turning)
        cuts.insert(cuts.begin() + 1, 0.5 * (a + b));

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double s = cuts[i], e = cuts[i + 1];
        if (i == 0 && left_turning)
            total += turning_segment(pot, lambda, s, e, +1, sign, root, w, err);
        else if (i + 2 == cuts.size() && right_turning)
            total += turning_segment(pot, lambda, e, s, -1, sign, root, w, err);
        else
            total += plain_segment(pot, lambda, s, e, sign, root, w, err);
    }
    if (err > tol_quad * std::max(1.0, std::abs(total)))
        throw ConvergenceError("integral error estimate " + fmt(err) + " exceeds tolerance at lambda = " +
                               fmt(lambda));
    if (error)
        *error = err;
    return total;
}

} // namespace

double well_integral(const Potential& pot, double lambda, const TurningPoints& tp, double a, double b, Root root,
                     const Weight* w, double* error) {
    const double lo = tp.x_minus, hi = tp.x_plus;
    if (!(lo <= a && a <= b && b <= hi))
        throw DomainError("integration range [" + fmt(a) + ", " + fmt(b) + "] is not inside the well [" + fmt(lo) +
                          ", " + fmt(hi) + "]");
    const bool left_turning = pot.domain() == DomainKind::full_line && a == lo;
    return segments(pot, lambda, a, b, left_turning, b == hi, +1, root, w, error);
}

double forbidden_action(const Potential& pot, double lambda, const TurningPoints& tp, double x, WellSide side) {
    if (side == WellSide::plus) {
        if (!(x >= tp.x_plus))
            throw DomainError("x = " + fmt(x) + " is not beyond x+ = " + fmt(tp.x_plus));
        return segments(pot, lambda, tp.x_plus, x, true, false, -1, Root::half, nullptr, nullptr);
    }
    if (pot.domain() == DomainKind::half_line)
        throw DomainError("a half-line well has no forbidden region on the left");
    if (!(x <= tp.x_minus))
        throw DomainError("x = " + fmt(x) + " is not beyond x- = " + fmt(tp.x_minus));
    return segments(pot, lambda, x, tp.x_minus, false, true, -1, Root::half, nullptr, nullptr);
}

ActionProfile phi(const Potential& pot, double lambda) {
    ActionProfile p;
    p.lambda = lambda;
    p.turning = turning_points(pot, lambda, false);
    double e1 = 0.0, e2 = 0.0;
    p.phi = well_integral(pot, lambda, p.turning, p.turning.x_minus, p.turning.x_plus, Root::half, nullptr, &e1);
    p.phi_prime =
        0.5 * well_integral(pot, lambda, p.turning, p.turning.x_minus, p.turning.x_plus, Root::inverse_half, nullptr,
                            &e2);
    p.quadrature_error = e1 + 0.5 * e2;
    return p;
}

double phi_prime(const Potential& pot, double lambda) { return 0.5 * inverse_root_integral(pot, lambda); }

double inverse_root_integral(const Potential& pot, double lambda) {
    const TurningPoints tp = turning_points(pot, lambda, false);
    return well_integral(pot, lambda, tp, tp.x_minus, tp.x_plus, Root::inverse_half);
}

double partial_action(const Potential& pot, double lambda, double x, WellSide side) {
    const TurningPoints tp = turning_points(pot, lambda, false);
    if (!(tp.x_minus <= x && x <= tp.x_plus))
        throw DomainError("x = " + fmt(x) + " is outside the well [" + fmt(tp.x_minus) + ", " + fmt(tp.x_plus) + "]");
    if (side == WellSide::plus)
        return well_integral(pot, lambda, tp, x, tp.x_plus, Root::half);
    return well_integral(pot, lambda, tp, tp.x_minus, x, Root::half);
}

double classical_average(const Potential& pot, double lambda, const Weight& w) {
    if (!w.fn)
        throw DomainError("classical_average needs a weight function");
    const TurningPoints tp = turning_points(pot, lambda, false);
    const double num = well_integral(pot, lambda, tp, tp.x_minus, tp.x_plus, Root::inverse_half, &w);
    const double den = well_integral(pot, lambda, tp, tp.x_minus, tp.x_plus, Root::inverse_half);
    return num / den;
}

double kinetic_cl(const Potential& pot, double lambda) {
    const TurningPoints tp = turning_points(pot, lambda, false);
    const double num = well_integral(pot, lambda, tp, tp.x_minus, tp.x_plus, Root::half);
    const double den = well_integral(pot, lambda, tp, tp.x_minus, tp.x_plus, Root::inverse_half);
    return num / den;
}

double classical_period(const Potential& pot, double lambda, double mass) {
    if (!(mass > 0.0))
        throw DomainError("mass must be positive");
    return std::sqrt(2.0 * mass) * inverse_root_integral(pot, lambda);
}

PowerLawActions power_law_closed_forms(const PowerLawParams& p, double lambda) {
    if (!(lambda > std::max(p.a_plus, p.a_minus)))
        throw DomainError("lambda = " + fmt(lambda) + " is below the well bottom of the power law");
    if (!(p.v_plus > 0.0 && p.v_minus > 0.0 && p.alpha_plus > 0.0 && p.alpha_minus > 0.0))
        throw DomainError("power-law coefficients and exponents must be positive");
    auto half = [](double lam, double v, double alpha, double first) {
        const double r = 1.0 / alpha;
        return std::pow(lam, first + r) * std::pow(v, -r) * r * boost::math::beta(first + 1.0, r);
    };
    const double lp = lambda - p.a_plus, lm = lambda - p.a_minus;
    PowerLawActions out;
    out.phi_plus0 = half(lp, p.v_plus, p.alpha_plus, 0.5);
    out.phi_minus0 = half(lm, p.v_minus, p.alpha_minus, 0.5);
    out.inv_plus = half(lp, p.v_plus, p.alpha_plus, -0.5);
    out.inv_minus = half(lm, p.v_minus, p.alpha_minus, -0.5);
    out.phi = out.phi_plus0 + out.phi_minus0;
    out.phi_prime = 0.5 * (out.inv_plus + out.inv_minus);
    out.kinetic = out.phi / (out.inv_plus + out.inv_minus);
    return out;
}

} // namespace semiclass
