#include "semiclass/langer.hpp"

#include "semiclass/airy.hpp"
#include "semiclass/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace semiclass {

namespace {

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

constexpr std::size_t max_chart_nodes = 1024;
constexpr int probes_per_piece = 9;

std::vector<double> lobatto(double lo, double hi, std::size_t n) {
    std::vector<double> x(n);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t j = 0; j < n; ++j)
        x[j] = mid - half * std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(n - 1));
    x.front() = lo;
    x.back() = hi;
    return x;
}

// Ai and Ai' at t, through the scaled pair for t >= 0 so deep decay underflows gracefully.
std::pair<double, double> airy_ai(double t) {
    if (t >= 0.0) {
        const AiryScaled s = airy_scaled(t);
        const double decay = std::exp(-s.zeta);
        return {s.ai * decay, s.ai_prime * decay};
    }
    const AiryValues v = airy_eval(t);
    return {v.ai, v.ai_prime};
}

const SingularPoint* jump_in_well(const Potential& pot, const TurningPoints& tp) {
    for (const auto& s : pot.singular_points())
        if (s.kind == Singularity::value_jump && tp.x_minus < s.x && s.x < tp.x_plus)
            return &s;
    return nullptr;
}

} // namespace

const char* to_string(LevelKind kind) {
    switch (kind) {
    case LevelKind::smooth: return "smooth";
    case LevelKind::discontinuous: return "discontinuous";
    case LevelKind::halfline_dirichlet: return "halfline_dirichlet";
    case LevelKind::halfline_robin: return "halfline_robin";
    }
    return "unknown";
}

LangerChart::LangerChart(const Potential& pot, double lambda, WellSide side, std::optional<double> x1,
                         std::size_t nodes)
    : pot_(pot), lambda_(lambda), side_(side), tp_(turning_points(pot, lambda, false)), nodes_(nodes) {
    const bool half = pot.domain() == DomainKind::half_line;
    if (half && side == WellSide::minus)
        throw DomainError("a half-line well has no left turning point");
    if (nodes < 4)
        throw DomainError("a chart needs at least 4 nodes per piece");
    x1_ = x1.value_or(half ? 0.0 : tp_.midpoint());
    if (!(tp_.x_minus <= x1_ && x1_ <= tp_.x_plus) || x1_ == turning_point())
        throw DomainError("match point " + fmt(x1_) + " is not inside the well");
    collar_ = std::max(1e-3, std::cbrt(tol_quad)) * tp_.width();

    const double xt = turning_point();
    const Side inward = side == WellSide::plus ? Side::left : Side::right;
    const Jet at = pot.eval(xt, inward);
    const double h = 1e-4 * tp_.width();
    const double v3 = (pot.eval(xt + h, Side::left).d2v - pot.eval(xt - h, Side::right).d2v) / (2.0 * h);
    model_a_ = std::cbrt(at.dv);
    model_b_ = at.d2v / (10.0 * at.dv);
    model_c_ = (v3 / (6.0 * at.dv) - 8.0 * model_b_ * model_b_) / 7.0;

    const double far = xt + 2.0 * (xt - x1_);
    const double lo = std::min(x1_, far), hi = std::max(x1_, far);
    std::vector<double> cuts{lo, hi};
    for (const auto& s : pot.singular_points())
        if (lo < s.x && s.x < hi)
            cuts.push_back(s.x);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Piece piece{cuts[i], cuts[i + 1], {}, {}, {}};
        double scale = 1.0;
        for (std::size_t n = nodes_;; n *= 2) {
            piece.x = lobatto(piece.lo, piece.hi, n);
            piece.f.resize(n);
            piece.w.assign(n, 1.0);
            for (std::size_t j = 0; j < n; ++j) {
                piece.f[j] = xi_direct(piece.x[j]);
                piece.w[j] = (j % 2 ? -1.0 : 1.0) * (j == 0 || j + 1 == n ? 0.5 : 1.0);
                scale = std::max(scale, std::abs(piece.f[j]));
            }
            double worst = 0.0;
            for (int k = 0; k < probes_per_piece; ++k) {
                const double x = piece.lo + (piece.hi - piece.lo) * (k + 0.37) / probes_per_piece;
                if (in_collar(x))
                    continue;
                worst = std::max(worst, std::abs(interpolate(piece, x) - xi_direct(x)));
            }
            if (worst <= 1e-10 * scale)
                break;
            if (2 * n > max_chart_nodes)
                throw ConvergenceError("chart interpolation did not reach 1e-10 on [" + fmt(piece.lo) + ", " +
                                       fmt(piece.hi) + "]");
        }
        nodes_ = std::max(nodes_, piece.x.size());
        pieces_.push_back(std::move(piece));
    }
}

bool LangerChart::in_collar(double x) const { return std::abs(x - turning_point()) < collar_; }

bool LangerChart::contains(double x) const { return side_ == WellSide::plus ? x >= x1_ : x <= x1_; }

void LangerChart::check(double x) const {
    if (!contains(x))
        throw DomainError("x = " + fmt(x) + " is outside the chart's half-domain (match point " + fmt(x1_) + ")");
}

double LangerChart::q(double x) const { return pot_.eval(x, side_selector()).v - lambda_; }

double LangerChart::xi_model(double x) const {
    const double s = x - turning_point();
    return model_a_ * s * (1.0 + model_b_ * s + model_c_ * s * s);
}

double LangerChart::xi_model_prime(double x) const {
    const double s = x - turning_point();
    return model_a_ * (1.0 + 2.0 * model_b_ * s + 3.0 * model_c_ * s * s);
}

double LangerChart::xi_direct(double x) const {
    check(x);
    if (in_collar(x))
        return xi_model(x);
    double integral;
    bool forbidden;
    if (side_ == WellSide::plus) {
        forbidden = x >= tp_.x_plus;
        integral = forbidden ? forbidden_action(pot_, lambda_, tp_, x, side_)
                             : well_integral(pot_, lambda_, tp_, x, tp_.x_plus, Root::half);
    } else {
        forbidden = x <= tp_.x_minus;
        integral = forbidden ? forbidden_action(pot_, lambda_, tp_, x, side_)
                             : well_integral(pot_, lambda_, tp_, tp_.x_minus, x, Root::half);
    }
    const double r = std::pow(1.5 * integral, 2.0 / 3.0);
    return forbidden ? r : -r;
}

double LangerChart::interpolate(const Piece& p, double x) const {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < p.x.size(); ++j) {
        const double d = x - p.x[j];
        if (d == 0.0)
            return p.f[j];
        const double t = p.w[j] / d;
        num += t * p.f[j];
        den += t;
    }
    return num / den;
}

double LangerChart::xi(double x) const {
    check(x);
    if (in_collar(x))
        return xi_model(x);
    for (const auto& p : pieces_)
        if (p.lo <= x && x <= p.hi)
            return interpolate(p, x);
    return xi_direct(x);
}

double LangerChart::xi_prime(double x) const {
    check(x);
    if (in_collar(x))
        return xi_model_prime(x);
    const double r = std::sqrt(q(x) / xi(x));
    return side_ == WellSide::plus ? r : -r;
}

double LangerChart::xi_second(double x) const {
    check(x);
    if (in_collar(x)) {
        const double s = x - turning_point();
        return model_a_ * (2.0 * model_b_ + 6.0 * model_c_ * s);
    }
    const double d = xi_prime(x);
    const double dq = pot_.eval(x, side_selector()).dv;
    return (dq - d * d * d) / (2.0 * d * xi(x));
}

double error_control(const LangerChart& chart, double x) {
    if (x == chart.turning_point())
        throw DomainError("error_control is singular at the turning point");
    const Jet j = chart.potential().eval(x);
    const double q = j.v - chart.lambda();
    if (q == 0.0)
        throw DomainError("error_control is singular where v = lambda");
    const double xi = chart.xi(x);
    const double rhs = 5.0 / (xi * xi) + xi * (4.0 * j.d2v / (q * q) - 5.0 * j.dv * j.dv / (q * q * q));
    return -rhs / 16.0;
}

double uniform_u(const LangerChart& chart, double hbar, double x) {
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    const double t = chart.xi(x) * std::pow(hbar, -2.0 / 3.0);
    return airy_ai(t).first / std::sqrt(std::abs(chart.xi_prime(x)));
}

double uniform_u_prime(const LangerChart& chart, double hbar, double x) {
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    if (chart.in_collar(x))
        throw DomainError("uniform_u_prime is not available within the collar of the turning point");
    const double scale = std::pow(hbar, -2.0 / 3.0);
    const auto [ai, aip] = airy_ai(chart.xi(x) * scale);
    const double d = chart.xi_prime(x);
    const double ad = std::abs(d);
    const double body = std::sqrt(ad) * scale * aip - 0.5 * std::pow(ad, -1.5) * chart.xi_second(x) * ai;
    return d > 0.0 ? body : -body;
}

namespace {

// Composes u = |xi'|^{-1/2} Ai with Ai(-t) ~ pi^{-1/2} t^{-1/4} sin(2 t^{3/2} / 3 + pi / 4), so
// u^2 averages to hbar^{1/3} |q|^{-1/2} / (2 pi) over the well.
double prefactor(double hbar) { return std::sqrt(2.0 * std::numbers::pi) * std::pow(hbar, -1.0 / 6.0); }

Normalization split_constants(const Potential& pot, double lambda, double hbar, double x0, double a) {
    if (!(a != 0.0) || !std::isfinite(a))
        throw DomainError("amplitude a must be finite and nonzero");
    const TurningPoints tp = turning_points(pot, lambda, false);
    const double ip = well_integral(pot, lambda, tp, x0, tp.x_plus, Root::inverse_half);
    const double im = well_integral(pot, lambda, tp, tp.x_minus, x0, Root::inverse_half);
    const double a2 = a * a;
    return {prefactor(hbar) / std::sqrt(ip + im / a2), prefactor(hbar) / std::sqrt(a2 * ip + im), a};
}

} // namespace

Normalization normalization(const Potential& pot, double lambda, double hbar, int n) {
    if (n < 0)
        throw DomainError("normalization needs a quantum number n >= 0");
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    const double c = prefactor(hbar) / std::sqrt(inverse_root_integral(pot, lambda));
    return {c, c, n % 2 == 0 ? 1.0 : -1.0};
}

Normalization disc_constants(const Potential& pot, double lambda, double hbar, double x0, double a) {
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    return split_constants(pot, lambda, hbar, x0, a);
}

Eigenfunction::Eigenfunction(const Potential& pot, const SemiclassicalLevel& level, std::size_t nodes)
    : pot_(pot), level_(level) {
    const TurningPoints tp = turning_points(pot, level.lambda, false);
    const SingularPoint* jump = jump_in_well(pot, tp);
    switch (level.kind) {
    case LevelKind::smooth:
        if (pot.domain() != DomainKind::full_line || jump)
            throw DomainError("smooth level does not match this potential");
        x1_ = tp.midpoint();
        norm_ = normalization(pot, level.lambda, level.hbar, level.n);
        break;
    case LevelKind::discontinuous:
        if (!jump)
            throw DomainError("discontinuous level needs a jump of v inside the well");
        x1_ = jump->x;
        norm_ = split_constants(pot, level.lambda, level.hbar, x1_, level.amplitude_a);
        break;
    case LevelKind::halfline_dirichlet:
    case LevelKind::halfline_robin:
        if (pot.domain() != DomainKind::half_line)
            throw DomainError("half-line level does not match this potential");
        x1_ = 0.0;
        norm_ = normalization(pot, level.lambda, level.hbar, level.n);
        norm_.c_minus = 0.0;
        break;
    }
    plus_.emplace(pot, level.lambda, WellSide::plus, x1_, nodes);
    if (pot.domain() == DomainKind::full_line)
        minus_.emplace(pot, level.lambda, WellSide::minus, x1_, nodes);
}

const LangerChart& Eigenfunction::chart(WellSide side) const {
    if (side == WellSide::minus && !minus_)
        throw DomainError("a half-line eigenfunction has no - chart");
    return side == WellSide::plus ? *plus_ : *minus_;
}

double Eigenfunction::operator()(double x) const {
    if (x >= x1_)
        return norm_.c_plus * uniform_u(*plus_, level_.hbar, x);
    if (!minus_)
        throw DomainError("x = " + fmt(x) + " is outside the half line");
    const double sign = norm_.a < 0.0 ? -1.0 : 1.0;
    return sign * norm_.c_minus * uniform_u(*minus_, level_.hbar, x);
}

double Eigenfunction::mismatch() const {
    if (!minus_)
        return 0.0;
    const double hbar = level_.hbar;
    const double u = uniform_u(*plus_, hbar, x1_);
    const double right = norm_.c_plus * u;
    const double left = (norm_.a < 0.0 ? -1.0 : 1.0) * norm_.c_minus * uniform_u(*minus_, hbar, x1_);
    // Local oscillation envelope of c+ u+, so the measure stays meaningful at a node.
    const double du = hbar * uniform_u_prime(*plus_, hbar, x1_) / std::sqrt(std::abs(plus_->q(x1_)));
    const double envelope = norm_.c_plus * std::hypot(u, du);
    return envelope > 0.0 ? std::abs(right - left) / envelope : 0.0;
}

double Eigenfunction::peak_prediction() const {
    const double slope = std::abs(plus_->turning().slope_plus);
    return norm_.c_plus * std::pow(slope, -1.0 / 6.0) * airy_eval(0.0).ai;
}

} // namespace semiclass
