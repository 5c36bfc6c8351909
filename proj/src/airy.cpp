#include "semiclass/airy.hpp"

#include "semiclass/error.hpp"

#include <array>
#include <cmath>

namespace semiclass {

namespace {

using Real = long double;

constexpr Real ai0 = 0.355028053887817239260063186004183176L;
constexpr Real ai0_prime = -0.258819403792806798405183560189203963L;
constexpr Real bi0 = 0.614926627446000735150922369093613554L;
constexpr Real bi0_prime = 0.448288357353826357914823710398828391L;
constexpr Real inv_sqrt_pi = 0.564189583547756286948079451560772586L;
constexpr Real quarter_pi = 0.785398163397448309615660845819875721L;

constexpr Real center_spacing = 0.5L;
constexpr int center_count = 41; // -10, -9.5, ..., 10
constexpr int zero_center = 20;

struct Pair {
    Real w;
    Real dw;
};

// Taylor expansion of a solution of w'' = t w about t = c, evaluated at c + h.
Pair taylor(Real c, Pair at_c, Real h) {
    Real a_prev = 0.0L; // a_{k-1}
    Real ak = at_c.w;   // a_k
    Real ak1 = at_c.dw; // a_{k+1}
    Real w = ak + ak1 * h;
    Real dw = ak1;
    Real hk = h;      // h^{k+1}
    Real hk2 = h * h; // h^{k+2}
    const Real scale = std::abs(at_c.w) + std::abs(at_c.dw) * (1.0L + std::abs(c));
    int quiet = 0;
    for (int k = 0; k < 160 && quiet < 2; ++k) {
        const Real next = (c * ak + a_prev) / static_cast<Real>((k + 2) * (k + 1)); // a_{k+2}
        const Real term = next * hk2;
        const Real dterm = static_cast<Real>(k + 2) * next * hk;
        w += term;
        dw += dterm;
        a_prev = ak;
        ak = ak1;
        ak1 = next;
        hk *= h;
        hk2 *= h;
        quiet = std::abs(term) + std::abs(dterm) <= 1e-24L * scale ? quiet + 1 : 0;
    }
    return {w, dw};
}

constexpr int asym_terms = 64;

struct AsymCoeffs {
    std::array<Real, asym_terms> u{};
    std::array<Real, asym_terms> v{};
};

const AsymCoeffs& asym_coeffs() {
    static const AsymCoeffs c = [] {
        AsymCoeffs r;
        r.u[0] = 1.0L;
        r.v[0] = 1.0L;
        for (int k = 1; k < asym_terms; ++k) {
            const Real kk = k;
            r.u[k] = r.u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216 * kk);
            r.v[k] = -(6 * kk + 1) / (6 * kk - 1) * r.u[k];
        }
        return r;
    }();
    return c;
}

// sum_k sign^k c_k z^{-k} over k = first, first + stride, ..., truncated at the smallest term.
Real asym_sum(const std::array<Real, asym_terms>& c, Real zeta, int first, int stride, Real alternate) {
    Real sum = 0.0L;
    Real prev = HUGE_VALL;
    Real sign = 1.0L;
    for (int k = first; k < asym_terms; k += stride) {
        const Real term = sign * c[k] * std::pow(zeta, -static_cast<Real>(k));
        if (std::abs(term) >= std::abs(prev))
            break;
        sum += term;
        prev = term;
        if (std::abs(term) <= 1e-22L * std::abs(sum))
            break;
        sign *= alternate;
    }
    return sum;
}

// Scaled values for t > 0, without the e^{-+zeta} factors.
struct ScaledReal {
    Real ai, ai_prime, bi, bi_prime, zeta;
};

ScaledReal asymptotic_plus(Real t) {
    const auto& c = asym_coeffs();
    const Real zeta = 2.0L / 3.0L * t * std::sqrt(t);
    const Real q = std::pow(t, 0.25L);
    return {
        0.5L * inv_sqrt_pi / q * asym_sum(c.u, zeta, 0, 1, -1.0L),
        -0.5L * inv_sqrt_pi * q * asym_sum(c.v, zeta, 0, 1, -1.0L),
        inv_sqrt_pi / q * asym_sum(c.u, zeta, 0, 1, 1.0L),
        inv_sqrt_pi * q * asym_sum(c.v, zeta, 0, 1, 1.0L),
        zeta,
    };
}

AiryValues asymptotic_minus(Real t) {
    const auto& c = asym_coeffs();
    const Real x = -t;
    const Real zeta = 2.0L / 3.0L * x * std::sqrt(x);
    const Real q = std::pow(x, 0.25L);
    const Real pu = asym_sum(c.u, zeta, 0, 2, -1.0L);
    const Real qu = asym_sum(c.u, zeta, 1, 2, -1.0L);
    const Real pv = asym_sum(c.v, zeta, 0, 2, -1.0L);
    const Real qv = asym_sum(c.v, zeta, 1, 2, -1.0L);
    const Real s = std::sin(zeta - quarter_pi);
    const Real co = std::cos(zeta - quarter_pi);
    return {
        static_cast<double>(inv_sqrt_pi / q * (co * pu + s * qu)),
        static_cast<double>(inv_sqrt_pi * q * (s * pv - co * qv)),
        static_cast<double>(inv_sqrt_pi / q * (-s * pu + co * qu)),
        static_cast<double>(inv_sqrt_pi * q * (co * pv + s * qv)),
        AiryMethod::asymptotic_minus,
    };
}

struct CenterTable {
    std::array<Pair, center_count> ai{};
    std::array<Pair, center_count> bi{};
};

Real center_of(int j) { return static_cast<Real>(j - zero_center) * center_spacing; }

// Ai is carried inward from the asymptotic value at the right end (stable direction for a
// decaying solution); Bi and the oscillatory side are carried outward from t = 0.
const CenterTable& centers() {
    static const CenterTable table = [] {
        CenterTable tab;
        tab.ai[zero_center] = {ai0, ai0_prime};
        tab.bi[zero_center] = {bi0, bi0_prime};
        for (int j = zero_center - 1; j >= 0; --j) {
            tab.ai[j] = taylor(center_of(j + 1), tab.ai[j + 1], -center_spacing);
            tab.bi[j] = taylor(center_of(j + 1), tab.bi[j + 1], -center_spacing);
        }
        for (int j = zero_center + 1; j < center_count; ++j)
            tab.bi[j] = taylor(center_of(j - 1), tab.bi[j - 1], center_spacing);
        const Real right = center_of(center_count - 1);
        const ScaledReal s = asymptotic_plus(right);
        const Real decay = std::exp(-s.zeta);
        tab.ai[center_count - 1] = {s.ai * decay, s.ai_prime * decay};
        for (int j = center_count - 2; j > zero_center; --j)
            tab.ai[j] = taylor(center_of(j + 1), tab.ai[j + 1], -center_spacing);
        return tab;
    }();
    return table;
}

} // namespace

namespace detail {

AiryValues airy_series(double t) {
    if (!(std::abs(t) <= airy_switch))
        throw DomainError("airy_series: |t| exceeds the series range");
    const auto& tab = centers();
    const int j = static_cast<int>(std::lround((static_cast<Real>(t) + 10.0L) / center_spacing));
    const Real c = center_of(j);
    const Real h = static_cast<Real>(t) - c;
    const Pair a = taylor(c, tab.ai[j], h);
    const Pair b = taylor(c, tab.bi[j], h);
    return {static_cast<double>(a.w), static_cast<double>(a.dw), static_cast<double>(b.w), static_cast<double>(b.dw),
            AiryMethod::series};
}

AiryValues airy_asymptotic(double t) {
    if (t == 0.0 || !std::isfinite(t))
        throw DomainError("airy_asymptotic needs finite nonzero t");
    if (t < 0.0)
        return asymptotic_minus(t);
    const ScaledReal s = asymptotic_plus(t);
    const Real decay = std::exp(-s.zeta);
    const Real growth = std::exp(s.zeta);
    return {static_cast<double>(s.ai * decay), static_cast<double>(s.ai_prime * decay),
            static_cast<double>(s.bi * growth), static_cast<double>(s.bi_prime * growth), AiryMethod::asymptotic_plus};
}

} // namespace detail

AiryValues airy_eval(double t) {
    if (std::isnan(t))
        throw DomainError("airy_eval: t is NaN");
    if (std::abs(t) < airy_switch)
        return detail::airy_series(t);
    return detail::airy_asymptotic(t);
}

AiryScaled airy_scaled(double t) {
    if (!(t >= 0.0))
        throw DomainError("airy_scaled requires t >= 0");
    if (t < airy_switch) {
        const AiryValues v = detail::airy_series(t);
        const Real zeta = 2.0L / 3.0L * t * std::sqrt(static_cast<Real>(t));
        const Real up = std::exp(zeta);
        const Real down = std::exp(-zeta);
        return {static_cast<double>(v.ai * up), static_cast<double>(v.ai_prime * up),
                static_cast<double>(v.bi * down), static_cast<double>(v.bi_prime * down), static_cast<double>(zeta)};
    }
    const ScaledReal s = asymptotic_plus(t);
    return {static_cast<double>(s.ai), static_cast<double>(s.ai_prime), static_cast<double>(s.bi),
            static_cast<double>(s.bi_prime), static_cast<double>(s.zeta)};
}

} // namespace semiclass
