#pragma once

namespace semiclass {

/// How airy_eval produced its values.
enum class AiryMethod { series, asymptotic_plus, asymptotic_minus };

struct AiryValues {
    double ai = 0.0;
    double ai_prime = 0.0;
    double bi = 0.0;
    double bi_prime = 0.0;
    AiryMethod method = AiryMethod::series;
};

/// Exponentially rescaled values for t >= 0:
/// ai = Ai(t) e^{zeta}, bi = Bi(t) e^{-zeta}, zeta = 2 t^{3/2} / 3 (likewise for derivatives).
struct AiryScaled {
    double ai = 0.0;
    double ai_prime = 0.0;
    double bi = 0.0;
    double bi_prime = 0.0;
    double zeta = 0.0;
};

/// |t| at and beyond which the asymptotic expansions are used.
inline constexpr double airy_switch = 10.0;

/// Ai, Ai', Bi, Bi' on the real line.  Bi overflows to +inf for t beyond ~104;
/// use airy_scaled there.
AiryValues airy_eval(double t);

/// Throws DomainError for t < 0.
AiryScaled airy_scaled(double t);

namespace detail {

/// Local Taylor expansion about the nearest tabulated center; valid for |t| <= airy_switch.
AiryValues airy_series(double t);

/// Asymptotic expansion truncated at the smallest term; any t != 0.
AiryValues airy_asymptotic(double t);

} // namespace detail

} // namespace semiclass
