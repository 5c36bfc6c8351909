#pragma once

#include "semiclass/potential.hpp"

#include <functional>
#include <vector>

namespace semiclass {

/// Absolute quadrature tolerance for all well integrals (scaled by max(1, |I|)).
inline constexpr double tol_quad = 1e-10;

struct ActionProfile {
    double lambda = 0.0;
    double phi = 0.0;       ///< integral of (lambda - v)^{1/2} over the well
    double phi_prime = 0.0; ///< half the integral of (lambda - v)^{-1/2}
    TurningPoints turning;
    double quadrature_error = 0.0;
};

/// A weight for classical averages, with the points where it may jump.
struct Weight {
    std::function<double(double)> fn;
    std::vector<double> discontinuities;
};

enum class WellSide { minus, plus };

/// Which power of (lambda - v) a well integral uses.
enum class Root { half, inverse_half };

/// Integral of w (lambda - v)^{+-1/2} over [a, b], a subinterval of the well at lambda.
/// Ends that coincide with a turning point are desingularized by x = x_t -+ s^2;
/// interior singular points of v and the weight's jumps split the range.
/// `error`, if given, receives the summed Gauss-Kronrod estimate.
double well_integral(const Potential& pot, double lambda, const TurningPoints& tp, double a, double b, Root root,
                     const Weight* w = nullptr, double* error = nullptr);

/// int (v - lambda)^{1/2} between the turning point on `side` and x beyond it.
double forbidden_action(const Potential& pot, double lambda, const TurningPoints& tp, double x, WellSide side);

/// Action and its derivative.  On the half line the well is [0, x+].
ActionProfile phi(const Potential& pot, double lambda);

double phi_prime(const Potential& pot, double lambda);

/// phi_+(x) = int_x^{x+} (lambda - v)^{1/2}, phi_-(x) = int_{x-}^x (lambda - v)^{1/2}.
/// Throws DomainError unless x lies in the closed well.
double partial_action(const Potential& pot, double lambda, double x, WellSide side);

/// int w (lambda - v)^{-1/2} / int (lambda - v)^{-1/2} over the well.
double classical_average(const Potential& pot, double lambda, const Weight& w);

/// int (lambda - v)^{1/2} / int (lambda - v)^{-1/2}.
double kinetic_cl(const Potential& pot, double lambda);

/// (2m)^{1/2} int (lambda - v)^{-1/2}.
double classical_period(const Potential& pot, double lambda, double mass);

/// Integral of (lambda - v)^{-1/2} from the wall at 0 (half line) or x- to x+.
double inverse_root_integral(const Potential& pot, double lambda);

struct PowerLawActions {
    double phi_plus0 = 0.0;  ///< phi_+(0)
    double phi_minus0 = 0.0; ///< phi_-(0)
    double phi = 0.0;
    double phi_prime = 0.0;
    double kinetic = 0.0;
    double inv_plus = 0.0;  ///< int_0^{x+} (lambda - v)^{-1/2}
    double inv_minus = 0.0; ///< int_{x-}^0 (lambda - v)^{-1/2}
};

/// Beta-function forms of the half-well integrals of the two-branch power law.
/// Throws DomainError for lambda <= max(a+, a-).
PowerLawActions power_law_closed_forms(const PowerLawParams& params, double lambda);

} // namespace semiclass
