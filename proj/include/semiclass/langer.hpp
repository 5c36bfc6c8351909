#pragma once

#include "semiclass/action.hpp"
#include "semiclass/level.hpp"
#include "semiclass/potential.hpp"

#include <optional>
#include <vector>

namespace semiclass {

inline constexpr std::size_t default_chart_nodes = 64;

/// The Langer variable xi on one side of the well: xi' ^2 xi = v - lambda, xi(x_t) = 0,
/// negative inside the well.  The + chart lives on [x1, inf), the - chart on (-inf, x1].
///
/// xi is memoized on Chebyshev-Lobatto nodes over [x1, x_t + 2 (x_t - x1)] (split at singular
/// points of v) and interpolated barycentrically; beyond that range it is integrated directly.
/// Within collar_width() of the turning point a Taylor model replaces quadrature.
class LangerChart {
public:
    /// x1 defaults to the midpoint of the well (0 on the half line).
    LangerChart(const Potential& pot, double lambda, WellSide side, std::optional<double> x1 = std::nullopt,
                std::size_t nodes = default_chart_nodes);

    double xi(double x) const;
    double xi_prime(double x) const;
    /// From differentiating xi'^2 xi = q; the Taylor model inside the collar.
    double xi_second(double x) const;

    /// v - lambda with the one-sided limit taken from the chart's side at x1.
    double q(double x) const;

    WellSide side() const { return side_; }
    double lambda() const { return lambda_; }
    const TurningPoints& turning() const { return tp_; }
    double turning_point() const { return side_ == WellSide::plus ? tp_.x_plus : tp_.x_minus; }
    double match_point() const { return x1_; }
    double collar_width() const { return collar_; }
    bool in_collar(double x) const;
    bool contains(double x) const;
    const Potential& potential() const { return pot_; }
    std::size_t nodes_per_piece() const { return nodes_; }

    /// xi from quadrature or the collar model, bypassing the memo.
    double xi_direct(double x) const;

private:
    struct Piece {
        double lo, hi;
        std::vector<double> x, f, w;
    };

    double xi_model(double x) const;
    double xi_model_prime(double x) const;
    double interpolate(const Piece& p, double x) const;
    void check(double x) const;
    Side side_selector() const { return side_ == WellSide::plus ? Side::right : Side::left; }

    Potential pot_;
    double lambda_;
    WellSide side_;
    TurningPoints tp_;
    double x1_;
    double collar_;
    double model_a_ = 0.0, model_b_ = 0.0, model_c_ = 0.0;
    std::size_t nodes_;
    std::vector<Piece> pieces_;
};

/// p(x) with -16 p = 5 xi^{-2} + xi (4 q^{-2} q'' - 5 q^{-3} q'^2).  Throws DomainError at the
/// turning point and at singular points of v.
double error_control(const LangerChart& chart, double x);

/// |xi'|^{-1/2} Ai(hbar^{-2/3} xi).
double uniform_u(const LangerChart& chart, double hbar, double x);

/// Derivative of uniform_u; throws DomainError inside the collar.
double uniform_u_prime(const LangerChart& chart, double hbar, double x);

struct Normalization {
    double c_plus = 0.0;  ///< |c+|
    double c_minus = 0.0; ///< |c-|
    double a = 1.0;       ///< u- = a u+
};

/// Smooth-well constants: |c+-| = (2 pi)^{1/2} hbar^{-1/6} (int (lambda - v)^{-1/2})^{-1/2}, a = (-1)^n.
Normalization normalization(const Potential& pot, double lambda, double hbar, int n);

/// Constants for a well split at a jump x0 of v, given u- = a u+:
/// |c+| = (2 pi)^{1/2} hbar^{-1/6} (I+ + a^{-2} I-)^{-1/2}, |c-| the same with a^2 I+ + I-,
/// where I+- are the integrals of (lambda - v)^{-1/2} on either side of x0.
Normalization disc_constants(const Potential& pot, double lambda, double hbar, double x0, double a);

/// Leading-order eigenfunction c+ u+ (x >= x1), c- u- (x < x1), with c+ > 0 and c- = c+ / a.
/// On the half line only the + chart is used.
class Eigenfunction {
public:
    Eigenfunction(const Potential& pot, const SemiclassicalLevel& level, std::size_t nodes = default_chart_nodes);

    double operator()(double x) const;

    const SemiclassicalLevel& level() const { return level_; }
    const Normalization& constants() const { return norm_; }
    double match_point() const { return x1_; }
    const LangerChart& chart(WellSide side) const;

    /// |c+ u+(x1) - c- u-(x1)| relative to the local envelope c+ (u+^2 + hbar^2 u+'^2 / |q|)^{1/2};
    /// 0 on the half line.
    double mismatch() const;

    /// alpha+ hbar^{-1/6}: the leading value of |psi(x+)|.
    double peak_prediction() const;

private:
    Potential pot_;
    SemiclassicalLevel level_;
    double x1_;
    Normalization norm_;
    std::optional<LangerChart> plus_, minus_;
};

} // namespace semiclass
