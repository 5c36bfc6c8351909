#pragma once

#include "semiclass/langer.hpp"
#include "semiclass/level.hpp"
#include "semiclass/potential.hpp"

#include <vector>

namespace semiclass {

struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

/// Root tolerance in lambda: 1e-12 max(1, |lambda|).
double level_tolerance(double lambda);

/// Levels with Phi(lambda) = pi (n + 1/2) hbar inside the window, one per n, ascending.
/// The window may start at or below the bottom of the well (Phi is 0 there).
/// Throws CertificationError(unsupported_singularity) if v jumps inside the well.
std::vector<SemiclassicalLevel> bs_levels(const Potential& pot, Window window, double hbar);

struct CountResult {
    Window window;
    double hbar = 0.0;
    double predicted = 0.0;    ///< (Phi(a2) - Phi(a1)) / (pi hbar)
    int count = 0;             ///< n with pi (n + 1/2) hbar in (Phi(a1), Phi(a2))
    double epsilon = 0.0;      ///< count - predicted
    double phase_volume = 0.0; ///< area of {xi^2 + v(x) in (a1, a2)} = 2 (Phi(a2) - Phi(a1))
};

CountResult weyl_count(const Potential& pot, double a1, double a2, double hbar);

/// count - (Phi(a2) - Phi(a1)) / (pi hbar) for an externally obtained count.
double weyl_remainder(const Potential& pot, double a1, double a2, double hbar, int count);

/// ((lambda - v(x0 - 0)) / (lambda - v(x0 + 0)))^{1/4}.
double discontinuity_ratio(const Potential& pot, double x0, double lambda);

struct DiscPhases {
    double p = 1.0;
    double theta_plus = 0.0;  ///< phi+(x0) / hbar + pi/4
    double theta_minus = 0.0; ///< phi-(x0) / hbar + pi/4
    double f = 0.0;           ///< p sin th+ cos th- + p^{-1} cos th+ sin th-
    double label_phase = 0.0; ///< beta+ + th- with tan beta+ = p^2 tan th+, continuous in lambda
};

DiscPhases disc_phases(const Potential& pot, double x0, double lambda, double hbar);

/// F(lambda) at the single jump of v inside the well (or its single derivative-class singular point).
double disc_function(const Potential& pot, double lambda, double hbar);

/// Roots of F in the window by sign scanning and bracketed refinement, labelled by
/// n = round(label_phase / pi) - 1.  Requires exactly one jump of v inside the well (or, for a
/// zero jump, exactly one singular point of any class) and
/// max(v(x0 +- 0)) below the window.
std::vector<SemiclassicalLevel> disc_levels(const Potential& pot, Window window, double hbar);

struct DiscNormalization {
    double c_plus = 0.0;
    double c_minus = 0.0;
    double a_squared = 1.0;     ///< p^2 cos^2 th- + p^{-2} sin^2 th-
    double a_squared_alt = 1.0; ///< 1 / (p^2 sin^2 th+ + p^{-2} cos^2 th+)
};

DiscNormalization disc_normalization(const Potential& pot, const SemiclassicalLevel& level);

enum class BoundaryKind { dirichlet, robin };

struct HalfLineBC {
    BoundaryKind kind = BoundaryKind::dirichlet;
    double b = 0.0; ///< psi'(0) = b psi(0); unused at leading order
};

/// int_0^{x+} (lambda - v)^{1/2} = pi hbar (n + 3/4) (Dirichlet) or pi hbar (n + 1/4) (Robin).
std::vector<SemiclassicalLevel> halfline_levels(const Potential& pot, Window window, double hbar, HalfLineBC bc);

} // namespace semiclass
