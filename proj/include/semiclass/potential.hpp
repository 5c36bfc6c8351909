#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace semiclass {

/// Value of the potential and its first two derivatives at a point.
struct Jet {
    double v = 0.0;
    double dv = 0.0;
    double d2v = 0.0;
};

/// A smooth branch of the potential; must be C^2 on its piece.
using BranchFn = std::function<Jet(double)>;

namespace branch {

/// sum_k coeffs[k] * (x - origin)^k
BranchFn poly(std::vector<double> coeffs, double origin = 0.0);

/// offset + scale * |x - origin|^exponent.  `orientation` (+1 or -1) is the side of
/// the origin this branch serves; it fixes the sign of one-sided derivatives at the origin.
BranchFn power(double offset, double scale, double exponent, double origin = 0.0, int orientation = 1);

/// offset + scale * exp(rate * (x - center)^2)
BranchFn exp_quadratic(double offset, double scale, double rate, double center = 0.0);

} // namespace branch

/// Side selector for one-sided evaluation at a singular point.
enum class Side { none, left, right };

enum class DomainKind { full_line, half_line };

/// Strongest discontinuity class at a breakpoint.
enum class Singularity { value_jump, slope_jump, curvature_jump };

const char* to_string(Singularity kind);

struct SingularPoint {
    double x = 0.0;
    Singularity kind = Singularity::value_jump;
    double left_value = 0.0;  ///< v(x0 - 0)
    double right_value = 0.0; ///< v(x0 + 0)
};

/// Piecewise-smooth real potential on the line or on [0, inf).
///
/// Immutable after construction; copies share the branch table.
class Potential {
public:
    /// `breakpoints` must be strictly increasing and of size branches.size() - 1.
    /// Breakpoints where the branches agree to second order are merged silently.
    Potential(std::vector<BranchFn> branches, std::vector<double> breakpoints,
              DomainKind domain = DomainKind::full_line,
              std::optional<double> decay_exponent = std::nullopt,
              double search_extent = 50.0);

    /// Single smooth branch on the whole domain.
    explicit Potential(BranchFn fn, DomainKind domain = DomainKind::full_line,
                       std::optional<double> decay_exponent = std::nullopt,
                       double search_extent = 50.0);

    /// Throws DomainError outside the domain or exactly at a singular point with Side::none.
    /// The side selector is ignored away from singular points.
    Jet eval(double x, Side side = Side::none) const;
    double value(double x, Side side = Side::none) const { return eval(x, side).v; }

    const std::vector<SingularPoint>& singular_points() const;
    DomainKind domain() const;
    double domain_lo() const;
    std::optional<double> decay_exponent() const;

    /// Half-width of the region searched for the well; turning points beyond it are not found.
    double search_extent() const;

    /// Location of the global minimum (approximate, found at construction).
    double anchor() const;

    /// Lower bound of the spectrum: inf of v over the search region.
    double bottom() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

struct TurningPoints {
    double x_minus = 0.0;
    double x_plus = 0.0;
    double slope_minus = 0.0; ///< v'(x_minus), negative
    double slope_plus = 0.0;  ///< v'(x_plus), positive

    double width() const { return x_plus - x_minus; }
    double midpoint() const { return 0.5 * (x_minus + x_plus); }
};

inline constexpr double turning_tolerance = 1e-12;
inline constexpr std::size_t default_audit_points = 1024;

/// Both turning points of a full-line well.  For a half-line potential, x_minus is
/// the wall at 0 and slope_minus is reported as 0.
///
/// With `audit` set, counts sign changes of v - lambda on a uniform grid spanning the
/// truncation bounds and rejects anything other than a single well.
TurningPoints turning_points(const Potential& pot, double lambda, bool audit = true);

/// Points where v first exceeds lambda + margin on either side of the well, or the edge of
/// the search region for potentials that level off above lambda.
std::pair<double, double> truncation_bounds(const Potential& pot, double lambda, double margin = 10.0);

struct WellCertificate {
    Potential potential;
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    std::vector<SingularPoint> interior_singularities;
    double criticality_margin = 0.0;
    std::pair<double, double> truncation{0.0, 0.0};

    /// Turning points for lambda in the certified window (no re-audit).
    TurningPoints turning(double lambda) const;

    bool has_value_jump() const;
};

/// Samples the window at the audit resolution and checks the single-well clauses.
/// Throws CertificationError naming the failing clause.
WellCertificate certify_well(const Potential& pot, double lambda_lo, double lambda_hi,
                             std::size_t audit_points = default_audit_points);

struct PowerLawParams {
    double a_plus = 0.0, v_plus = 1.0, alpha_plus = 2.0;
    double a_minus = 0.0, v_minus = 1.0, alpha_minus = 2.0;
};

/// v(x) = a+ + v+ x^alpha+ for x > 0 and a- + v- |x|^alpha- for x < 0.
Potential make_power_law(const PowerLawParams& params);

} // namespace semiclass
