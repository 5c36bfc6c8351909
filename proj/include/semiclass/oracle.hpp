#pragma once

#include "semiclass/action.hpp"
#include "semiclass/potential.hpp"
#include "semiclass/quantize.hpp"

#include <cstddef>
#include <vector>

namespace semiclass {

enum class Scheme { second_order, numerov };

enum class OracleBC { dirichlet_both, halfline_dirichlet, halfline_robin };

const char* to_string(Scheme scheme);
const char* to_string(OracleBC bc);

struct OracleOptions {
    double tol = 1e-8; ///< absolute in lambda; at least 1e-10
    Scheme scheme = Scheme::second_order;
    HalfLineBC halfline;           ///< condition at 0 for half-line potentials
    double decay = 25.0;           ///< int (v - lambda_hi)^{1/2} / hbar from each turning point to the box edge
    std::size_t min_cells = 2048;
    std::size_t max_cells = std::size_t{1} << 22;
    unsigned threads = 0;          ///< 0: thread_limit()
};

struct OracleGrid {
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t cells = 0;

    double step() const { return (x_max - x_min) / static_cast<double>(cells); }
};

/// Eigenvalues of the truncated, discretized operator in a window, Richardson-extrapolated.
struct OracleSpectrum {
    Potential potential;
    double hbar = 0.0;
    Window window;
    OracleGrid grid{}; ///< finest grid used
    Scheme scheme = Scheme::second_order;
    OracleBC bc = OracleBC::dirichlet_both;
    double robin_b = 0.0;
    int order = 2;           ///< assumed leading error order in the grid step
    int first_index = 0;     ///< number of eigenvalues below eigenvalues[0]
    std::vector<double> eigenvalues{};
    std::vector<double> est_error{};
    std::vector<double> grid_eigenvalues{}; ///< unextrapolated values on the finest grid
    /// Unextrapolated window eigenvalues on each grid, coarsest first, aligned with `eigenvalues`.
    std::vector<std::vector<double>> history{};
};

/// Throws ConvergenceError if the grid reaches max_cells before every window eigenvalue's
/// estimate drops below tol, and DomainError if the box edge cannot be placed inside the
/// searched region.
OracleSpectrum solve_spectrum(const Potential& pot, double hbar, Window window, const OracleOptions& options = {});

/// A function sampled on a uniform grid, boundary nodes included.
struct GridFunction {
    double x_min = 0.0;
    double step = 0.0;
    std::vector<double> values;
    double lambda = 0.0;   ///< grid eigenvalue the vector belongs to
    double residual = 0.0; ///< ||T w|| / ||w|| after the last inverse-iteration step

    double x(std::size_t i) const { return x_min + step * static_cast<double>(i); }
    double x_max() const { return x(values.size() - 1); }
    /// Linear interpolation; 0 outside the grid.
    double operator()(double x) const;
};

/// Eigenvector k of the window (0-based) by inverse iteration on the two finest grids,
/// Richardson-combined on the coarser one.  Normalized by the trapezoid rule; positive at
/// the right turning point.
GridFunction eigenvector(const OracleSpectrum& spec, std::size_t k);

/// Trapezoid integral of w psi_k^2; cells are split at the weight's jumps, with one-sided
/// values of w on each piece.
double observable(const OracleSpectrum& spec, std::size_t k, const Weight& w);
double observable(const GridFunction& psi, const Weight& w);

struct EnergySplit {
    double potential = 0.0; ///< int v psi^2
    double kinetic = 0.0;   ///< lambda - potential
};

EnergySplit energy_split(const OracleSpectrum& spec, std::size_t k);

/// Number of sign changes of the grid function, ignoring exact zeros.
std::size_t sign_changes(const GridFunction& psi);

} // namespace semiclass
