#pragma once

#include <vector>

#include "aclab/linalg.hpp"
#include "aclab/pde.hpp"
#include "aclab/track.hpp"

namespace aclab {

/// Crossings of a PDE field; see extract_interfaces in track.hpp.
Crossings extract_interfaces(const RadialField& field, int expected_k);

/// Per-layer least squares of rho_j - sqrt(-2(n-1)t) against (1/sqrt2) log(|t| / log|t|).
struct AsymptoticFit {
    std::vector<double> slopes;
    std::vector<double> intercepts;
    std::vector<double> slope_stderr;
    std::vector<double> residual_rms;
    double window_lo = 0.0;  ///< earliest time used
    double window_hi = 0.0;  ///< latest time used
    int samples = 0;
};

/// Requires at least 1.5 decades of |t| (WindowTooShort otherwise). The tenth of the window
/// closest to t = 0, measured in log|t|, is excluded. All times must be <= -e.
AsymptoticFit fit_theorem12(const InterfaceTrack& track, int n, int k);

struct McfResidual {
    std::vector<double> times;
    std::vector<std::vector<double>> velocity;  ///< smoothed rho'_j
    std::vector<std::vector<double>> residual;  ///< rho'_j + (n-1)/rho_j
};

/// Velocities from a least-squares quadratic over five consecutive samples, evaluated at the
/// centre sample; the first and last two samples are skipped.
McfResidual mcf_residual(const InterfaceTrack& track, int n);

/// rho^2 + 2(n-1)t, fitted globally and on consecutive sub-windows.
struct SphereFit {
    double c = 0.0;
    std::vector<double> window_c;
    double drift = 0.0;      ///< max - min over sub-windows
    double log_slope = 0.0;  ///< least-squares slope of rho^2 + 2(n-1)t against log|t|
};

SphereFit fit_sphere_constant(const InterfaceTrack& track, int n, int windows = 4, int layer = 0);

struct ProjectionDiagnostics {
    std::vector<double> projections;  ///< int (u - z) w'(r - rho_j) r^{n-1} dr
    Matrix gram;                      ///< int w'(r - rho_i) w'(r - rho_j) r^{n-1} dr
    double max_offdiag_ratio = 0.0;   ///< max_{i != j} |G_ij| / min(G_ii, G_jj)
    bool diagonally_dominant = false;
};

/// Midpoint quadrature on the field's cell-centred grid.
ProjectionDiagnostics project_residual(const RadialField& field, const std::vector<double>& layers,
                                       int n);

struct TrackComparison {
    std::vector<double> times;
    std::vector<std::vector<double>> layer_error;  ///< |rho_pde - rho_toda|
    std::vector<std::vector<double>> gap_error;    ///< |gap_pde - gap_toda|
    double max_layer_error = 0.0;
    double max_gap_error = 0.0;
};

/// Evaluates the reference track at the PDE times by linear interpolation in t. Throws
/// WindowMismatch if the layer counts differ or no PDE time falls inside the reference window.
TrackComparison compare_pde_vs_toda(const InterfaceTrack& pde, const InterfaceTrack& toda);

}  // namespace aclab
