#pragma once

#include <vector>

#include "aclab/eta.hpp"
#include "aclab/toda.hpp"

namespace aclab {

struct PicardOptions {
    int nodes_per_decade = 64;
    int max_iters = 60;
    double tol = 1e-12;
    /// Forcing -B gamma / (2t) left over by the first approximation.
    bool include_delta = true;
    /// Toda-internal nonlinear remainders (curvature expansion and interaction Taylor
    /// remainder). The PDE-level remainder is never included.
    bool include_nonlinear = true;
    /// The |h| envelope is fitted on t <= -envelope_fit_factor * T0.
    double envelope_fit_factor = 10.0;
};

/// Least-squares fit of a series against C / log|t|.
struct InverseLogFit {
    double coefficient = 0.0;
    double relative_rms = 0.0;  ///< RMS residual / RMS of the data
    int samples = 0;
};

InverseLogFit fit_inverse_log(const std::vector<double>& times, const std::vector<double>& values);

struct PicardResult {
    int k = 0;
    int n = 0;
    double t0 = 0.0;
    double t_end = 0.0;
    std::vector<double> times;               ///< t_0 = -T0 > t_1 > ... > t_M = -T_end
    std::vector<std::vector<double>> h;      ///< h[m][j]
    std::vector<double> changes;             ///< sup-norm change per iteration
    std::vector<double> delta;               ///< Lambda^T C^{-1/2} (B gamma) restricted to gaps
    std::vector<double> mode_rates;          ///< lambda_i / sqrt2
    int iterations = 0;
    bool converged = false;
    double max_contraction_ratio = 0.0;      ///< max over successive change ratios
    std::vector<double> envelope;            ///< max_j |h_j(t_m)|
    InverseLogFit envelope_fit;

    /// rho0 + h at node m (needs the same constants and eta used to build the result).
    LayerState corrected_state(const TodaConstants& constants, const EtaSolution& eta,
                               std::size_t m) const;
};

/// Iterates the variation-of-constants maps for the gap modes omega and the sum p_k with
/// zero data at t = -T0, on a geometric grid in |t| with trapezoidal quadrature in log-time.
/// Throws NoContraction if the sup-norm changes fail to decrease within max_iters.
PicardResult picard_correction(int n, const TodaConstants& constants, const EtaSolution& eta,
                               double t0, double t_end, const PicardOptions& options = {});

/// Same iteration without throwing; converged == false signals failure.
PicardResult picard_iterate(int n, const TodaConstants& constants, const EtaSolution& eta,
                            double t0, double t_end, const PicardOptions& options = {});

/// Smallest candidate T0 (ascending list) for which the iteration contracts; 0 if none.
double picard_threshold(int n, const TodaConstants& constants, const EtaSolution& eta,
                        const std::vector<double>& t0_candidates, double t_end,
                        const PicardOptions& options = {});

/// sup over t in [-T_end, -T0] of (1/(sqrt(-t) g(t))) int_t^{-T0} sqrt(-s) g(s) / (-s) ds with
/// g(t) = exp(rate * int_t^{-T0} e^{-sqrt2 eta}).
double damping_factor(const EtaSolution& eta, double t0, double t_end, double rate,
                      int nodes_per_decade = 64);

}  // namespace aclab
