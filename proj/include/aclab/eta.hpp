#pragma once

#include <vector>

#include "aclab/ode.hpp"

namespace aclab {

struct EtaOptions {
    double rel_tol = 1e-10;
    /// Cap on the log-time step; keeps the cubic dense output as accurate as the integrator.
    double max_log_step = 0.005;
};

/// Solution of  eta' + eta/(2t) + e^{-sqrt2 eta} = 0,  eta(-1) = 0,  on [-T_end, -1],
/// integrated in the log-time tau = log(-t). Nodes live on the accepted tau steps.
class EtaSolution {
public:
    EtaSolution() = default;
    EtaSolution(DenseSolution dense, double t_end, double rel_tol)
        : dense_(std::move(dense)), t_end_(t_end), rel_tol_(rel_tol) {}

    double value(double t) const;
    /// d eta / dt from the dense-output interpolant.
    double derivative(double t) const;
    /// d eta / d tau from the dense-output interpolant.
    double log_derivative(double t) const;

    bool covers(double t) const;
    double t_end() const noexcept { return t_end_; }
    double rel_tol() const noexcept { return rel_tol_; }
    const DenseSolution& dense() const noexcept { return dense_; }

    /// Log-times of the stored nodes (increasing).
    std::vector<double> log_grid() const;

    /// |eta' + eta/(2t) + e^{-sqrt2 eta}| divided by |eta/(2t)| + e^{-sqrt2 eta}, using the
    /// interpolant's derivative.
    double relative_residual(double t) const;
    /// Largest relative_residual over the midpoints of all stored steps.
    double max_midpoint_residual() const;

    /// (1/sqrt2) log(|t| / log|t|), the leading-order growth of eta.
    static double asymptote(double t);
    /// Rigorous upper bound (1/sqrt2) log(1 - sqrt2 (t + 1)) from eta' >= -e^{-sqrt2 eta}.
    static double upper_bound(double t);
    /// max |eta(t) - asymptote(t)| over log-spaced samples of [t_hi, t_lo] (t_lo < t_hi <= -e).
    double asymptotic_offset(double t_lo, double t_hi, int samples = 400) const;

private:
    DenseSolution dense_;
    double t_end_ = 0.0;
    double rel_tol_ = 0.0;
};

/// Integrates from t = -1 down to t = -T_end. Requires T_end >= 10 and rel_tol <= 1e-8.
/// Throws DomainError on bad inputs and StepFailure if the controller underflows.
EtaSolution solve_eta(double t_end, double rel_tol, const EtaOptions& options = {});

}  // namespace aclab
