#pragma once

#include <functional>

namespace aclab {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) bisection on [a, b].
/// Throws NonConvergence when a subinterval needs more than max_depth halvings.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, int max_depth = 40);

}  // namespace aclab
