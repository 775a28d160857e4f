#include "aclab/profile.hpp"

#include <cmath>
#include <string>

#include "aclab/errors.hpp"
#include "aclab/quadrature.hpp"

namespace aclab {

double heteroclinic(double s) { return std::tanh(s / kSqrt2); }

double profile_derivative(double s) {
    const double c = std::cosh(s / kSqrt2);
    return 1.0 / (kSqrt2 * c * c);
}

double profile_second_derivative(double s) { return -reaction(heteroclinic(s)); }

namespace {

double kinetic_integrand(double x) {
    const double d = profile_derivative(x);
    return d * d;
}

// e^{sqrt2 x} sech^4(x/sqrt2) / sqrt2, written with a single exponential so neither
// factor overflows on the truncated window.
double tail_integrand(double x) {
    const double y = x / kSqrt2;
    const double e = std::exp(-2.0 * std::abs(y));
    // sech^2(y) = 4 e^{-2|y|} / (1 + e^{-2|y|})^2
    const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
    return std::exp(kSqrt2 * x) * sech2 * sech2 / kSqrt2;
}

// Smallest integer L with both integrand tails, bounded by |g(L)| / sqrt2, below tol/10.
double truncation_radius(double tol) {
    double L = 4.0;
    while (L < 200.0) {
        const double tail = (std::abs(tail_integrand(L)) + std::abs(tail_integrand(-L)) +
                             kinetic_integrand(L) + kinetic_integrand(-L)) /
                            kSqrt2;
        if (tail < 0.1 * tol) return L;
        L += 1.0;
    }
    return L;
}

}  // namespace

InteractionConstants compute_beta_on_window(double tol, double half_width) {
    if (!(tol > 0.0) || tol > 1e-6)
        throw DomainError("compute_beta: quadrature tolerance must lie in (0, 1e-6], got " +
                          std::to_string(tol));
    InteractionConstants c;
    c.truncation = half_width;
    // Split at the origin so each half sees a monotone-ish integrand.
    c.i_kinetic = integrate_adaptive(kinetic_integrand, -half_width, 0.0, 0.5 * tol).value +
                  integrate_adaptive(kinetic_integrand, 0.0, half_width, 0.5 * tol).value;
    c.i_tail = integrate_adaptive(tail_integrand, -half_width, 0.0, 0.5 * tol).value +
               integrate_adaptive(tail_integrand, 0.0, half_width, 0.5 * tol).value;
    c.beta = 6.0 * c.i_tail / c.i_kinetic;
    return c;
}

InteractionConstants compute_beta(double tol) {
    if (!(tol > 0.0) || tol > 1e-6)
        throw DomainError("compute_beta: quadrature tolerance must lie in (0, 1e-6], got " +
                          std::to_string(tol));
    return compute_beta_on_window(tol, truncation_radius(tol));
}

double shrinking_sphere(int n, double t) {
    if (n < 2) throw DomainError("shrinking_sphere: dimension n must be >= 2");
    if (!(t < 0.0)) throw DomainError("shrinking_sphere: time must be negative");
    return std::sqrt(-2.0 * (n - 1) * t);
}

}  // namespace aclab
