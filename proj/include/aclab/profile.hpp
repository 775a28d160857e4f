#pragma once

/// Heteroclinic profile of the cubic Allen-Cahn nonlinearity and its constants.

namespace aclab {

inline constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

/// w(s) = tanh(s / sqrt 2), the monotone connection from -1 to +1.
double heteroclinic(double s);
/// w'(s) = (1 - w^2) / sqrt 2, evaluated through sech^2 to avoid cancellation in the tails.
double profile_derivative(double s);
/// w''(s) = -f(w(s)).
double profile_second_derivative(double s);

/// f(u) = (1 - u^2) u.
constexpr double reaction(double u) { return (1.0 - u * u) * u; }
/// f'(u) = 1 - 3u^2.
constexpr double reaction_derivative(double u) { return 1.0 - 3.0 * u * u; }
/// Primitive F(u) = -(1 - u^2)^2 / 4 of the reaction, f = F'.
constexpr double potential(double u) { return -0.25 * (1.0 - u * u) * (1.0 - u * u); }

struct InteractionConstants {
    double beta = 0.0;
    double i_kinetic = 0.0;    ///< integral of (w')^2 over the line
    double i_tail = 0.0;       ///< integral of e^{sqrt2 x} (1 - w^2) w' over the line
    double truncation = 0.0;   ///< half-width L of the integration window [-L, L]
};

/// Interaction constant beta = 6 i_tail / i_kinetic by adaptive quadrature.
/// tolerance must lie in (0, 1e-6]. Throws DomainError / NonConvergence.
InteractionConstants compute_beta(double quadrature_tolerance);

/// Same integrals on a caller-chosen window [-L, L] (used to check truncation stability).
InteractionConstants compute_beta_on_window(double quadrature_tolerance, double half_width);

/// Radius of the shrinking sphere sqrt(-2(n-1)t). Requires n >= 2 and t < 0.
double shrinking_sphere(int n, double t);

}  // namespace aclab
