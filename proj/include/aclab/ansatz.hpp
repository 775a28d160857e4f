#pragma once

#include <span>
#include <vector>

#include "aclab/toda.hpp"

namespace aclab {

/// Alternating sum of shifted profiles plus the parity constant -(1 + (-1)^k)/2.
struct MultiLayerAnsatz {
    std::vector<double> rho;  ///< ordered layer radii

    explicit MultiLayerAnsatz(std::vector<double> radii);
    int k() const noexcept { return static_cast<int>(rho.size()); }
    double parity_offset() const noexcept { return k() % 2 == 0 ? -1.0 : 0.0; }
};

double evaluate_z(const MultiLayerAnsatz& ansatz, double r);

/// E = sum (-1)^{j+1} w'_j (rho'_j + (n-1)/r) + f(z) - sum (-1)^{j+1} f(w_j).
/// Throws DomainError if r <= 0 or the velocity count differs from k.
double error_term(const MultiLayerAnsatz& ansatz, std::span<const double> velocities, int n,
                  double r);

/// Piecewise-exponential comparison function built on reference radii rho0.
struct WeightFunction {
    double sigma = 1.0;
    std::vector<double> rho0;
    double eta = 0.0;        ///< sets the ghost radius rho0_0 = rho0_1 - eta
    bool symmetric = false;  ///< innermost band gets both exponentials

    /// Throws DomainError unless sigma lies in (sqrt2/2, sqrt2), rho0 is ordered and eta >= 0.
    WeightFunction(double sigma, std::vector<double> rho0, double eta, bool symmetric = false);
};

/// Band j (between the midpoints around rho0_j) uses e^{sigma(-r + rho0_{j-1})} +
/// e^{sigma(r - rho0_{j+1})} with rho0_{k+1} = infinity. The first band keeps only the outgoing
/// term unless symmetric is set; with k = 1 that term is absent and the incoming term is used.
/// Below the midpoint of rho0_0 and rho0_1 the weight is e^{sigma(r - rho0_1)}.
double weight_phi(const WeightFunction& weights, double r);

/// max_i |psi_i| / Phi(r_i).
double weighted_norm(std::span<const double> nodes, std::span<const double> psi,
                     const WeightFunction& weights);

struct ErrorBound {
    double constant = 0.0;  ///< sup |E| / ((1 + 1/r) Phi)
    double r_at = 0.0;
};

ErrorBound check_error_bound(const MultiLayerAnsatz& ansatz, std::span<const double> velocities,
                             const WeightFunction& weights, int n, std::span<const double> nodes);

}  // namespace aclab
