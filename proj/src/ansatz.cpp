#include "aclab/ansatz.hpp"

#include <cmath>
#include <limits>

#include "aclab/errors.hpp"
#include "aclab/profile.hpp"

namespace aclab {

MultiLayerAnsatz::MultiLayerAnsatz(std::vector<double> radii) : rho(std::move(radii)) {
    if (rho.empty()) throw DomainError("MultiLayerAnsatz: need at least one layer");
    for (std::size_t j = 1; j < rho.size(); ++j)
        if (!(rho[j] > rho[j - 1])) throw OrderingViolation("MultiLayerAnsatz: radii not increasing");
}

double evaluate_z(const MultiLayerAnsatz& a, double r) {
    double z = a.parity_offset();
    for (int j = 0; j < a.k(); ++j) {
        const double w = heteroclinic(r - a.rho[j]);
        z += j % 2 == 0 ? w : -w;
    }
    return z;
}

double error_term(const MultiLayerAnsatz& a, std::span<const double> velocities, int n, double r) {
    if (!(r > 0.0)) throw DomainError("error_term: r must be positive");
    if (velocities.size() != a.rho.size()) throw DomainError("error_term: one velocity per layer");
    double transport = 0.0;
    double split = 0.0;
    for (int j = 0; j < a.k(); ++j) {
        const double s = j % 2 == 0 ? 1.0 : -1.0;
        const double x = r - a.rho[j];
        transport += s * profile_derivative(x) * (velocities[j] + (n - 1) / r);
        split += s * reaction(heteroclinic(x));
    }
    return transport + reaction(evaluate_z(a, r)) - split;
}

WeightFunction::WeightFunction(double sigma_, std::vector<double> rho0_, double eta_, bool sym)
    : sigma(sigma_), rho0(std::move(rho0_)), eta(eta_), symmetric(sym) {
    if (!(sigma > kSqrt2 / 2.0 && sigma < kSqrt2))
        throw DomainError("WeightFunction: sigma must lie in (sqrt2/2, sqrt2)");
    if (rho0.empty() || !is_ordered(rho0))
        throw OrderingViolation("WeightFunction: reference radii must be positive and increasing");
    if (!(eta >= 0.0)) throw DomainError("WeightFunction: eta must be nonnegative");
}

double weight_phi(const WeightFunction& wf, double r) {
    const auto& p = wf.rho0;
    const std::size_t k = p.size();
    const double s = wf.sigma;
    const double ghost = p[0] - wf.eta;
    if (r <= 0.5 * (ghost + p[0])) return std::exp(s * (r - p[0]));

    // Locate the band: the last j whose lower midpoint lies at or below r.
    std::size_t j = 0;
    while (j + 1 < k && r >= 0.5 * (p[j] + p[j + 1])) ++j;
    const double below = j == 0 ? ghost : p[j - 1];
    const double incoming = std::exp(s * (below - r));
    const double outgoing = j + 1 < k ? std::exp(s * (r - p[j + 1])) : 0.0;
    if (j == 0 && k > 1 && !wf.symmetric) return outgoing;
    return incoming + outgoing;
}

double weighted_norm(std::span<const double> nodes, std::span<const double> psi,
                     const WeightFunction& weights) {
    if (nodes.size() != psi.size()) throw DomainError("weighted_norm: size mismatch");
    double best = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        best = std::max(best, std::abs(psi[i]) / weight_phi(weights, nodes[i]));
    return best;
}

ErrorBound check_error_bound(const MultiLayerAnsatz& a, std::span<const double> velocities,
                             const WeightFunction& weights, int n, std::span<const double> nodes) {
    if (weights.rho0.size() != a.rho.size())
        throw DomainError("check_error_bound: weights and ansatz have different k");
    ErrorBound out;
    for (double r : nodes) {
        const double phi = weight_phi(weights, r);
        const double ratio = std::abs(error_term(a, velocities, n, r)) / ((1.0 + 1.0 / r) * phi);
        if (ratio > out.constant) {
            out.constant = ratio;
            out.r_at = r;
        }
    }
    return out;
}

}  // namespace aclab
