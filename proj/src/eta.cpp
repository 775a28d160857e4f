#include "aclab/eta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "aclab/errors.hpp"
#include "aclab/profile.hpp"

namespace aclab {

namespace {

// d eta / d tau = t eta'(t) = -eta/2 + e^{tau - sqrt2 eta}
double log_rhs(double tau, double eta) { return -0.5 * eta + std::exp(tau - kSqrt2 * eta); }

double to_tau(double t) { return std::log(-t); }

}  // namespace

bool EtaSolution::covers(double t) const { return t < 0.0 && dense_.covers(to_tau(t)); }

double EtaSolution::value(double t) const {
    if (!(t < 0.0)) throw DomainError("EtaSolution: t must be negative");
    return dense_.value(to_tau(t))[0];
}

double EtaSolution::log_derivative(double t) const {
    if (!(t < 0.0)) throw DomainError("EtaSolution: t must be negative");
    return dense_.derivative(to_tau(t))[0];
}

double EtaSolution::derivative(double t) const { return log_derivative(t) / t; }

std::vector<double> EtaSolution::log_grid() const {
    std::vector<double> out;
    out.reserve(dense_.nodes().size());
    for (const auto& n : dense_.nodes()) out.push_back(n.x);
    return out;
}

double EtaSolution::relative_residual(double t) const {
    const double eta = value(t);
    const double d = derivative(t);
    const double decay = std::exp(-kSqrt2 * eta);
    const double transport = eta / (2.0 * t);
    return std::abs(d + transport + decay) / (std::abs(transport) + decay);
}

double EtaSolution::max_midpoint_residual() const {
    const auto& nodes = dense_.nodes();
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double tau = 0.5 * (nodes[i].x + nodes[i + 1].x);
        worst = std::max(worst, relative_residual(-std::exp(tau)));
    }
    return worst;
}

double EtaSolution::asymptote(double t) {
    const double a = std::abs(t);
    return std::log(a / std::log(a)) / kSqrt2;
}

double EtaSolution::upper_bound(double t) { return std::log(1.0 - kSqrt2 * (t + 1.0)) / kSqrt2; }

double EtaSolution::asymptotic_offset(double t_lo, double t_hi, int samples) const {
    const double a = std::log(-t_hi);
    const double b = std::log(-t_lo);
    double worst = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = -std::exp(a + (b - a) * i / samples);
        worst = std::max(worst, std::abs(value(t) - asymptote(t)));
    }
    return worst;
}

EtaSolution solve_eta(double t_end, double rel_tol, const EtaOptions& options) {
    if (!(t_end >= 10.0)) throw DomainError("solve_eta: T_end must be >= 10");
    if (!(rel_tol > 0.0) || rel_tol > 1e-8)
        throw DomainError("solve_eta: rel_tol must lie in (0, 1e-8]");
    OdeOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = rel_tol;  // eta is O(1) or larger away from tau = 0
    opt.max_step = options.max_log_step;
    opt.min_step = 1e-14;
    const std::array<double, 1> y0{0.0};
    auto rhs = [](double tau, std::span<const double> y, std::span<double> dy) {
        dy[0] = log_rhs(tau, y[0]);
    };
    DenseSolution dense = integrate_dopri5(rhs, 0.0, y0, std::log(t_end), opt);
    return EtaSolution(std::move(dense), t_end, rel_tol);
}

}  // namespace aclab
