#include "aclab/toda.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aclab/errors.hpp"
#include "aclab/profile.hpp"

namespace aclab {

TodaConstants toda_constants(int k, double beta) {
    if (k < 1) throw DomainError("toda_constants: k must be >= 1");
    if (!(beta > 0.0)) throw DomainError("toda_constants: beta must be positive");
    TodaConstants c;
    c.k = k;
    c.beta = beta;
    c.b.resize(k - 1);
    for (int l = 1; l <= k - 1; ++l)
        c.b[l - 1] = -std::log(static_cast<double>((k - l) * l) / (2.0 * beta)) / kSqrt2;
    c.gamma.assign(k, 0.0);
    for (int j = 1; 2 * j <= k; ++j) {
        double s = 0.0;
        for (int i = j; i <= k - j; ++i) s += c.b[i - 1];
        c.gamma[j - 1] = -0.5 * s;
        c.gamma[k - j] = 0.5 * s;
    }
    return c;
}

bool is_ordered(std::span<const double> rho) {
    if (rho.empty() || !(rho[0] > 0.0)) return false;
    for (std::size_t j = 1; j < rho.size(); ++j)
        if (!(rho[j] > rho[j - 1])) return false;
    return true;
}

std::vector<double> first_approximation_offsets(const TodaConstants& c, double eta_value) {
    std::vector<double> out(c.k);
    const double centre = 0.5 * (c.k + 1);
    for (int j = 1; j <= c.k; ++j) out[j - 1] = (j - centre) * eta_value + c.gamma[j - 1];
    return out;
}

LayerState first_approximation(int n, const TodaConstants& c, const EtaSolution& eta, double t) {
    LayerState s;
    s.t = t;
    const double xi = shrinking_sphere(n, t);
    if (c.k == 1) {
        s.rho = {xi};
        return s;
    }
    s.rho = first_approximation_offsets(c, eta.value(t));
    for (double& r : s.rho) r += xi;
    if (!is_ordered(s.rho)) {
        std::ostringstream os;
        os << "first_approximation: radii not positive/increasing at t = " << t
           << " (rho_1 = " << s.rho.front() << ")";
        throw OrderingViolation(os.str());
    }
    return s;
}

std::vector<double> interaction_terms(std::span<const double> rho, double beta) {
    const std::size_t k = rho.size();
    std::vector<double> out(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double r = 0.0;
        if (j + 1 < k) r -= std::exp(-kSqrt2 * (rho[j + 1] - rho[j]));
        if (j > 0) r += std::exp(-kSqrt2 * (rho[j] - rho[j - 1]));
        out[j] = beta * r;
    }
    return out;
}

Lemma52Residual verify_lemma52_residual(const TodaConstants& c, const EtaSolution& eta,
                                        std::span<const double> t_samples) {
    Lemma52Residual out;
    const double centre = 0.5 * (c.k + 1);
    for (double t : t_samples) {
        const double e = eta.value(t);
        const double de = eta.derivative(t);
        const auto rho = first_approximation_offsets(c, e);
        const auto inter = interaction_terms(rho, c.beta);
        for (int j = 1; j <= c.k; ++j) {
            const double lhs = (j - centre) * de + rho[j - 1] / (2.0 * t) + inter[j - 1];
            const double res = std::abs(lhs - c.gamma[j - 1] / (2.0 * t));
            if (res > out.max_abs) {
                out.max_abs = res;
                out.worst_t = t;
            }
            out.max_scaled = std::max(out.max_scaled, res * std::abs(t));
        }
    }
    return out;
}

ReductionMatrices reduction_matrices(int k) {
    if (k < 2) throw DomainError("reduction_matrices: k must be >= 2");
    ReductionMatrices m;
    m.k = k;
    m.B = Matrix(k, k);
    for (int l = 0; l + 1 < k; ++l) {
        m.B(l, l) = -1.0;
        m.B(l, l + 1) = 1.0;
    }
    for (int j = 0; j < k; ++j) m.B(k - 1, j) = 1.0;
    m.B_inv = inverse(m.B);

    const int d = k - 1;
    m.C = Matrix(d, d);
    for (int i = 0; i < d; ++i) {
        m.C(i, i) = 2.0;
        if (i + 1 < d) m.C(i, i + 1) = m.C(i + 1, i) = -1.0;
    }
    const SymmetricEigen ce = jacobi_eigen(m.C);
    m.C_eigs = ce.values;
    m.C_half = spectral_function(ce, [](double v) { return std::sqrt(v); });
    m.C_inv_half = spectral_function(ce, [](double v) { return 1.0 / std::sqrt(v); });

    m.a.resize(d);
    for (int l = 1; l <= d; ++l) m.a[l - 1] = static_cast<double>((k - l) * l);
    m.A = m.C_half * Matrix::diagonal(m.a) * m.C_half;
    // Symmetrise away rounding before the second decomposition.
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) m.A(i, j) = m.A(j, i) = 0.5 * (m.A(i, j) + m.A(j, i));
    const SymmetricEigen ae = jacobi_eigen(m.A);
    m.A_eigs = ae.values;
    m.Lambda = ae.vectors;
    return m;
}

std::vector<double> toda_rhs(int n, double beta, std::span<const double> rho) {
    auto v = interaction_terms(rho, beta);
    // interaction_terms carries the sign of R_j; the velocity has the opposite sign.
    for (std::size_t j = 0; j < rho.size(); ++j) v[j] = -(n - 1) / rho[j] - v[j];
    return v;
}

double single_layer_exact(int n, double rho0, double t0, double t) {
    return std::sqrt(rho0 * rho0 - 2.0 * (n - 1) * (t - t0));
}

std::vector<LayerState> integrate_toda(int n, double beta, const LayerState& initial,
                                       double t_final, const TodaOptions& options) {
    if (!(initial.t < 0.0) || !(t_final < 0.0))
        throw DomainError("integrate_toda: times must be negative");
    if (!is_ordered(initial.rho))
        throw OrderingViolation("integrate_toda: initial radii not positive/increasing");
    const std::size_t k = initial.rho.size();

    // In tau = log(-t): d rho / d tau = t rho'(t).
    auto rhs = [&](double tau, std::span<const double> rho, std::span<double> out) {
        const double t = -std::exp(tau);
        for (std::size_t j = 0; j < k; ++j) {
            double v = -(n - 1) / rho[j];
            if (j + 1 < k) v += beta * std::exp(-kSqrt2 * (rho[j + 1] - rho[j]));
            if (j > 0) v -= beta * std::exp(-kSqrt2 * (rho[j] - rho[j - 1]));
            out[j] = t * v;
        }
    };

    auto check = [&](const OdeNode& node) {
        const double t = -std::exp(node.x);
        if (!(node.y[0] > 0.0)) {
            throw CollisionError("integrate_toda: innermost layer reached the origin at t = " +
                                     std::to_string(t),
                                 t, 0);
        }
        for (std::size_t j = 1; j < k; ++j) {
            if (!(node.y[j] - node.y[j - 1] > options.gap_floor)) {
                std::ostringstream os;
                os << "integrate_toda: layers " << j << " and " << j + 1 << " collided at t = " << t
                   << " (gap " << node.y[j] - node.y[j - 1] << ")";
                throw CollisionError(os.str(), t, static_cast<int>(j));
            }
        }
        return true;
    };

    OdeOptions opt;
    opt.rel_tol = options.rel_tol;
    opt.abs_tol = options.abs_tol;
    opt.min_step = 1e-14;
    const double tau0 = std::log(-initial.t);
    const double tau1 = std::log(-t_final);
    DenseSolution dense = integrate_dopri5(rhs, tau0, initial.rho, tau1, opt, check);

    std::vector<LayerState> out;
    if (options.sample_times.empty()) {
        out.reserve(dense.nodes().size());
        for (const auto& node : dense.nodes()) out.push_back({-std::exp(node.x), node.y});
        out.front().t = initial.t;
        out.back().t = t_final;
    } else {
        out.reserve(options.sample_times.size());
        for (double t : options.sample_times) {
            if (!(t < 0.0)) throw DomainError("integrate_toda: sample times must be negative");
            out.push_back({t, dense.value(std::log(-t))});
        }
    }
    return out;
}

}  // namespace aclab
