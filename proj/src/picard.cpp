#include "aclab/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aclab/errors.hpp"
#include "aclab/profile.hpp"

namespace aclab {

namespace {

// Geometric grid in |t| between T0 and T_end, with the increments of
// E(t) = int_t^{-T0} e^{-sqrt2 eta(s)} ds between consecutive nodes.
struct LogGrid {
    double dtau = 0.0;
    std::vector<double> t;
    std::vector<double> abs_t;
    std::vector<double> eta;
    std::vector<double> dE;
};

LogGrid build_grid(const EtaSolution& eta, double t0, double t_end, int nodes_per_decade) {
    if (!(t0 > 1.0)) throw DomainError("picard: T0 must exceed 1");
    if (!(t_end > t0)) throw DomainError("picard: T_end must exceed T0");
    if (nodes_per_decade < 32) throw DomainError("picard: need at least 32 nodes per decade");
    if (!eta.covers(-t_end)) throw DomainError("picard: eta does not cover -T_end");
    const double tau0 = std::log(t0);
    const double tau1 = std::log(t_end);
    const int m = std::max(1, static_cast<int>(std::ceil(std::log10(t_end / t0) * nodes_per_decade)));
    LogGrid g;
    g.dtau = (tau1 - tau0) / m;
    for (int i = 0; i <= m; ++i) {
        const double tau = i == m ? tau1 : tau0 + i * g.dtau;
        g.abs_t.push_back(std::exp(tau));
        g.t.push_back(-g.abs_t.back());
        g.eta.push_back(eta.value(g.t.back()));
    }
    auto density = [&](double tau) { return std::exp(tau - kSqrt2 * eta.value(-std::exp(tau))); };
    for (int i = 0; i < m; ++i) {
        const double a = tau0 + i * g.dtau;
        const double b = a + g.dtau;
        // Simpson in log-time; ds = |s| dtau.
        g.dE.push_back(g.dtau / 6.0 * (density(a) + 4.0 * density(0.5 * (a + b)) + density(b)));
    }
    return g;
}

// omega(t) = -(1/mu(t)) int_t^{-T0} mu(s) F(s) ds with mu = sqrt(-s) exp(rate E(s)).
void solve_mode(const LogGrid& g, double rate, const std::vector<double>& forcing,
                std::vector<double>& out) {
    const std::size_t m = g.t.size();
    out.assign(m, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double r = std::sqrt(g.abs_t[i] / g.abs_t[i + 1]) * std::exp(-rate * g.dE[i]);
        out[i + 1] = r * out[i] - 0.5 * g.dtau *
                                      (r * forcing[i] * g.abs_t[i] + forcing[i + 1] * g.abs_t[i + 1]);
    }
}

}  // namespace

InverseLogFit fit_inverse_log(const std::vector<double>& times, const std::vector<double>& values) {
    InverseLogFit fit;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double x = 1.0 / std::log(std::abs(times[i]));
        sxy += x * values[i];
        sxx += x * x;
        syy += values[i] * values[i];
    }
    fit.samples = static_cast<int>(times.size());
    if (sxx == 0.0 || syy == 0.0) return fit;
    fit.coefficient = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double r = values[i] - fit.coefficient / std::log(std::abs(times[i]));
        ss += r * r;
    }
    fit.relative_rms = std::sqrt(ss / syy);
    return fit;
}

LayerState PicardResult::corrected_state(const TodaConstants& constants, const EtaSolution& eta,
                                         std::size_t m) const {
    LayerState s;
    s.t = times.at(m);
    const double xi = shrinking_sphere(n, s.t);
    s.rho = first_approximation_offsets(constants, eta.value(s.t));
    for (std::size_t j = 0; j < s.rho.size(); ++j) s.rho[j] += xi + h.at(m)[j];
    return s;
}

PicardResult picard_iterate(int n, const TodaConstants& c, const EtaSolution& eta, double t0,
                            double t_end, const PicardOptions& options) {
    if (n < 2) throw DomainError("picard: dimension n must be >= 2");
    const int k = c.k;
    const LogGrid g = build_grid(eta, t0, t_end, options.nodes_per_decade);
    const std::size_t m = g.t.size();

    Matrix B = Matrix(1, 1, 1.0), B_inv = Matrix(1, 1, 1.0), to_modes, from_modes;
    PicardResult res;
    res.k = k;
    res.n = n;
    res.t0 = -t0;
    res.t_end = -t_end;
    res.times = g.t;
    if (k >= 2) {
        const ReductionMatrices rm = reduction_matrices(k);
        B = rm.B;
        B_inv = rm.B_inv;
        to_modes = rm.Lambda.transpose() * rm.C_inv_half;
        from_modes = rm.C_half * rm.Lambda;
        for (double lambda : rm.A_eigs) res.mode_rates.push_back(lambda / kSqrt2);
        const auto bg = B.apply(c.gamma);
        res.delta = to_modes.apply(std::span<const double>(bg.data(), k - 1));
    }
    const auto b_gamma = B.apply(c.gamma);

    // Per-node first-approximation offsets and their interaction Jacobian.
    std::vector<std::vector<double>> base(m);
    std::vector<std::vector<double>> base_r(m);
    std::vector<Matrix> jac(m);
    for (std::size_t i = 0; i < m; ++i) {
        base[i] = first_approximation_offsets(c, g.eta[i]);
        base_r[i] = interaction_terms(base[i], 1.0);
        Matrix d(k, k);
        for (int j = 0; j + 1 < k; ++j) {
            const double e = kSqrt2 * std::exp(-kSqrt2 * (base[i][j + 1] - base[i][j]));
            // R_j holds -e^{-sqrt2 gap_j}, R_{j+1} holds +e^{-sqrt2 gap_j}.
            d(j, j + 1) += e;
            d(j, j) -= e;
            d(j + 1, j + 1) -= e;
            d(j + 1, j) += e;
        }
        jac[i] = d;
    }

    std::vector<std::vector<double>> h(m, std::vector<double>(k, 0.0));
    std::vector<std::vector<double>> mode_forcing(std::max(k - 1, 0), std::vector<double>(m));
    std::vector<double> sum_forcing(m);
    std::vector<double> sol;

    double prev_change = 0.0;
    for (int it = 0; it < options.max_iters; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> gvec(k, 0.0);
            if (options.include_nonlinear) {
                const double xi = std::sqrt(-2.0 * (n - 1) * g.t[i]);
                std::vector<double> q(k);
                for (int j = 0; j < k; ++j) q[j] = base[i][j] + h[i][j];
                const auto rq = interaction_terms(q, 1.0);
                const auto dh = jac[i].apply(h[i]);
                for (int j = 0; j < k; ++j) {
                    const double curvature = -(n - 1) * q[j] * q[j] / (xi * xi * (xi + q[j]));
                    const double taylor = c.beta * (rq[j] - base_r[i][j] - dh[j]);
                    gvec[j] = curvature - taylor;
                }
            }
            auto fb = B.apply(gvec);
            if (options.include_delta)
                for (int j = 0; j < k; ++j) fb[j] -= b_gamma[j] / (2.0 * g.t[i]);
            if (k >= 2) {
                const auto proj = to_modes.apply(std::span<const double>(fb.data(), k - 1));
                for (int l = 0; l < k - 1; ++l) mode_forcing[l][i] = proj[l];
            }
            sum_forcing[i] = fb[k - 1];
        }

        std::vector<std::vector<double>> p(m, std::vector<double>(k, 0.0));
        for (int l = 0; l < k - 1; ++l) {
            solve_mode(g, res.mode_rates[l], mode_forcing[l], sol);
            for (std::size_t i = 0; i < m; ++i) p[i][l] = sol[i];
        }
        solve_mode(g, 0.0, sum_forcing, sol);
        for (std::size_t i = 0; i < m; ++i) p[i][k - 1] = sol[i];

        double change = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> pv(k);
            if (k >= 2) {
                const auto gaps = from_modes.apply(std::span<const double>(p[i].data(), k - 1));
                std::copy(gaps.begin(), gaps.end(), pv.begin());
            }
            pv[k - 1] = p[i][k - 1];
            const auto hn = B_inv.apply(pv);
            for (int j = 0; j < k; ++j) {
                const double d = std::abs(hn[j] - h[i][j]);
                change = std::isfinite(d) ? std::max(change, d) : INFINITY;
            }
            h[i] = hn;
        }
        res.changes.push_back(change);
        res.iterations = it + 1;
        if (it > 0 && prev_change > 0.0)
            res.max_contraction_ratio = std::max(res.max_contraction_ratio, change / prev_change);
        prev_change = change;
        if (!std::isfinite(change)) break;
        if (change <= options.tol) {
            res.converged = true;
            break;
        }
        // Three consecutive increases means the map is not contracting here.
        const std::size_t nc = res.changes.size();
        if (nc >= 4 && res.changes[nc - 1] > res.changes[nc - 2] &&
            res.changes[nc - 2] > res.changes[nc - 3] && res.changes[nc - 3] > res.changes[nc - 4])
            break;
    }

    res.h = std::move(h);
    res.envelope.resize(m);
    std::vector<double> fit_t, fit_v;
    for (std::size_t i = 0; i < m; ++i) {
        double e = 0.0;
        for (double v : res.h[i]) e = std::max(e, std::abs(v));
        res.envelope[i] = e;
        if (g.abs_t[i] >= options.envelope_fit_factor * t0) {
            fit_t.push_back(g.t[i]);
            fit_v.push_back(e);
        }
    }
    res.envelope_fit = fit_inverse_log(fit_t, fit_v);
    return res;
}

PicardResult picard_correction(int n, const TodaConstants& c, const EtaSolution& eta, double t0,
                               double t_end, const PicardOptions& options) {
    PicardResult res = picard_iterate(n, c, eta, t0, t_end, options);
    if (!res.converged) {
        std::ostringstream os;
        os << "picard_correction: no contraction for T0 = " << t0 << " after " << res.iterations
           << " iterations (last change " << (res.changes.empty() ? 0.0 : res.changes.back())
           << ")";
        throw NoContraction(os.str());
    }
    return res;
}

double picard_threshold(int n, const TodaConstants& c, const EtaSolution& eta,
                        const std::vector<double>& t0_candidates, double t_end,
                        const PicardOptions& options) {
    for (double t0 : t0_candidates) {
        if (!(t0 < t_end)) break;
        const PicardResult r = picard_iterate(n, c, eta, t0, t_end, options);
        if (r.converged && r.max_contraction_ratio < 1.0) return t0;
    }
    return 0.0;
}

double damping_factor(const EtaSolution& eta, double t0, double t_end, double rate,
                      int nodes_per_decade) {
    const LogGrid g = build_grid(eta, t0, t_end, nodes_per_decade);
    std::vector<double> forcing(g.t.size());
    for (std::size_t i = 0; i < g.t.size(); ++i) forcing[i] = -1.0 / g.abs_t[i];
    std::vector<double> sol;
    solve_mode(g, rate, forcing, sol);
    return *std::max_element(sol.begin(), sol.end());
}

}  // namespace aclab
