#include "aclab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aclab/ansatz.hpp"
#include "aclab/errors.hpp"
#include "aclab/profile.hpp"

namespace aclab {

Crossings extract_interfaces(const RadialField& field, int expected_k) {
    return extract_interfaces(field.grid->nodes, field.u, expected_k, field.t);
}

AsymptoticFit fit_theorem12(const InterfaceTrack& track, int n, int k) {
    if (track.layers() != k) throw DomainError("fit_theorem12: track has a different layer count");
    if (track.size() < 3) throw WindowTooShort("fit_theorem12: fewer than three samples");
    double lmin = INFINITY, lmax = -INFINITY;
    for (double t : track.times) {
        if (!(t < -1.0)) throw DomainError("fit_theorem12: times must lie below -1");
        const double l = std::log(-t);
        lmin = std::min(lmin, l);
        lmax = std::max(lmax, l);
    }
    const double decades = (lmax - lmin) / std::log(10.0);
    if (decades < 1.5) {
        std::ostringstream os;
        os << "fit_theorem12: track spans " << decades << " decades of |t|, need 1.5";
        throw WindowTooShort(os.str());
    }
    const double cutoff = lmin + 0.1 * (lmax - lmin);

    std::vector<std::size_t> used;
    for (std::size_t m = 0; m < track.size(); ++m)
        if (std::log(-track.times[m]) >= cutoff) used.push_back(m);

    AsymptoticFit fit;
    fit.samples = static_cast<int>(used.size());
    fit.window_lo = -std::exp(lmax);
    fit.window_hi = -std::exp(cutoff);
    std::vector<double> x(used.size());
    for (std::size_t i = 0; i < used.size(); ++i) {
        const double a = -track.times[used[i]];
        x[i] = std::log(a / std::log(a)) / kSqrt2;
    }
    const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double sxx = 0.0;
    for (double v : x) sxx += (v - xbar) * (v - xbar);
    for (int j = 0; j < k; ++j) {
        std::vector<double> y(used.size());
        for (std::size_t i = 0; i < used.size(); ++i) {
            const std::size_t m = used[i];
            y[i] = track.radii[m][j] - shrinking_sphere(std::max(n, 2), track.times[m]);
        }
        const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
        double sxy = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) sxy += (x[i] - xbar) * (y[i] - ybar);
        const double slope = sxy / sxx;
        const double icpt = ybar - slope * xbar;
        double ss = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double e = y[i] - (icpt + slope * x[i]);
            ss += e * e;
        }
        fit.slopes.push_back(slope);
        fit.intercepts.push_back(icpt);
        fit.residual_rms.push_back(std::sqrt(ss / y.size()));
        fit.slope_stderr.push_back(y.size() > 2 ? std::sqrt(ss / (y.size() - 2) / sxx) : 0.0);
    }
    return fit;
}

McfResidual mcf_residual(const InterfaceTrack& track, int n) {
    McfResidual out;
    const std::size_t m = track.size();
    const int k = track.layers();
    for (std::size_t c = 2; c + 2 < m; ++c) {
        double scale = 0.0;
        for (std::size_t i = c - 2; i <= c + 2; ++i)
            scale = std::max(scale, std::abs(track.times[i] - track.times[c]));
        // Normal equations of the quadratic fit in the scaled offset s = (t - t_c) / scale.
        Matrix ata(3, 3);
        std::vector<std::vector<double>> aty(k, std::vector<double>(3, 0.0));
        for (std::size_t i = c - 2; i <= c + 2; ++i) {
            const double s = (track.times[i] - track.times[c]) / scale;
            const double basis[3] = {1.0, s, s * s};
            for (int p = 0; p < 3; ++p) {
                for (int q = 0; q < 3; ++q) ata(p, q) += basis[p] * basis[q];
                for (int j = 0; j < k; ++j) aty[j][p] += basis[p] * track.radii[i][j];
            }
        }
        const Matrix inv = inverse(ata);
        std::vector<double> vel(k), res(k);
        for (int j = 0; j < k; ++j) {
            const auto coef = inv.apply(aty[j]);
            vel[j] = coef[1] / scale;
            res[j] = vel[j] + (n - 1) / track.radii[c][j];
        }
        out.times.push_back(track.times[c]);
        out.velocity.push_back(std::move(vel));
        out.residual.push_back(std::move(res));
    }
    return out;
}

SphereFit fit_sphere_constant(const InterfaceTrack& track, int n, int windows, int layer) {
    if (windows < 1 || static_cast<int>(track.size()) < windows)
        throw WindowTooShort("fit_sphere_constant: fewer samples than windows");
    if (layer < 0 || layer >= track.layers()) throw DomainError("fit_sphere_constant: bad layer");
    SphereFit fit;
    std::vector<double> c(track.size());
    for (std::size_t m = 0; m < track.size(); ++m) {
        const double r = track.radii[m][layer];
        c[m] = r * r + 2.0 * (n - 1) * track.times[m];
    }
    fit.c = std::accumulate(c.begin(), c.end(), 0.0) / c.size();
    for (int w = 0; w < windows; ++w) {
        const std::size_t a = c.size() * w / windows;
        const std::size_t b = c.size() * (w + 1) / windows;
        fit.window_c.push_back(std::accumulate(c.begin() + a, c.begin() + b, 0.0) / (b - a));
    }
    const auto [lo, hi] = std::minmax_element(fit.window_c.begin(), fit.window_c.end());
    fit.drift = *hi - *lo;
    double lbar = 0.0;
    for (double t : track.times) lbar += std::log(std::abs(t));
    lbar /= track.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t m = 0; m < track.size(); ++m) {
        const double dl = std::log(std::abs(track.times[m])) - lbar;
        sxy += dl * (c[m] - fit.c);
        sxx += dl * dl;
    }
    fit.log_slope = sxx > 0.0 ? sxy / sxx : 0.0;
    return fit;
}

ProjectionDiagnostics project_residual(const RadialField& field, const std::vector<double>& layers,
                                       int n) {
    const MultiLayerAnsatz ansatz(layers);
    const auto& r = field.grid->nodes;
    const double h = field.grid->h;
    const std::size_t k = layers.size();
    ProjectionDiagnostics d;
    d.projections.assign(k, 0.0);
    d.gram = Matrix(k, k);
    std::vector<double> modes(k);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double vol = std::pow(r[i], n - 1) * h;
        const double diff = field.u[i] - evaluate_z(ansatz, r[i]);
        for (std::size_t j = 0; j < k; ++j) modes[j] = profile_derivative(r[i] - layers[j]);
        for (std::size_t j = 0; j < k; ++j) {
            d.projections[j] += diff * modes[j] * vol;
            for (std::size_t l = 0; l < k; ++l) d.gram(j, l) += modes[j] * modes[l] * vol;
        }
    }
    d.diagonally_dominant = true;
    for (std::size_t j = 0; j < k; ++j) {
        double off = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            if (l == j) continue;
            off += std::abs(d.gram(j, l));
            d.max_offdiag_ratio = std::max(d.max_offdiag_ratio,
                                           std::abs(d.gram(j, l)) / std::min(d.gram(j, j), d.gram(l, l)));
        }
        if (!(d.gram(j, j) > off)) d.diagonally_dominant = false;
    }
    return d;
}

TrackComparison compare_pde_vs_toda(const InterfaceTrack& pde, const InterfaceTrack& toda) {
    if (pde.layers() != toda.layers())
        throw WindowMismatch("compare_pde_vs_toda: tracks have different layer counts");
    if (toda.size() < 2) throw WindowMismatch("compare_pde_vs_toda: reference track too short");
    std::vector<std::size_t> order(toda.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return toda.times[a] < toda.times[b]; });
    std::vector<double> ts(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) ts[i] = toda.times[order[i]];
    const double span_tol = 1e-9 * std::max(1.0, std::abs(ts.front()));

    const int k = pde.layers();
    TrackComparison cmp;
    for (std::size_t m = 0; m < pde.size(); ++m) {
        const double t = pde.times[m];
        if (t < ts.front() - span_tol || t > ts.back() + span_tol) continue;
        std::size_t hi = std::upper_bound(ts.begin(), ts.end(), t) - ts.begin();
        hi = std::clamp<std::size_t>(hi, 1, ts.size() - 1);
        const std::size_t lo = hi - 1;
        const double wgt = ts[hi] == ts[lo] ? 0.0 : (t - ts[lo]) / (ts[hi] - ts[lo]);
        std::vector<double> ref(k);
        for (int j = 0; j < k; ++j)
            ref[j] = (1.0 - wgt) * toda.radii[order[lo]][j] + wgt * toda.radii[order[hi]][j];
        std::vector<double> le(k), ge(std::max(k - 1, 0));
        for (int j = 0; j < k; ++j) {
            le[j] = std::abs(pde.radii[m][j] - ref[j]);
            cmp.max_layer_error = std::max(cmp.max_layer_error, le[j]);
        }
        for (int j = 0; j + 1 < k; ++j) {
            ge[j] = std::abs((pde.radii[m][j + 1] - pde.radii[m][j]) - (ref[j + 1] - ref[j]));
            cmp.max_gap_error = std::max(cmp.max_gap_error, ge[j]);
        }
        cmp.times.push_back(t);
        cmp.layer_error.push_back(std::move(le));
        cmp.gap_error.push_back(std::move(ge));
    }
    if (cmp.times.empty())
        throw WindowMismatch("compare_pde_vs_toda: no PDE time inside the reference window");
    return cmp;
}

}  // namespace aclab
