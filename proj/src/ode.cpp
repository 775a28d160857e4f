#include "aclab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aclab/errors.hpp"

namespace aclab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kAlpha = 0.7 / 5.0;
constexpr double kBeta = 0.4 / 5.0;

}  // namespace

bool DenseSolution::covers(double x) const {
    if (nodes_.empty()) return false;
    const double lo = std::min(x_begin(), x_end());
    const double hi = std::max(x_begin(), x_end());
    return x >= lo && x <= hi;
}

std::size_t DenseSolution::segment(double x) const {
    if (!covers(x)) {
        std::ostringstream os;
        os << "dense output requested at " << x << " outside [" << x_begin() << ", " << x_end()
           << "]";
        throw DomainError(os.str());
    }
    const bool forward = x_end() >= x_begin();
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x, [&](const OdeNode& n, double v) {
        return forward ? n.x < v : n.x > v;
    });
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    if (i == 0) return 0;
    if (i >= nodes_.size()) return nodes_.size() - 2;
    return i - 1;
}

std::vector<double> DenseSolution::value(double x) const {
    if (nodes_.size() == 1) return nodes_.front().y;
    const std::size_t i = segment(x);
    const OdeNode& a = nodes_[i];
    const OdeNode& b = nodes_[i + 1];
    const double h = b.x - a.x;
    const double s = (x - a.x) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    std::vector<double> out(a.y.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = h00 * a.y[k] + h * h10 * a.dydx[k] + h01 * b.y[k] + h * h11 * b.dydx[k];
    return out;
}

std::vector<double> DenseSolution::derivative(double x) const {
    if (nodes_.size() == 1) return nodes_.front().dydx;
    const std::size_t i = segment(x);
    const OdeNode& a = nodes_[i];
    const OdeNode& b = nodes_[i + 1];
    const double h = b.x - a.x;
    const double s = (x - a.x) / h;
    const double d00 = 6 * s * (s - 1) / h;
    const double d10 = (1 - s) * (1 - 3 * s);
    const double d01 = -d00;
    const double d11 = s * (3 * s - 2);
    std::vector<double> out(a.y.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = d00 * a.y[k] + d10 * a.dydx[k] + d01 * b.y[k] + d11 * b.dydx[k];
    return out;
}

DenseSolution integrate_dopri5(const OdeRhs& rhs, double x0, std::span<const double> y0,
                               double x_end, const OdeOptions& opt, const StepObserver& observer) {
    const std::size_t n = y0.size();
    const double dir = x_end >= x0 ? 1.0 : -1.0;
    std::vector<double> y(y0.begin(), y0.end()), ytmp(n), ynew(n), err(n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);

    long nfev = 0;
    auto f = [&](double x, const std::vector<double>& state, std::vector<double>& out) {
        rhs(x, state, out);
        ++nfev;
    };

    auto scaled_norm = [&](const std::vector<double>& e, const std::vector<double>& ya,
                           const std::vector<double>& yb) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            s += (e[i] / sc) * (e[i] / sc);
        }
        return std::sqrt(s / static_cast<double>(std::max<std::size_t>(n, 1)));
    };

    f(x0, y, k1);
    std::vector<OdeNode> nodes;
    nodes.push_back({x0, y, k1});
    if (observer && !observer(nodes.back())) return DenseSolution(std::move(nodes));

    const double span = std::abs(x_end - x0);
    double h = opt.initial_step;
    if (h <= 0.0) {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / n);
        d1 = std::sqrt(d1 / n);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, 1e-3 * std::max(span, 1e-300));
    }
    h = std::min({h, opt.max_step, span});

    double x = x0;
    double err_old = 1e-4;
    bool last_rejected = false;
    long rejected = 0;
    long steps = 0;

    while (dir * (x_end - x) > 0.0) {
        if (++steps > opt.max_steps)
            throw StepFailure("integrate_dopri5: exceeded max_steps at x = " + std::to_string(x));
        if (h < opt.min_step * std::max(1.0, std::abs(x)))
            throw StepFailure("integrate_dopri5: step size underflow at x = " + std::to_string(x));
        bool final_step = false;
        if (h >= dir * (x_end - x)) {
            h = dir * (x_end - x);
            final_step = true;
        }
        const double hs = dir * h;

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
        f(x + c2 * hs, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        f(x + c3 * hs, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(x + c4 * hs, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(x + c5 * hs, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                   a65 * k5[i]);
        const double x_new = final_step ? x_end : x + hs;
        f(x_new, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(x_new, ynew, k7);
        for (std::size_t i = 0; i < n; ++i)
            err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);

        const double e = scaled_norm(err, y, ynew);
        if (!std::isfinite(e)) {
            h *= 0.2;
            last_rejected = true;
            ++rejected;
            continue;
        }
        if (e <= 1.0) {
            double fac = kSafety * std::pow(std::max(e, 1e-10), -kAlpha) * std::pow(err_old, kBeta);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
            err_old = std::max(e, 1e-4);
            x = x_new;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            nodes.push_back({x, y, k1});
            last_rejected = false;
            if (observer && !observer(nodes.back())) break;
            if (final_step) break;
            h = std::min(h * fac, opt.max_step);
        } else {
            h *= std::max(0.2, kSafety * std::pow(e, -1.0 / 5.0));
            last_rejected = true;
            ++rejected;
        }
    }

    DenseSolution out(std::move(nodes));
    out.rejected_steps = rejected;
    out.rhs_evaluations = nfev;
    return out;
}

}  // namespace aclab
