#include "aclab/track.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aclab/errors.hpp"

namespace aclab {

void InterfaceTrack::append(double t, std::vector<double> r, std::vector<int> s) {
    times.push_back(t);
    radii.push_back(std::move(r));
    signs.push_back(std::move(s));
}

InterfaceTrack track_from_states(std::span<const LayerState> states) {
    InterfaceTrack tr;
    for (const auto& s : states) {
        std::vector<int> sg(s.rho.size());
        for (std::size_t j = 0; j < sg.size(); ++j) sg[j] = j % 2 == 0 ? 1 : -1;
        tr.append(s.t, s.rho, std::move(sg));
    }
    return tr;
}

namespace {

double lagrange4(const double* x, const double* y, double at) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        double l = 1.0;
        for (int j = 0; j < 4; ++j)
            if (j != i) l *= (at - x[j]) / (x[i] - x[j]);
        sum += l * y[i];
    }
    return sum;
}

}  // namespace

Crossings find_crossings(std::span<const double> nodes, std::span<const double> u) {
    if (nodes.size() != u.size()) throw DomainError("find_crossings: size mismatch");
    Crossings out;
    const std::size_t m = u.size();
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double a = u[i], b = u[i + 1];
        // A node sitting exactly on zero is attributed to the bracket on its right.
        if (!((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0))) continue;
        const double xa = nodes[i], xb = nodes[i + 1];
        double x0 = xa, f0 = a;
        double x1 = xa - a * (xb - xa) / (b - a);
        if (m >= 4) {
            const std::size_t s = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, m - 4);
            auto p = [&](double x) { return lagrange4(&nodes[s], &u[s], x); };
            double f1 = p(x1);
            for (int it = 0; it < 2 && f1 != f0; ++it) {
                const double x2 = std::clamp(x1 - f1 * (x1 - x0) / (f1 - f0), xa, xb);
                x0 = x1;
                f0 = f1;
                x1 = x2;
                f1 = p(x1);
            }
        }
        out.radii.push_back(x1);
        out.signs.push_back(b > a ? 1 : -1);
    }
    return out;
}

Crossings extract_interfaces(std::span<const double> nodes, std::span<const double> u,
                             int expected_k, double t) {
    Crossings c = find_crossings(nodes, u);
    const int found = static_cast<int>(c.radii.size());
    if (found == expected_k) return c;
    std::ostringstream os;
    os << "expected " << expected_k << " interfaces at t = " << t << ", found " << found;
    if (found > 0) {
        os << " at r =";
        for (double r : c.radii) os << ' ' << r;
    }
    if (found < expected_k) throw InterfaceLost("extract_interfaces: " + os.str(), t);
    throw SpuriousInterface("extract_interfaces: " + os.str(), t);
}

}  // namespace aclab
