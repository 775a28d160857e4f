#pragma once

#include <span>
#include <vector>

#include "aclab/toda.hpp"

namespace aclab {

/// Interface radii over time. Rows are ordered by time as recorded.
struct InterfaceTrack {
    std::vector<double> times;
    std::vector<std::vector<double>> radii;  ///< radii[m][j], increasing in j
    std::vector<std::vector<int>> signs;     ///< +1 where u increases through the crossing
    bool truncated = false;                  ///< crossing count changed; recording stopped
    double truncated_at = 0.0;

    std::size_t size() const noexcept { return times.size(); }
    int layers() const noexcept { return radii.empty() ? 0 : static_cast<int>(radii.front().size()); }
    void append(double t, std::vector<double> r, std::vector<int> s = {});
};

InterfaceTrack track_from_states(std::span<const LayerState> states);

struct Crossings {
    std::vector<double> radii;
    std::vector<int> signs;
};

/// Every sign change of u on the nodes, refined by two secant steps on the local cubic
/// through the four surrounding samples.
Crossings find_crossings(std::span<const double> nodes, std::span<const double> u);

/// find_crossings plus a count check. Throws InterfaceLost when fewer than expected_k
/// crossings exist and SpuriousInterface when there are more; both carry time t.
Crossings extract_interfaces(std::span<const double> nodes, std::span<const double> u,
                             int expected_k, double t = 0.0);

}  // namespace aclab
