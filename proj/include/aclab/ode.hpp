#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace aclab {

using OdeRhs = std::function<void(double x, std::span<const double> y, std::span<double> dydx)>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  ///< 0 selects a heuristic first step
    double max_step = std::numeric_limits<double>::infinity();
    double min_step = 1e-12;    ///< relative to max(1, |x|)
    long max_steps = 10'000'000;
};

struct OdeNode {
    double x = 0.0;
    std::vector<double> y;
    std::vector<double> dydx;
};

/// Accepted-step trajectory with piecewise cubic Hermite interpolation between nodes.
class DenseSolution {
public:
    DenseSolution() = default;
    explicit DenseSolution(std::vector<OdeNode> nodes) : nodes_(std::move(nodes)) {}

    const std::vector<OdeNode>& nodes() const noexcept { return nodes_; }
    std::size_t dimension() const noexcept { return nodes_.empty() ? 0 : nodes_.front().y.size(); }
    double x_begin() const { return nodes_.front().x; }
    double x_end() const { return nodes_.back().x; }
    bool covers(double x) const;

    /// Interpolated state; throws DomainError outside the integrated range.
    std::vector<double> value(double x) const;
    /// Derivative of the interpolant (not a fresh right-hand-side evaluation).
    std::vector<double> derivative(double x) const;

    long accepted_steps() const noexcept { return static_cast<long>(nodes_.size()) - 1; }
    long rejected_steps = 0;
    long rhs_evaluations = 0;

private:
    std::size_t segment(double x) const;
    std::vector<OdeNode> nodes_;
};

/// Observer invoked after every accepted step; returning false stops the integration.
using StepObserver = std::function<bool(const OdeNode&)>;

/// Dormand-Prince 5(4) with PI step-size control. x_end may lie on either side of x0.
/// Throws StepFailure when the controller drives |h| below min_step.
DenseSolution integrate_dopri5(const OdeRhs& rhs, double x0, std::span<const double> y0,
                               double x_end, const OdeOptions& options,
                               const StepObserver& observer = {});

}  // namespace aclab
