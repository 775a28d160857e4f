#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "aclab/track.hpp"

namespace aclab {

/// Cell-centred grid on (0, r_max): r_i = (i + 1/2) h with h = r_max / m.
/// n_dim = 1 is accepted as a planar mode without the curvature term.
struct RadialGrid {
    int n_dim = 2;
    double r_max = 0.0;
    int m = 0;
    double h = 0.0;
    std::vector<double> nodes;

    /// Throws DomainError for n_dim < 1, r_max <= 0 or m < 8.
    static std::shared_ptr<const RadialGrid> make(int n_dim, double r_max, int m);
    /// Picks m = round(r_max / h_target).
    static std::shared_ptr<const RadialGrid> with_spacing(int n_dim, double r_max, double h_target);
};

struct RadialField {
    std::shared_ptr<const RadialGrid> grid;
    std::vector<double> u;
    double t = 0.0;

    /// Samples g at the grid nodes.
    static RadialField sample(std::shared_ptr<const RadialGrid> grid, double t,
                              const std::function<double(double)>& g);
};

enum class TimeScheme { Imex, CrankNicolsonHeun };
enum class OuterBoundary { Dirichlet, Neumann };

std::string to_string(TimeScheme s);
TimeScheme time_scheme_from_string(const std::string& s);

struct SolverConfig {
    double dt = 1e-3;
    TimeScheme scheme = TimeScheme::Imex;
    OuterBoundary outer = OuterBoundary::Dirichlet;
    double outer_value = -1.0;
    /// Multiplies f(u); equals epsilon^{-2} for the scaled equation.
    double reaction_scale = 1.0;

    /// Requires 0 < dt, reaction_scale >= 0 and dt * reaction_scale <= 0.25. Throws ConfigError naming the field.
    void validate() const;
};

/// Far-field phase of a k-layer configuration: -1 for even k, +1 for odd k.
double far_field_value(int k);

/// Face-flux discretisation of r^{1-n} (r^{n-1} u_r)_r. The inner face carries zero flux;
/// the outer face uses the Dirichlet ghost value or zero flux.
std::vector<double> discrete_operator(const RadialField& field, const SolverConfig& config);

/// Reusable stepper; the tridiagonal coefficients are built once per (grid, config).
class RadialSolver {
public:
    RadialSolver(std::shared_ptr<const RadialGrid> grid, SolverConfig config);

    const SolverConfig& config() const noexcept { return config_; }
    const RadialGrid& grid() const noexcept { return *grid_; }

    /// Advances by dt (or the given step, which must not exceed config().dt).
    void advance(RadialField& field) const { advance(field, config_.dt); }
    void advance(RadialField& field, double dt) const;

    /// L u including the Dirichlet ghost contribution.
    void apply_operator(std::span<const double> u, std::vector<double>& out) const;

private:
    void solve_implicit(double theta_dt, std::vector<double>& rhs) const;

    std::shared_ptr<const RadialGrid> grid_;
    SolverConfig config_;
    std::vector<double> lower_, upper_, diag_;  ///< operator coefficients per cell
    double boundary_source_ = 0.0;              ///< Dirichlet contribution to the last cell
};

RadialField step(const RadialField& field, const SolverConfig& config);

struct NormSample {
    double t = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    double far_field = 0.0;  ///< value in the outermost cell
};

struct EvolveOptions {
    int expected_k = 1;
    double track_interval = 0.05;     ///< time between interface extractions
    double snapshot_interval = 0.0;   ///< 0 keeps only the final field
    /// Stop and flag the track instead of throwing InterfaceLost / SpuriousInterface.
    bool stop_on_interface_change = false;
    std::function<void(const RadialField&)> on_snapshot;
};

struct EvolveResult {
    RadialField final_field;
    InterfaceTrack track;
    std::vector<NormSample> norms;
    std::vector<RadialField> snapshots;
    long steps = 0;
    double max_overshoot = 0.0;  ///< max(|u| - 1, 0) over all steps
};

/// Steps from initial.t to t_final with a uniform step no larger than config.dt.
/// Throws InterfaceLost / SpuriousInterface (with the time) if the crossing count changes,
/// unless stop_on_interface_change is set.
EvolveResult evolve(const RadialField& initial, const SolverConfig& config, double t_final,
                    const EvolveOptions& options = {});

struct RescaleDiscrepancy {
    double max_abs = 0.0;
    double worst_x = 0.0;
    int samples = 0;
};

/// Compares u(x, t) with u_eps(eps x, eps^2 t), where u_eps solves the equation with
/// reaction multiplied by eps^{-2}. u_eps is interpolated with 4-point Lagrange stencils.
/// Throws GridMismatch if the times disagree or no sample point is interior to u_eps's grid.
RescaleDiscrepancy rescale_check(const RadialField& u, const RadialField& u_eps, double epsilon);

/// Interpolates a field at radius r (4-point Lagrange, clamped stencil). Throws GridMismatch
/// outside [r_0, r_{m-1}].
double interpolate(const RadialField& field, double r);

}  // namespace aclab
