#pragma once

#include <span>
#include <string>
#include <vector>

#include "aclab/eta.hpp"
#include "aclab/linalg.hpp"

namespace aclab {

/// Explicit constants of the first approximation.
struct TodaConstants {
    int k = 1;
    double beta = 0.0;
    std::vector<double> b;      ///< b_l, l = 1..k-1 (palindromic)
    std::vector<double> gamma;  ///< gamma_j, j = 1..k (antisymmetric)
};

/// b_l = -(1/sqrt2) log((k-l) l / (2 beta)); gamma_{k-j+1} = -gamma_j = (1/2) sum_{i=j}^{k-j} b_i.
/// Throws DomainError if k < 1 or beta <= 0.
TodaConstants toda_constants(int k, double beta);

/// Layer radii at one instant, ordered 0 < rho_1 < ... < rho_k.
struct LayerState {
    double t = 0.0;
    std::vector<double> rho;
};

/// True when 0 < rho_1 < ... < rho_k.
bool is_ordered(std::span<const double> rho);

/// rho0_j(t) = sqrt(-2(n-1)t) + (j - (k+1)/2) eta(t) + gamma_j.
/// Throws OrderingViolation if the radii are not positive and increasing.
LayerState first_approximation(int n, const TodaConstants& constants, const EtaSolution& eta,
                               double t);

/// Offsets rho~0_j = (j - (k+1)/2) eta + gamma_j without the sphere term.
std::vector<double> first_approximation_offsets(const TodaConstants& constants, double eta_value);

/// Right-hand side of the interaction part, beta R_j(rho) with
/// R_j = -e^{-sqrt2 (rho_{j+1} - rho_j)} + e^{-sqrt2 (rho_j - rho_{j-1})} and empty outer terms.
std::vector<double> interaction_terms(std::span<const double> rho, double beta);

struct Lemma52Residual {
    double max_abs = 0.0;     ///< max_{j,t} |LHS_j - gamma_j/(2t)|
    double max_scaled = 0.0;  ///< max_{j,t} |t| |LHS_j - gamma_j/(2t)|
    double worst_t = 0.0;
};

/// Substitutes rho~0 into  rho_j' + rho_j/(2t) + beta R_j(rho) = gamma_j/(2t)  using the
/// interpolated eta and its interpolant derivative.
Lemma52Residual verify_lemma52_residual(const TodaConstants& constants, const EtaSolution& eta,
                                        std::span<const double> t_samples);

/// Change of variables and spectral data of the linearised gap system.
struct ReductionMatrices {
    int k = 0;
    Matrix B;        ///< k x k: gaps in rows 1..k-1, sum in row k
    Matrix B_inv;
    Matrix C;        ///< (k-1) x (k-1) tridiag(-1, 2, -1)
    Matrix C_half;   ///< symmetric positive square root of C
    Matrix C_inv_half;
    std::vector<double> C_eigs;
    std::vector<double> a;  ///< a_l = (k-l) l
    Matrix A;               ///< C_half diag(a) C_half
    std::vector<double> A_eigs;
    Matrix Lambda;          ///< orthogonal eigenvectors of A (columns)
};

/// Requires k >= 2. Throws EigenFailure if a Jacobi sweep does not converge.
ReductionMatrices reduction_matrices(int k);

struct TodaOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double gap_floor = 1e-3;  ///< CollisionError below this gap
    /// When non-empty, output states at these times (must lie between the endpoints);
    /// otherwise every accepted step is recorded.
    std::vector<double> sample_times;
};

/// rho_j' = -(n-1)/rho_j + beta e^{-sqrt2 (rho_{j+1} - rho_j)} - beta e^{-sqrt2 (rho_j - rho_{j-1})},
/// integrated in tau = log(-t). t_final may lie on either side of initial.t (both negative).
/// Throws OrderingViolation on a bad initial state and CollisionError if a gap drops below
/// the floor.
std::vector<LayerState> integrate_toda(int n, double beta, const LayerState& initial,
                                       double t_final, const TodaOptions& options = {});

/// Velocities of the system above at one state.
std::vector<double> toda_rhs(int n, double beta, std::span<const double> rho);

/// Exact k = 1 solution rho(t) = sqrt(rho0^2 - 2(n-1)(t - t0)).
double single_layer_exact(int n, double rho0, double t0, double t);

}  // namespace aclab
