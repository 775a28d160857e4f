#include <cmath>
#include <random>

#include "aclab/analysis.hpp"
#include "aclab/ansatz.hpp"
#include "aclab/errors.hpp"
#include "aclab/profile.hpp"
#include "doctest.h"

using namespace aclab;
using doctest::Approx;

namespace {
InterfaceTrack synthetic_fanout(double a_lo, double a_hi) {
    InterfaceTrack tr;
    for (double a = a_hi; a >= a_lo; a /= 1.2) {
        const double x = std::log(a / std::log(a)) / kSqrt2;
        const double s = shrinking_sphere(2, -a);
        tr.append(-a, {s - 0.5 * x - 1.0, s + 0.5 * x + 1.0});
    }
    return tr;
}
}  // namespace

TEST_CASE("fan-out fit recovers exact slopes") {
    const auto f = fit_theorem12(synthetic_fanout(1e2, 1e5), 2, 2);
    CHECK(f.slopes[0] == Approx(-0.5).epsilon(1e-10));
    CHECK(f.slopes[1] == Approx(0.5).epsilon(1e-10));
    CHECK(f.intercepts[1] == Approx(1.0).epsilon(1e-9));
    CHECK(f.residual_rms[0] < 1e-10);
    CHECK_THROWS_AS(fit_theorem12(synthetic_fanout(1e2, 1e3), 2, 2), WindowTooShort);
}

TEST_CASE("mcf residual of an exact shrinking sphere") {
    InterfaceTrack tr;
    for (double t = -50.0; t <= -5.0; t += 0.25) tr.append(t, {std::sqrt(-2.0 * t + 1.5)});
    const auto m = mcf_residual(tr, 2);
    REQUIRE(m.times.size() == tr.size() - 4);
    // Quadratic fits over five samples 0.25 apart: O(dt^2) error.
    for (const auto& r : m.residual) CHECK(std::abs(r[0]) < 5e-4);
    const auto s = fit_sphere_constant(tr, 2);
    CHECK(s.c == Approx(1.5).epsilon(1e-12));
    CHECK(s.drift < 1e-12);
    CHECK(std::abs(s.log_slope) < 1e-12);
}

TEST_CASE("mcf residual of a Toda track is the interaction term") {
    const double beta = 12.0 * kSqrt2;
    TodaOptions opt;
    for (double t = -1e3; t <= -900.0; t += 2.0) opt.sample_times.push_back(t);
    const auto states = integrate_toda(2, beta, {-1e3, {40.0, 47.0}}, -900.0, opt);
    const auto tr = track_from_states(states);
    const auto m = mcf_residual(tr, 2);
    for (std::size_t i = 0; i < m.times.size(); ++i) {
        const auto& r = tr.radii[i + 2];
        CHECK(m.residual[i][0] == Approx(beta * std::exp(-kSqrt2 * (r[1] - r[0]))).epsilon(0.1));
    }
}

TEST_CASE("projections vanish on the ansatz and are linear") {
    const std::vector<double> layers{12.0, 18.0};
    const MultiLayerAnsatz a(layers);
    const auto g = RadialGrid::with_spacing(2, 40.0, 0.02);
    const auto z = RadialField::sample(g, -5.0, [&](double r) { return evaluate_z(a, r); });
    for (double p : project_residual(z, layers, 2).projections) CHECK(std::abs(p) < 1e-14);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise;
    RadialField p1 = z, p2 = z, mix = z;
    const double ca = 0.7, cb = -1.9;
    for (std::size_t i = 0; i < z.u.size(); ++i) {
        const double d1 = noise(rng) * 1e-2, d2 = noise(rng) * 1e-2;
        p1.u[i] += d1;
        p2.u[i] += d2;
        mix.u[i] += ca * d1 + cb * d2;
    }
    const auto q1 = project_residual(p1, layers, 2).projections;
    const auto q2 = project_residual(p2, layers, 2).projections;
    const auto qm = project_residual(mix, layers, 2).projections;
    for (int j = 0; j < 2; ++j) CHECK(qm[j] == Approx(ca * q1[j] + cb * q2[j]).epsilon(1e-10));
}

TEST_CASE("projection of a single mode") {
    const std::vector<double> layers{20.0, 30.0};
    const MultiLayerAnsatz a(layers);
    const auto g = RadialGrid::with_spacing(2, 60.0, 0.01);
    const auto u = RadialField::sample(g, -1.0, [&](double r) { return evaluate_z(a, r) + profile_derivative(r - 20.0); });
    const auto d = project_residual(u, layers, 2);
    CHECK(d.projections[0] == Approx(2.0 * kSqrt2 / 3.0 * 20.0).epsilon(1e-3));
    CHECK(std::abs(d.projections[1]) < 1e-3 * d.projections[0]);
}

TEST_CASE("Gram overlap follows the sech^2 closed form") {
    // int sech^2(x) sech^2(x - c) dx = 4 (c cosh c - sinh c) / sinh^3 c with c = d / sqrt2.
    const auto ratio = [](double d) {
        const double c = d / kSqrt2;
        return 3.0 * (c * std::cosh(c) - std::sinh(c)) / std::pow(std::sinh(c), 3);
    };
    for (double d : {3.0, 5.0, 8.0}) {
        const std::vector<double> layers{20.0, 20.0 + d};
        const auto g = RadialGrid::with_spacing(1, 60.0, 0.01);
        const auto u = RadialField::sample(g, 0.0, [&](double r) { return evaluate_z(MultiLayerAnsatz(layers), r); });
        const auto pd = project_residual(u, layers, 1);
        CHECK(pd.max_offdiag_ratio == Approx(ratio(d)).epsilon(1e-6));
        CHECK(pd.diagonally_dominant);
    }
    CHECK(ratio(3.0) == Approx(0.2102).epsilon(1e-3));
}

TEST_CASE("track comparison") {
    const auto tr = synthetic_fanout(1e2, 1e4);
    const auto same = compare_pde_vs_toda(tr, tr);
    CHECK(same.max_layer_error == 0.0);
    CHECK(same.max_gap_error == 0.0);
    InterfaceTrack other;
    other.append(-5.0, {1.0});
    other.append(-4.0, {1.0});
    CHECK_THROWS_AS(compare_pde_vs_toda(tr, other), WindowMismatch);
}
