#include <cmath>
#include <random>

#include "aclab/errors.hpp"
#include "aclab/profile.hpp"
#include "aclab/toda.hpp"
#include "doctest.h"

using namespace aclab;
using doctest::Approx;

namespace {
const double kBeta = 12.0 * kSqrt2;
const EtaSolution& eta6() {
    static const EtaSolution eta = solve_eta(1e6, 1e-10);
    return eta;
}
}  // namespace

TEST_CASE("Toda constants for k = 2") {
    const auto c = toda_constants(2, kBeta);
    REQUIRE(c.b.size() == 1);
    CHECK(c.b[0] == Approx(std::log(24.0 * kSqrt2) / kSqrt2).epsilon(1e-14));
    CHECK(c.b[0] == Approx(2.49228795).epsilon(1e-8));
    // The balance beta e^{-sqrt2 b} = a / 2 with a = (k - l) l = 1.
    CHECK(kBeta * std::exp(-kSqrt2 * c.b[0]) == Approx(0.5));
    CHECK(c.gamma[0] == Approx(-c.b[0] / 2));
    CHECK(c.gamma[1] == Approx(c.b[0] / 2));
}

TEST_CASE("Toda constants are palindromic and antisymmetric") {
    for (int k = 1; k <= 10; ++k) {
        const auto c = toda_constants(k, kBeta);
        CHECK(static_cast<int>(c.b.size()) == k - 1);
        for (int l = 0; l < k - 1; ++l) CHECK(c.b[l] == Approx(c.b[k - 2 - l]));
        for (int j = 0; j < k; ++j) CHECK(c.gamma[j] == Approx(-c.gamma[k - 1 - j]));
    }
    CHECK_THROWS_AS(toda_constants(0, kBeta), DomainError);
    CHECK_THROWS_AS(toda_constants(2, -1.0), DomainError);
}

TEST_CASE("first approximation satisfies the reduced identity") {
    std::vector<double> ts;
    for (double a = 1e2; a <= 1e5 * 1.0001; a *= 1.25) ts.push_back(-a);
    for (int k : {2, 4}) {
        const auto res = verify_lemma52_residual(toda_constants(k, kBeta), eta6(), ts);
        CHECK(res.max_scaled <= 1e-6);
    }
    // No interaction and no offsets with a single layer.
    CHECK(verify_lemma52_residual(toda_constants(1, kBeta), eta6(), ts).max_abs == 0.0);
}

TEST_CASE("first approximation gap at t = -1e4") {
    const auto s = first_approximation(2, toda_constants(2, kBeta), eta6(), -1e4);
    CHECK(s.rho[1] - s.rho[0] == Approx(eta6().value(-1e4) + 2.49228795).epsilon(1e-8));
    CHECK(std::abs(s.rho[1] - s.rho[0] - 7.4) <= 2.0);
}

TEST_CASE("reduction matrices") {
    const auto r2 = reduction_matrices(2);
    CHECK(r2.C(0, 0) == 2.0);
    CHECK(r2.C_half(0, 0) == Approx(kSqrt2));
    CHECK(r2.A_eigs[0] == Approx(2.0));
    const auto r3 = reduction_matrices(3);
    CHECK(r3.C_eigs[0] == Approx(1.0));
    CHECK(r3.C_eigs[1] == Approx(3.0));
    for (int k = 2; k <= 10; ++k) {
        const auto r = reduction_matrices(k);
        CHECK(max_abs(r.B * r.B_inv - Matrix::identity(k)) < 1e-12);
        CHECK(max_abs(r.C_half * r.C_half - r.C) < 1e-12);
        CHECK(max_abs(r.C - r.C.transpose()) == 0.0);
        for (double l : r.A_eigs) CHECK(l > 0.0);
        for (int l = 1; l < k; ++l)
            CHECK(r.C_eigs[l - 1] == Approx(2.0 - 2.0 * std::cos(l * M_PI / k)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(reduction_matrices(1), DomainError);
}

TEST_CASE("single layer follows the exact shrinking law") {
    const LayerState s{-50.0, {10.0}};
    TodaOptions opt;
    opt.sample_times = {-20.0, -5.0};
    const auto out = integrate_toda(2, kBeta, s, -5.0, opt);
    REQUIRE(out.size() == 2);
    CHECK(out[0].rho[0] == Approx(single_layer_exact(2, 10.0, -50.0, -20.0)).epsilon(1e-8));
    CHECK(out[1].rho[0] == Approx(std::sqrt(10.0)).epsilon(1e-8));
}

TEST_CASE("backward k = 2 run keeps the gap near eta + b") {
    const auto c = toda_constants(2, kBeta);
    // Backward in time: the forward direction amplifies gap errors like exp(log^2|t| / 4).
    const auto start = first_approximation(2, c, eta6(), -1e2);
    TodaOptions opt;
    for (double a = 1e3; a <= 1e5; a *= 1.5) opt.sample_times.push_back(-a);
    const auto out = integrate_toda(2, kBeta, start, -1e5, opt);
    REQUIRE(out.size() == opt.sample_times.size());
    for (const auto& s : out)
        CHECK(std::abs(s.rho[1] - s.rho[0] - (eta6().value(s.t) + c.b[0])) <= 0.5);
}

TEST_CASE("mean radius drifts like a sphere of the mean radius") {
    const LayerState s{-1e3, {40.0, 48.0}};
    const auto v = toda_rhs(2, kBeta, s.rho);
    const double mean = 0.5 * (v[0] + v[1]);
    const double expect = -(2 - 1) * 2.0 / (40.0 + 48.0);
    // The interaction cancels in the sum; the remainder is O(gap^2 / rho^3).
    CHECK(std::abs(mean - expect) <= 2.0 * 64.0 / std::pow(44.0, 3));
}

TEST_CASE("ordering is preserved for random data") {
    // Backward in time the interaction is repulsive, so no pair can meet.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> gap(0.5, 6.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 2 + trial % 4;
        LayerState s{-1e2, {}};
        double r = 40.0;
        for (int j = 0; j < k; ++j) {
            s.rho.push_back(r);
            r += gap(rng);
        }
        TodaOptions opt;
        for (double a = 1.3e2; a < 3e3; a *= 1.3) opt.sample_times.push_back(-a);
        opt.sample_times.push_back(-3e3);
        for (const auto& st : integrate_toda(2, kBeta, s, -3e3, opt)) CHECK(is_ordered(st.rho));
    }
}

TEST_CASE("colliding layers are reported with time and layer") {
    TodaOptions opt;
    opt.gap_floor = 0.05;
    try {
        integrate_toda(2, kBeta, {-100.0, {10.0, 10.4, 20.0}}, -1.0, opt);
        FAIL("expected a collision");
    } catch (const CollisionError& e) {
        CHECK(e.layer() == 1);
        CHECK(e.time() < -1.0);
        CHECK(e.time() > -100.0);
    }
    CHECK_THROWS_AS(integrate_toda(2, kBeta, {-10.0, {5.0, 4.0}}, -5.0), OrderingViolation);
}
