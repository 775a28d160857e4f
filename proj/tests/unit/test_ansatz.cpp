#include <cmath>
#include <random>

#include "aclab/ansatz.hpp"
#include "aclab/errors.hpp"
#include "aclab/profile.hpp"
#include "doctest.h"

using namespace aclab;
using doctest::Approx;

TEST_CASE("ansatz values at hand-computed points") {
    CHECK(evaluate_z(MultiLayerAnsatz({5.0}), 5.0) == 0.0);
    const MultiLayerAnsatz two({4.0, 7.0});
    CHECK(evaluate_z(two, 5.5) == Approx(2.0 * heteroclinic(1.5) - 1.0).epsilon(1e-15));
    CHECK(evaluate_z(two, 0.1) == Approx(-1.0).epsilon(5e-3));
    CHECK(evaluate_z(two, 40.0) == Approx(-1.0).epsilon(1e-12));
    CHECK(evaluate_z(MultiLayerAnsatz({3.0, 9.0, 15.0}), 40.0) == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(MultiLayerAnsatz({4.0, 4.0}), OrderingViolation);
}

TEST_CASE("ansatz stays within [-1, 1]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gap(0.2, 8.0), pos(0.0, 60.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> rho;
        double r = 1.0;
        for (int j = 0; j < 1 + trial % 6; ++j) rho.push_back(r += gap(rng));
        const MultiLayerAnsatz a(rho);
        for (int i = 0; i < 50; ++i) CHECK(std::abs(evaluate_z(a, pos(rng))) <= 1.0 + 1e-15);
    }
}

TEST_CASE("error term of a single layer moving with its curvature") {
    const MultiLayerAnsatz a({30.0});
    const std::vector<double> v{-(2 - 1) / 30.0};
    CHECK(std::abs(error_term(a, v, 2, 30.0)) < 1e-15);
    // Far from the layer only the exponentially small profile tail is left.
    CHECK(std::abs(error_term(a, v, 2, 40.0)) <= 3.0 * std::exp(-kSqrt2 * 10.0) * 0.01);
    CHECK_THROWS_AS(error_term(a, v, 2, 0.0), DomainError);
}

TEST_CASE("mid-gap error is the square of the tail overlap") {
    for (double gap : {6.0, 8.0, 10.0}) {
        const MultiLayerAnsatz a({50.0, 50.0 + gap});
        const double mid = 50.0 + gap / 2;
        const std::vector<double> v(2, -1.0 / mid);
        const double e = error_term(a, v, 2, mid);
        const double tail = 1.0 - heteroclinic(gap / 2);
        // f(z) - f(w1) + f(w2) at the midpoint expands to 6 a^2 + O(a^3) with a = 1 - w(gap/2),
        // which is 24 e^{-sqrt2 gap} to leading order.
        CHECK(e == Approx(6.0 * tail * tail).epsilon(3.0 * tail));
        CHECK(e == Approx(24.0 * std::exp(-kSqrt2 * gap)).epsilon(0.05));
    }
}

TEST_CASE("weight function piecewise values") {
    const WeightFunction wf(1.0, {10.0, 16.0}, 6.0);
    CHECK(weight_phi(wf, 5.0) == Approx(std::exp(-5.0)));
    CHECK(weight_phi(wf, 8.0) == Approx(std::exp(-8.0)));
    CHECK(weight_phi(wf, 14.0) == Approx(std::exp(-4.0)));
    CHECK(weight_phi(wf, 20.0) == Approx(std::exp(-10.0)));
    const WeightFunction sym(1.0, {10.0, 16.0}, 6.0, true);
    CHECK(weight_phi(sym, 8.0) == Approx(std::exp(-4.0) + std::exp(-8.0)));
    const WeightFunction one(1.2, {10.0}, 0.0);
    CHECK(weight_phi(one, 13.0) == Approx(std::exp(-1.2 * 3.0)));
}

TEST_CASE("weighted norm") {
    const WeightFunction wf(1.0, {10.0, 16.0}, 6.0);
    std::vector<double> nodes, phi, zero;
    for (double r = 0.5; r < 30.0; r += 0.5) {
        nodes.push_back(r);
        phi.push_back(weight_phi(wf, r));
        zero.push_back(0.0);
    }
    CHECK(weighted_norm(nodes, phi, wf) == Approx(1.0));
    CHECK(weighted_norm(nodes, zero, wf) == 0.0);
}

TEST_CASE("weight exponent window") {
    CHECK_THROWS_AS(WeightFunction(2.0, {10.0}, 0.0), DomainError);
    CHECK_THROWS_AS(WeightFunction(0.7, {10.0}, 0.0), DomainError);
    CHECK_THROWS_AS(WeightFunction(kSqrt2, {10.0}, 0.0), DomainError);
    CHECK_NOTHROW(WeightFunction(1.4, {10.0}, 0.0));
}

TEST_CASE("error bound constant grows as sigma approaches sqrt2") {
    const MultiLayerAnsatz a({40.0, 48.0});
    const std::vector<double> v{-1.0 / 40.0 + 0.01, -1.0 / 48.0 - 0.01};
    std::vector<double> nodes;
    for (double r = 0.05; r < 80.0; r += 0.05) nodes.push_back(r);
    double prev = 0.0;
    for (double s : {1.0, 1.2, 1.35, 1.4}) {
        const double c = check_error_bound(a, v, WeightFunction(s, a.rho, 8.0), 2, nodes).constant;
        CHECK(c > prev);
        prev = c;
    }
}
