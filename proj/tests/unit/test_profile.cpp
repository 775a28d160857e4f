#include <cmath>

#include "aclab/errors.hpp"
#include "aclab/profile.hpp"
#include "doctest.h"

using namespace aclab;
using doctest::Approx;

TEST_CASE("beta matches 12 sqrt2") {
    const auto ic = compute_beta(1e-12);
    CHECK(std::abs(ic.beta - 12.0 * kSqrt2) / (12.0 * kSqrt2) < 1e-10);
    // Kinetic integral of the tanh profile is 2 sqrt2 / 3.
    CHECK(ic.i_kinetic == Approx(2.0 * kSqrt2 / 3.0).epsilon(1e-12));
    CHECK(ic.i_tail == Approx(8.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("beta is insensitive to the truncation window") {
    const double a = compute_beta_on_window(1e-12, 30.0).beta;
    const double b = compute_beta_on_window(1e-12, 45.0).beta;
    CHECK(std::abs(a - b) < 1e-9);
}

TEST_CASE("compute_beta rejects loose tolerances") {
    CHECK_THROWS_AS(compute_beta(1e-3), DomainError);
    CHECK_THROWS_AS(compute_beta(0.0), DomainError);
}

TEST_CASE("profile satisfies w'' + f(w) = 0") {
    const double h = 1e-3;
    for (double s = -12.0; s <= 12.0; s += 0.37) {
        const double fd = (heteroclinic(s + h) - 2 * heteroclinic(s) + heteroclinic(s - h)) / (h * h);
        CHECK(std::abs(fd + reaction(heteroclinic(s))) < 1e-6);
        CHECK(std::abs(profile_second_derivative(s) + reaction(heteroclinic(s))) < 1e-14);
        const double fd1 = (heteroclinic(s + h) - heteroclinic(s - h)) / (2 * h);
        CHECK(profile_derivative(s) == Approx(fd1).epsilon(1e-6));
    }
}

TEST_CASE("profile tails and symmetry") {
    CHECK(heteroclinic(0.0) == 0.0);
    CHECK(heteroclinic(3.0) == Approx(-heteroclinic(-3.0)));
    CHECK(heteroclinic(60.0) == 1.0);
    // w' ~ 2 sqrt2 e^{-sqrt2 |s|} far out, and never loses relative precision.
    const double s = 30.0;
    CHECK(profile_derivative(s) == Approx(2.0 * kSqrt2 * std::exp(-kSqrt2 * s)).epsilon(1e-10));
    CHECK(profile_derivative(s) > 0.0);
}

TEST_CASE("potential and reaction agree") {
    for (double u = -1.5; u <= 1.5; u += 0.25) {
        const double h = 1e-6;
        CHECK((potential(u + h) - potential(u - h)) / (2 * h) == Approx(reaction(u)).epsilon(1e-7));
    }
}

TEST_CASE("shrinking sphere radius") {
    CHECK(shrinking_sphere(2, -50.0) == Approx(10.0));
    CHECK(shrinking_sphere(3, -1.0) == Approx(2.0));
    CHECK_THROWS_AS(shrinking_sphere(2, 0.0), DomainError);
    CHECK_THROWS_AS(shrinking_sphere(1, -1.0), DomainError);
}
