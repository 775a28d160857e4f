#include <cmath>

#include "aclab/errors.hpp"
#include "aclab/eta.hpp"
#include "doctest.h"

using namespace aclab;
using doctest::Approx;

namespace {
const EtaSolution& shared_eta() {
    static const EtaSolution eta = solve_eta(1e6, 1e-10);
    return eta;
}
}  // namespace

TEST_CASE("eta matches an independent high-order integration") {
    // Reference values from an 8th-order Runge-Kutta run at rel_tol 1e-13.
    const struct { double t, value; } ref[] = {
        {-2.0, 0.5465218500422034},   {-10.0, 1.4565909055993267}, {-100.0, 2.772811596868826},
        {-1e3, 4.178824430350256},    {-1e4, 5.635370951857477},   {-1e5, 7.1238164306614635},
        {-1e6, 8.63426531232651},
    };
    const auto& eta = shared_eta();
    CHECK(eta.value(-1.0) == 0.0);
    for (const auto& r : ref) CHECK(eta.value(r.t) == Approx(r.value).epsilon(1e-8));
}

TEST_CASE("eta is nonnegative, monotone and tracks its asymptote") {
    const auto& eta = shared_eta();
    CHECK(eta.value(-100.0) > eta.value(-10.0));
    CHECK(eta.value(-10.0) > eta.value(-2.0));
    CHECK(eta.value(-2.0) > 0.0);
    double prev = 0.0;
    for (double a = 1e3; a <= 1e6; a *= 1.05) {
        const double v = eta.value(-a);
        CHECK(v >= prev);
        CHECK(v <= EtaSolution::upper_bound(-a));
        prev = v;
    }
    CHECK(eta.asymptotic_offset(-1e6, -1e3) <= 2.0);
    CHECK(eta.value(-1e4) == Approx(EtaSolution::asymptote(-1e4)).epsilon(0.5));
}

TEST_CASE("eta residual at dense-output midpoints stays near the tolerance") {
    CHECK(shared_eta().max_midpoint_residual() <= 10.0 * 1e-10);
}

TEST_CASE("eta rejects bad arguments") {
    CHECK_THROWS_AS(solve_eta(5.0, 1e-10), DomainError);
    CHECK_THROWS_AS(solve_eta(1e3, 1e-6), DomainError);
    CHECK_THROWS_AS(shared_eta().value(-2e6), DomainError);
}
