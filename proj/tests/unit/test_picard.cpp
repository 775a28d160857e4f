#include <cmath>

#include "aclab/errors.hpp"
#include "aclab/picard.hpp"
#include "aclab/profile.hpp"
#include "doctest.h"

using namespace aclab;
using doctest::Approx;

namespace {
const double kBeta = 12.0 * kSqrt2;
const EtaSolution& eta5() {
    static const EtaSolution eta = solve_eta(1e5, 1e-10);
    return eta;
}
}  // namespace

TEST_CASE("picard iteration contracts for k = 2") {
    const auto c = toda_constants(2, kBeta);
    const auto r = picard_correction(2, c, eta5(), 100.0, 1e5);
    CHECK(r.converged);
    CHECK(r.max_contraction_ratio < 1.0);
    for (std::size_t i = 2; i < r.changes.size(); ++i) CHECK(r.changes[i] < r.changes[i - 1]);
    CHECK(r.envelope_fit.relative_rms < 0.3);
    CHECK(r.envelope_fit.coefficient > 0.0);
    REQUIRE(r.mode_rates.size() == 1);
    // The only gap mode has eigenvalue 2 (A = [2]), so the rate is sqrt2.
    CHECK(r.mode_rates[0] == Approx(kSqrt2));
}

TEST_CASE("corrected state reproduces the Toda flow") {
    const auto c = toda_constants(2, kBeta);
    PicardOptions opt;
    opt.nodes_per_decade = 128;
    const auto r = picard_correction(2, c, eta5(), 100.0, 1e5, opt);
    const auto s0 = r.corrected_state(c, eta5(), 0);
    TodaOptions to;
    to.sample_times = {r.times.back()};
    const auto out = integrate_toda(2, kBeta, s0, r.times.back(), to);
    const auto s1 = r.corrected_state(c, eta5(), r.times.size() - 1);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(out[0].rho[j] - s1.rho[j]) < 2e-4);
}

TEST_CASE("single layer needs no correction") {
    const auto r = picard_correction(2, toda_constants(1, kBeta), eta5(), 100.0, 1e5);
    for (const auto& row : r.h) CHECK(row[0] == 0.0);
}

TEST_CASE("threshold and damping factor") {
    const auto c = toda_constants(2, kBeta);
    const double th = picard_threshold(2, c, eta5(), {5.0, 10.0, 100.0}, 1e5);
    CHECK(th > 0.0);
    CHECK(th <= 100.0);
    double prev = INFINITY;
    for (double t0 : {10.0, 100.0, 1000.0}) {
        const double d = damping_factor(eta5(), t0, 1e5, 0.5);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("picard argument checks") {
    const auto c = toda_constants(2, kBeta);
    CHECK_THROWS_AS(picard_correction(2, c, eta5(), 0.5, 1e5), DomainError);
    CHECK_THROWS_AS(picard_correction(2, c, eta5(), 100.0, 1e7), DomainError);
    PicardOptions opt;
    opt.nodes_per_decade = 8;
    CHECK_THROWS_AS(picard_correction(2, c, eta5(), 100.0, 1e5, opt), DomainError);
}
