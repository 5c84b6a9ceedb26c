#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "schrctl/noncontrol.hpp"

using namespace schrctl;

TEST_CASE("bump profile: normalized, supported in [-1,1], derivative consistent") {
    CHECK(bump_value(1.0) == 0.0);
    CHECK(bump_value(-1.2) == 0.0);
    CHECK(bump_value(0.0) > 0.0);
    CHECK(bump_value(0.4) == bump_value(-0.4));
    // int Psi = 1
    const int m = 200001;
    const double h = 2.0 / (m - 1);
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        s += ((i == 0 || i + 1 == m) ? 0.5 : 1.0) * bump_value(-1.0 + i * h);
    CHECK(h * s == doctest::Approx(1.0).epsilon(1e-9));
    // finite-difference check of the analytic derivative
    for (double x : {-0.7, -0.2, 0.3, 0.8}) {
        const double fd = (bump_value(x + 1e-6) - bump_value(x - 1e-6)) / 2e-6;
        CHECK(bump_derivative(x) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("interior cost scan: blow-up signature with decaying bound quantity") {
    CostScanParams p;  // interior cutoff, R = 2, T = 1, targets {2,4,8}
    const auto res = discrete_cost_scan(p);
    REQUIRE(res.rows.size() == 3);
    // lambda ascending with N
    CHECK(res.rows[0].lambda < res.rows[1].lambda);
    CHECK(res.rows[1].lambda < res.rows[2].lambda);
    // duality operator numerically singular: failures are data
    CHECK(res.observability <= 1e-10);
    for (const auto& r : res.rows) CHECK_FALSE(r.converged);
    // cost blow-up: N=8 at least twice N=2 (in fact orders of magnitude)
    CHECK(res.rows[2].cost >= 2.0 * res.rows[0].cost);
    CHECK(res.loglog_slope > 0.0);
    // the proof's bound quantity decreases toward zero
    CHECK(res.rows[0].bound_quantity > res.rows[1].bound_quantity);
    CHECK(res.rows[1].bound_quantity > res.rows[2].bound_quantity);
    // the measured pairing cannot stay near the bound once the cost explodes
    CHECK(res.rows[2].pairing > res.rows[2].bound_quantity);
}

TEST_CASE("exterior contrast: bounded costs and two-sided pairing estimate") {
    CostScanParams p;
    p.cutoff = CutoffKind::Exterior;
    const auto res = discrete_cost_scan(p);
    REQUIRE(res.rows.size() == 3);
    CHECK(res.observability > 0.0);
    double cmin = 1e300, cmax = 0.0;
    for (const auto& r : res.rows) {
        CHECK(r.converged);
        CHECK(r.target_error <= 1e-9);
        cmin = std::min(cmin, r.cost);
        cmax = std::max(cmax, r.cost);
        // with a bounded control the measured pairing and the proof's bound
        // quantity agree in order of magnitude (two-sided)
        CHECK(r.pairing >= 0.1 * r.bound_quantity);
        CHECK(r.pairing <= 10.0 * r.bound_quantity);
    }
    CHECK(cmax > 0.0);
    CHECK(cmax <= 4.0 * cmin);  // no blow-up for the same targets
}

TEST_CASE("cost scan input validation") {
    CostScanParams p;
    p.targets = {};
    CHECK_THROWS_AS(discrete_cost_scan(p), std::invalid_argument);
    p.targets = {99};
    CHECK_THROWS_AS(discrete_cost_scan(p), std::invalid_argument);
}

TEST_CASE("scaling family: the five norm identities hold to 1e-8") {
    const auto res = scaling_family_check({0.1, 0.05, 0.025}, 1.0);
    REQUIRE(res.rows.size() == 3);
    for (const auto& r : res.rows) {
        CHECK(std::abs(r.l1 - 1.0) <= 1e-8);
        CHECK(std::abs(std::sqrt(r.eps) * r.l2 / res.psi_l2 - 1.0) <= 1e-8);
        CHECK(std::abs(r.eps * r.grad_l1 / res.psi_x_l1 - 1.0) <= 1e-8);
        CHECK(std::abs(std::pow(r.eps, 1.5) * r.grad_l2 / res.psi_x_l2 - 1.0) <= 1e-8);
        // weighted-norm inequality with the (1+eps)^{1/2} factor
        CHECK(r.l2mu <=
              std::sqrt((1.0 + r.eps) / r.eps) * res.psi_l2 * (1.0 + 1e-10));
        CHECK(r.l2mu >= r.l2);  // mu >= 1
    }
}

TEST_CASE("scaling family: eps^3 quadratic form converges at rate eps") {
    const auto res = scaling_family_check({0.1, 0.05, 0.025}, 1.0);
    const double limit = res.psi_x_l2 * res.psi_x_l2;
    // deviation decreases toward the limit, log-log slope ~ 1
    CHECK(res.rows[0].deviation > res.rows[1].deviation);
    CHECK(res.rows[1].deviation > res.rows[2].deviation);
    for (const auto& r : res.rows) CHECK(r.eps3_quad > limit);  // positive remainder
    CHECK(res.loglog_slope >= 0.7);
    CHECK(res.loglog_slope <= 1.3);
}

TEST_CASE("scaling family input validation") {
    CHECK_THROWS_AS(scaling_family_check({}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(scaling_family_check({-0.1}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(scaling_family_check({0.1}, 0.0), std::invalid_argument);
}

TEST_CASE("electric-group conjugation identity") {
    GridSpec g(128.0, 16385);
    WaveField phi(g.n_points);
    for (int i = 0; i < g.n_points; ++i) {
        const double x = g.x(i);
        phi[i] = std::exp(-0.5 * x * x) * std::exp(Complex(0.0, 0.7 * x));
    }
    CHECK(avron_identity_check(0.0, 0.0, g, phi) <= 1e-10);
    CHECK(avron_identity_check(0.3, -0.3, g, phi) <= 1e-6);
    CHECK(avron_identity_check(0.5, 0.5, g, phi) <= 1e-6);
}
