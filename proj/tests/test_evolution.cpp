#include <doctest.h>

#include <cmath>
#include <random>

#include "ageflow/evolution.hpp"
#include "ageflow/quadrature.hpp"
#include "oracles.hpp"

using namespace ageflow;

namespace {

struct Setup {
    ProblemSpec spec;
    Grid grid;
    CoefficientTables tables;
};

Setup make(const std::string& preset, int n_a, int n_x) {
    Setup s;
    s.spec = make_preset(preset);
    s.grid = build_grid(s.spec, n_a, n_x);
    s.tables = sample_coefficients(s.spec, s.grid);
    return s;
}

Setup make_mu_free(int n_a, int n_x) {
    Setup s;
    s.spec = make_preset("P0");
    s.spec.mu = [](double, double) { return 0.0; };
    s.grid = build_grid(s.spec, n_a, n_x);
    s.tables = sample_coefficients(s.spec, s.grid);
    return s;
}

} // namespace

TEST_CASE("constants are invariant under the Neumann step when mu = 0") {
    auto s = make_mu_free(16, 16);
    SpaceProfile c(s.grid.n_x + 1, 2.5);
    for (double lambda : {0.0, 3.0, -7.0}) {
        auto out = step_neumann(c, 0, s.tables, s.grid, 0.7, lambda);
        for (double v : out) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));
    }
}

TEST_CASE("pure decay matches the exponential to third order per step") {
    auto s = make("P0", 100, 8);
    SpaceProfile one(s.grid.n_x + 1, 1.0);
    auto out = step_neumann(one, 0, s.tables, s.grid, 1.0, 0.0);
    for (double v : out) CHECK(v == doctest::Approx(std::exp(-0.01)).epsilon(2e-7));
}

#ifdef AGEFLOW_HAVE_EIGEN
TEST_CASE("one step agrees with the dense matrix exponential on a 9-point grid") {
    auto s = make("P1", 100, 8);
    SpaceProfile one(s.grid.n_x + 1, 1.0);
    auto stepped = step_neumann(one, 0, s.tables, s.grid, 1.0, 0.0);
    double a_mid = s.grid.age_mid(0);
    auto A = oracles::dense_neumann_operator(8, 1.0, [](double) { return 0.0; },
                                             [&](double x) { return s.spec.mu(a_mid, x); });
    auto ref = oracles::expm_apply_ones(A, s.grid.da);
    for (int i = 0; i <= 8; ++i) CHECK(stepped[i] == doctest::Approx(ref[i]).epsilon(2e-4));
}

TEST_CASE("propagate matches a Richardson-extrapolated dense oracle") {
    auto s = make("P1", 200, 100);
    SpaceProfile one(s.grid.n_x + 1, 1.0);
    auto traj = propagate(one, s.tables, s.grid, 1.0, 0.0);

    auto mu_of = [&](double x) { return s.spec.mu(0.0, x); }; // age-independent preset
    auto coarse = oracles::expm_apply_ones(oracles::dense_neumann_operator(8, 1.0, [](double) { return 0.0; }, mu_of), 1.0);
    auto fine = oracles::expm_apply_ones(oracles::dense_neumann_operator(16, 1.0, [](double) { return 0.0; }, mu_of), 1.0);
    double sup_ref = 0.0, sup_err = 0.0;
    for (int k = 0; k <= 16; ++k) {
        double ref = fine[k];
        if (k % 2 == 0) ref = fine[k] + (fine[k] - coarse[k / 2]) / 3.0; // spatial h^2 extrapolation
        // interpolate the computed row at x = k/16
        double xs = (k / 16.0) / s.grid.dx;
        int i = std::min(static_cast<int>(xs), s.grid.n_x - 1);
        double t = xs - i;
        double val = (1 - t) * traj.values(s.grid.n_a, i) + t * traj.values(s.grid.n_a, i + 1);
        sup_ref = std::max(sup_ref, std::abs(ref));
        sup_err = std::max(sup_err, std::abs(val - ref));
    }
    CHECK(sup_err <= 1e-3 * sup_ref);
}
#endif

TEST_CASE("spatially homogeneous propagation is pure decay") {
    auto s = make("P0", 100, 20);
    SpaceProfile one(s.grid.n_x + 1, 1.0);
    auto traj = propagate(one, s.tables, s.grid, 1.0, 2.0);
    for (int j = 0; j <= s.grid.n_a; ++j)
        for (int i = 0; i <= s.grid.n_x; ++i)
            CHECK(traj.values(j, i) == doctest::Approx(std::exp(-s.grid.age(j))).epsilon(1e-5));

    SpaceProfile zero(s.grid.n_x + 1, 0.0);
    auto z = propagate(zero, s.tables, s.grid, 1.0, 2.0);
    CHECK(z.values.max_abs() == 0.0);
}

TEST_CASE("flux step keeps the no-flux exponential stationary") {
    auto s = make_mu_free(16, 32);
    double d = 0.3, lambda = 1.7;
    SpaceProfile u(s.grid.n_x + 1);
    for (int i = 0; i <= s.grid.n_x; ++i) u[i] = std::exp(lambda / d * s.grid.x(i));
    auto out = step_flux(u, 0, s.tables, s.grid, d, lambda);
    for (int i = 0; i <= s.grid.n_x; ++i) CHECK(out[i] == doctest::Approx(u[i]).epsilon(1e-12));
}

TEST_CASE("flux step conserves trapezoid mass when mu = 0") {
    auto s = make_mu_free(16, 24);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    SpaceProfile u(s.grid.n_x + 1);
    for (double& v : u) v = unif(rng);
    for (double lambda : {0.0, 0.9, -3.0}) {
        auto out = step_flux(u, 3, s.tables, s.grid, 0.4, lambda);
        double before = trapezoid(u, s.grid.dx);
        double after = trapezoid(out, s.grid.dx);
        CHECK(std::abs(after - before) <= 1e-12 * std::max(1.0, before));
    }
}

TEST_CASE("flux step with uniform death scales mass by the decay factor") {
    auto s = make("P0", 100, 16);
    SpaceProfile one(s.grid.n_x + 1, 1.0);
    auto out = step_flux(one, 0, s.tables, s.grid, 1.0, 0.0);
    double ratio = trapezoid(out, s.grid.dx) / trapezoid(one, s.grid.dx);
    CHECK(ratio == doctest::Approx(std::exp(-s.grid.da)).epsilon(1e-7));
}

TEST_CASE("gauge transform basics") {
    auto s = make("P0", 16, 10);
    SpaceProfile one(s.grid.n_x + 1, 1.0);
    auto same = gauge_transform(one, s.grid, 1.0, 0.0, GaugeDirection::to_neumann);
    for (double v : same) CHECK(v == 1.0);
    auto decayed = gauge_transform(one, s.grid, 1.0, 1.0, GaugeDirection::to_neumann);
    for (int i = 0; i <= s.grid.n_x; ++i) CHECK(decayed[i] == doctest::Approx(std::exp(-s.grid.x(i))));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Field2D f(5, s.grid.n_x + 1);
    for (double& v : f.data()) v = unif(rng);
    auto round = gauge_transform(gauge_transform(f, s.grid, 0.7, 2.1, GaugeDirection::to_neumann),
                                 s.grid, 0.7, 2.1, GaugeDirection::to_flux);
    CHECK(sup_distance(round, f) <= 1e-13);
    CHECK_THROWS(gauge_transform(one, s.grid, 0.0, 1.0, GaugeDirection::to_flux));
    CHECK(gauge_overflow_risk(1e-3, 40.0, 1.0 / 16));
    CHECK_FALSE(gauge_overflow_risk(1.0, 1.0, 1.0 / 16));
}

TEST_CASE("propagation is linear") {
    auto s = make("P1", 24, 16);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    SpaceProfile phi(s.grid.n_x + 1), psi(s.grid.n_x + 1), mix(s.grid.n_x + 1);
    for (int i = 0; i <= s.grid.n_x; ++i) {
        phi[i] = unif(rng);
        psi[i] = unif(rng);
        mix[i] = 2.0 * phi[i] - 0.7 * psi[i];
    }
    auto a = propagate(phi, s.tables, s.grid, 0.5, 1.0);
    auto b = propagate(psi, s.tables, s.grid, 0.5, 1.0);
    auto c = propagate(mix, s.tables, s.grid, 0.5, 1.0);
    for (int j = 0; j <= s.grid.n_a; ++j)
        for (int i = 0; i <= s.grid.n_x; ++i)
            CHECK(c.values(j, i) == doctest::Approx(2.0 * a.values(j, i) - 0.7 * b.values(j, i)).epsilon(1e-12));
}

TEST_CASE("positivity under the discrete maximum principle step bound") {
    // Crank-Nicolson keeps nonnegativity when the explicit half does; draw
    // parameters inside that region, then check every node.
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        int n_x = 12 + 4 * (trial % 3);
        auto s = make(trial % 2 ? "P1" : "P0", 40, n_x);
        double dx = s.grid.dx, da = s.grid.da;
        double d_cap = 0.8 * (2.0 / da - 2.0) * dx * dx / 2.0;
        double d = (0.2 + 0.8 * unif(rng)) * d_cap;
        double lambda = (unif(rng) - 0.5) * 2.0 * (2.0 * d / dx); // keeps the Peclet branch central
        SpaceProfile phi(s.grid.n_x + 1);
        for (double& v : phi) v = unif(rng);
        auto traj = propagate(phi, s.tables, s.grid, d, lambda);
        CHECK(traj.values.min() >= 0.0);
    }
}

TEST_CASE("backward Euler keeps positivity unconditionally") {
    auto s = make("P1", 30, 30);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SpaceProfile phi(s.grid.n_x + 1);
    for (double& v : phi) v = unif(rng);
    for (double d : {1e-3, 1.0, 250.0}) {
        auto traj = propagate(phi, s.tables, s.grid, d, 40.0, Gauge::neumann, AgeScheme::backward_euler);
        CHECK(traj.values.min() >= 0.0);
    }
}

TEST_CASE("convergence order, central branch") {
    // exact solution e^{-a} (1 + 0.5 e^{-d pi^2 a} cos(pi x)) for P0 with Lambda = 0
    const double d = 0.3;
    auto error_at = [&](int n_a, int n_x) {
        auto s = make("P0", n_a, n_x);
        SpaceProfile phi(s.grid.n_x + 1);
        for (int i = 0; i <= s.grid.n_x; ++i) phi[i] = 1.0 + 0.5 * std::cos(M_PI * s.grid.x(i));
        auto traj = propagate(phi, s.tables, s.grid, d, 0.0);
        double err = 0.0;
        for (int j = 0; j <= s.grid.n_a; ++j)
            for (int i = 0; i <= s.grid.n_x; ++i) {
                double a = s.grid.age(j), x = s.grid.x(i);
                double exact = std::exp(-a) * (1.0 + 0.5 * std::exp(-d * M_PI * M_PI * a) * std::cos(M_PI * x));
                err = std::max(err, std::abs(traj.values(j, i) - exact));
            }
        return err;
    };
    double e1 = error_at(20, 10), e2 = error_at(40, 20), e3 = error_at(80, 40);
    CHECK(std::log2(e1 / e2) >= 1.9);
    CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("convergence order, upwind branch") {
    // Peclet > 1 at both coarse levels; reference is a fine central solution.
    const double d = 0.01, lambda = 1.0;
    auto solve = [&](int n) {
        auto s = make("P0", n, n);
        SpaceProfile phi(s.grid.n_x + 1);
        for (int i = 0; i <= s.grid.n_x; ++i) phi[i] = 1.0 + 0.5 * std::cos(M_PI * s.grid.x(i));
        REQUIRE(advection_is_central(s.tables, s.grid, d, lambda) == (n >= 64));
        auto traj = propagate(phi, s.tables, s.grid, d, lambda);
        SpaceProfile row(traj.values.row(s.grid.n_a).begin(), traj.values.row(s.grid.n_a).end());
        return row;
    };
    auto coarse = solve(16), half = solve(32), ref = solve(256);
    auto err_against_ref = [&](const SpaceProfile& v, int stride_ref) {
        double err = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            err = std::max(err, std::abs(v[i] - ref[i * stride_ref]));
        return err;
    };
    double e1 = err_against_ref(coarse, 16), e2 = err_against_ref(half, 8);
    CHECK(std::log2(e1 / e2) >= 0.9);
}

TEST_CASE("the two gauges agree up to discretization error") {
    auto check_gap = [&](int n) {
        auto s = make("P1", n, n);
        double d = 0.8, lambda = 1.1;
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> unif(0.5, 1.5);
        SpaceProfile u(s.grid.n_x + 1);
        for (double& v : u) v = unif(rng);
        auto direct = step_flux(u, 2, s.tables, s.grid, d, lambda);
        auto v = gauge_transform(u, s.grid, d, lambda, GaugeDirection::to_neumann);
        auto stepped = step_neumann(v, 2, s.tables, s.grid, d, lambda);
        auto back = gauge_transform(stepped, s.grid, d, lambda, GaugeDirection::to_flux);
        double gap = 0.0;
        for (int i = 0; i <= s.grid.n_x; ++i) gap = std::max(gap, std::abs(back[i] - direct[i]));
        return gap;
    };
    double g1 = check_gap(16), g2 = check_gap(32), g3 = check_gap(64);
    CHECK(g2 < g1);
    CHECK(g3 < g2);
}

TEST_CASE("step and propagate reject invalid input") {
    auto s = make("P0", 16, 8);
    SpaceProfile one(s.grid.n_x + 1, 1.0);
    CHECK_THROWS(step_neumann(one, 16, s.tables, s.grid, 1.0, 0.0));
    SpaceProfile bad(s.grid.n_x + 1, std::nan(""));
    CHECK_THROWS(propagate(bad, s.tables, s.grid, 1.0, 0.0));
    CHECK_THROWS(make_plan(s.tables, s.grid, -1.0, 0.0, Gauge::neumann));
}
