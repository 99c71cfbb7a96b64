#include <doctest.h>

#include <cmath>

#include "ageflow/dynamics.hpp"
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

} // namespace

TEST_CASE("zero stays zero and the step guards its inputs") {
    auto s = make("P0", 50, 16);
    PopulationState state{Field2D(s.grid.n_a + 1, s.grid.n_x + 1, 0.0), 0.0};
    auto next = advance(state, s.grid.da, s.tables, s.grid, s.spec.birth, 1.0, 0.0);
    CHECK(next.u.max_abs() == 0.0);
    CHECK(next.time == doctest::Approx(s.grid.da));
    CHECK_THROWS(advance(state, 0.5 * s.grid.da, s.tables, s.grid, s.spec.birth, 1.0, 0.0));
}

TEST_CASE("homogeneous dynamics stay spatially constant and hit the scalar fixed point") {
    auto s = make("P0", 100, 16);
    PopulationState state{Field2D(s.grid.n_a + 1, s.grid.n_x + 1, 0.1), 0.0};
    auto plan = make_plan(s.tables, s.grid, 1.0, 0.0, Gauge::flux);
    for (int step = 0; step < 4000; ++step)
        state = advance(state, s.grid.da, s.tables, s.grid, s.spec.birth, 1.0, 0.0, &plan);
    for (int j = 0; j <= s.grid.n_a; ++j) {
        double lo = state.u(j, 0), hi = state.u(j, 0);
        for (int i = 0; i <= s.grid.n_x; ++i) {
            lo = std::min(lo, state.u(j, i));
            hi = std::max(hi, state.u(j, i));
        }
        CHECK(hi - lo <= 1e-10);
    }
    double k = oracles::brick_kernel(3.0, 1.0, 0.0);
    CHECK(state.u(0, 0) == doctest::Approx((k - 1.0) / k).epsilon(2e-3));
}

TEST_CASE("equilibrium on the homogeneous preset") {
    auto s = make("P0", 100, 16);
    auto eq = equilibrium(s.tables, s.grid, s.spec.birth, 1.0, 0.0);
    CHECK(eq.converged);
    CHECK(eq.classification == Classification::positive);
    CHECK(eq.residual <= 10.0 * 1e-8);
    double k = oracles::brick_kernel(3.0, 1.0, 0.0);
    CHECK(eq.u(0, 8) == doctest::Approx((k - 1.0) / k).epsilon(2e-3));
}

TEST_CASE("subcritical dynamics die out") {
    auto s = make("subcritical", 80, 12);
    auto eq = equilibrium(s.tables, s.grid, s.spec.birth, 1.0, 1.0);
    CHECK(eq.classification == Classification::extinct);
    CHECK(eq.u.max_abs() < 1e-8);
}

TEST_CASE("march from the super-solution is monotone in the sup-norm") {
    auto s = make("P1", 80, 24);
    double d = 1.0, lam = 1.0;
    PopulationState state;
    state.u = Field2D(s.grid.n_a + 1, s.grid.n_x + 1);
    for (int i = 0; i <= s.grid.n_x; ++i) {
        double v = s.spec.birth.L * std::exp(lam / d * s.grid.x(i));
        for (int j = 0; j <= s.grid.n_a; ++j) state.u(j, i) = v;
    }
    auto plan = make_plan(s.tables, s.grid, d, lam, Gauge::flux);
    double prev = state.u.max_abs();
    for (int step = 0; step < 200; ++step) {
        state = advance(state, s.grid.da, s.tables, s.grid, s.spec.birth, d, lam, &plan);
        double sup = state.u.max_abs();
        CHECK(sup <= prev + 1e-12);
        prev = sup;
    }
}

TEST_CASE("ordered seeds stay ordered") {
    auto s = make("P0", 60, 16);
    double d = 0.05, lam = 0.0;
    PopulationState a{Field2D(s.grid.n_a + 1, s.grid.n_x + 1, 0.05), 0.0};
    PopulationState b{Field2D(s.grid.n_a + 1, s.grid.n_x + 1, 0.2), 0.0};
    auto plan = make_plan(s.tables, s.grid, d, lam, Gauge::flux);
    for (int step = 0; step < 120; ++step) {
        a = advance(a, s.grid.da, s.tables, s.grid, s.spec.birth, d, lam, &plan);
        b = advance(b, s.grid.da, s.tables, s.grid, s.spec.birth, d, lam, &plan);
        for (std::size_t k = 0; k < a.u.data().size(); ++k)
            CHECK(a.u.data()[k] <= b.u.data()[k] + 1e-12);
    }
}

TEST_CASE("nonnegativity along the march") {
    auto s = make("P1", 60, 20);
    auto eq = equilibrium(s.tables, s.grid, s.spec.birth, 0.3, 2.0);
    CHECK(eq.u.min() >= 0.0);
}

TEST_CASE("global dynamics report") {
    auto s = make("P1", 100, 50);
    s.spec.d = 1.0;
    s.spec.lambda_adv = 1.0;
    std::vector<Field2D> seeds;
    seeds.emplace_back(s.grid.n_a + 1, s.grid.n_x + 1, 0.1);
    Field2D bump(s.grid.n_a + 1, s.grid.n_x + 1, 0.0);
    for (int i = 0; i <= s.grid.n_x; ++i)
        if (s.grid.x(i) >= 0.4 && s.grid.x(i) <= 0.6)
            for (int j = 0; j <= s.grid.n_a; ++j) bump(j, i) = 2.0;
    seeds.push_back(bump);
    auto rep = verify_global_dynamics(s.spec, s.grid, seeds);
    CHECK(rep.lambda0 > 0.0);
    CHECK(rep.pass);
    CHECK(rep.max_pairwise <= 1e-4);

    auto sub = make("subcritical", 60, 16);
    sub.spec.d = 1.0;
    std::vector<Field2D> sub_seeds{Field2D(sub.grid.n_a + 1, sub.grid.n_x + 1, 0.1),
                                   Field2D(sub.grid.n_a + 1, sub.grid.n_x + 1, 1.0)};
    auto sub_rep = verify_global_dynamics(sub.spec, sub.grid, sub_seeds);
    CHECK(sub_rep.lambda0 < 0.0);
    CHECK(sub_rep.pass);

    std::vector<Field2D> bad{Field2D(s.grid.n_a + 1, s.grid.n_x + 1, 0.0),
                             Field2D(s.grid.n_a + 1, s.grid.n_x + 1, 1.0)};
    CHECK_THROWS(verify_global_dynamics(s.spec, s.grid, bad));
    std::vector<Field2D> lonely{Field2D(s.grid.n_a + 1, s.grid.n_x + 1, 1.0)};
    CHECK_THROWS(verify_global_dynamics(s.spec, s.grid, lonely));
}

TEST_CASE("mass curves decrease along an advection sweep") {
    auto s = make("P1", 120, 200);
    s.spec.d = 0.05;
    auto curves = mass_curves(s.spec, s.grid, SweepParameter::advection, {0.0, 1.0, 5.0, 20.0}, {}, 2);
    REQUIRE(curves.size() == 4);
    for (const auto& c : curves) {
        CHECK(c.converged);
        CHECK(c.age_monotone);
        CHECK(c.mass[s.grid.n_a] <= c.mass[0]);
    }
    CHECK(curves[0].mass[0] > 0.05); // no advection: mass stays bounded away from zero
    CHECK(curves[2].mass[0] < curves[1].mass[0]);
    CHECK(curves[3].mass[0] < curves[2].mass[0]);

    auto sub = make("subcritical", 60, 16);
    CHECK_THROWS(mass_curves(sub.spec, sub.grid, SweepParameter::advection, {1.0}, {}, 1));
}

TEST_CASE("profile check in the small-diffusion regime") {
    auto s = make("P1", 100, 100);
    s.spec.d = 1e-3;
    s.spec.lambda_adv = 0.0;
    auto rep = profile_checks(s.spec, s.grid, ProfileRegime::small_d_no_advection);
    CHECK(rep.equilibrium_converged);
    CHECK(rep.pass);

    s.spec.lambda_adv = 1.0;
    CHECK_THROWS(profile_checks(s.spec, s.grid, ProfileRegime::small_d_no_advection));
}

TEST_CASE("profile check on a subcritical probe interval") {
    auto s = make("gamma_valley", 100, 100);
    s.spec.d = 2e-4;
    s.spec.lambda_adv = 0.0;
    auto rep = profile_checks(s.spec, s.grid, ProfileRegime::small_d_no_advection);
    CHECK(rep.subcritical_probe);
    CHECK(rep.pass);
}

TEST_CASE("profile check in the large-diffusion regime") {
    auto s = make("P1", 100, 50);
    s.spec.d = 100.0;
    s.spec.lambda_adv = 1.0;
    auto rep = profile_checks(s.spec, s.grid, ProfileRegime::large_d);
    CHECK(rep.pass);
    CHECK(rep.spatial_variation <= rep.threshold);

    auto sub = make("subcritical", 60, 16);
    sub.spec.d = 100.0;
    CHECK_THROWS(profile_checks(sub.spec, sub.grid, ProfileRegime::large_d));
}

TEST_CASE("integral bounds on the equilibrium") {
    auto s = make("P1", 100, 50);
    auto eq = equilibrium(s.tables, s.grid, s.spec.birth, 0.5, 2.0);
    auto rep = integral_bound_check(eq, s.spec, s.tables, s.grid, 0.5, 2.0);
    CHECK(rep.checked_first);
    CHECK(rep.holds_first);
    CHECK(rep.margin_first > 0.0);
    CHECK_FALSE(rep.checked_second); // d = 0.5 sits above Lambda^2 / 12

    auto eq2 = equilibrium(s.tables, s.grid, s.spec.birth, 1.0 / 6.0, 2.0);
    auto rep2 = integral_bound_check(eq2, s.spec, s.tables, s.grid, 1.0 / 6.0, 2.0);
    CHECK(rep2.checked_second);
    CHECK(rep2.holds_second);

    auto skipped = integral_bound_check(eq, s.spec, s.tables, s.grid, 0.5, -1.0);
    CHECK_FALSE(skipped.checked_first);
}

TEST_CASE("cross-check reaches the same equilibrium from a small seed") {
    auto s = make("P0", 80, 12);
    DynamicsOptions opts;
    opts.cross_check = true;
    opts.lambda0 = 0.8; // any positive value triggers the second march
    auto eq = equilibrium(s.tables, s.grid, s.spec.birth, 1.0, 0.0, opts);
    CHECK(eq.cross_checked);
    CHECK(eq.cross_distance <= 1e-4);
}
