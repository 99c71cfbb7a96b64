#include "ageflow/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "ageflow/dynamics.hpp"
#include "ageflow/limits.hpp"
#include "ageflow/model.hpp"
#include "ageflow/parallel.hpp"
#include "ageflow/quadrature.hpp"
#include "ageflow/spectral.hpp"

namespace ageflow {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// Closed-form scalar oracle for the presets (constant-in-age rates on a unit
// age window): F(alpha) = beta (1 - e^{-(alpha+mu)}) / (alpha+mu).
double brick_kernel(double beta, double mu, double alpha) {
    double s = alpha + mu;
    if (std::abs(s) < 1e-12) return beta;
    return beta * (-std::expm1(-s)) / s;
}

double brick_root(double beta, double mu) {
    double lo = -50.0, hi = 50.0;
    while (brick_kernel(beta, mu, lo) < 1.0) lo *= 2.0;
    while (brick_kernel(beta, mu, hi) > 1.0) hi *= 2.0;
    for (int it = 0; it < 300 && hi - lo > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        (brick_kernel(beta, mu, mid) >= 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct Problem {
    ProblemSpec spec;
    Grid grid;
    CoefficientTables tables;
};

Problem make_problem(const std::string& preset, int n_a, int n_x, double a_plus = 1.0) {
    Problem p;
    p.spec = make_preset(preset);
    p.spec.a_plus = a_plus;
    p.grid = build_grid(p.spec, n_a, n_x);
    p.tables = sample_coefficients(p.spec, p.grid);
    return p;
}

double eigenfunction_variation(const Field2D& u) {
    double worst = 0.0;
    for (int j = 0; j < u.rows(); ++j) {
        double lo = u(j, 0), hi = u(j, 0);
        for (int i = 1; i < u.cols(); ++i) {
            lo = std::min(lo, u(j, i));
            hi = std::max(hi, u(j, i));
        }
        worst = std::max(worst, hi - lo);
    }
    return worst; // sup-norm of u is 1, so this is already relative
}

Field2D constant_field(const Grid& g, double level) {
    return Field2D(g.n_a + 1, g.n_x + 1, level);
}

Field2D bump_field(const Grid& g, double level, double x_lo, double x_hi) {
    Field2D f(g.n_a + 1, g.n_x + 1, 0.0);
    for (int i = 0; i <= g.n_x; ++i)
        if (g.x(i) >= x_lo && g.x(i) <= x_hi)
            for (int j = 0; j <= g.n_a; ++j) f(j, i) = level;
    return f;
}

// --- criteria -------------------------------------------------------------

CriterionResult c1_homogeneity(int jobs) {
    CriterionResult res{1, "homogeneity collapse", {"P0"}, false, "", 0.0};
    const double alpha_star = brick_root(3.0, 1.0);
    auto prob = make_problem("P0", 200, 100);
    const std::vector<std::pair<double, double>> points{{0.5, 0.0}, {1.0, 2.0}, {2.0, -1.0}};
    std::vector<double> errs(points.size()), vars(points.size());
    parallel_for(static_cast<int>(points.size()), jobs, [&](int k) {
        auto r = principal_eigenvalue(prob.tables, prob.grid, points[k].first, points[k].second);
        errs[k] = std::abs(r.lambda0 - alpha_star);
        vars[k] = eigenfunction_variation(r.eigenfunction);
    });
    bool ok = true;
    std::ostringstream os;
    os << "alpha*=" << fmt(alpha_star) << ";";
    for (std::size_t k = 0; k < points.size(); ++k) {
        ok = ok && errs[k] <= 5e-3 && vars[k] <= 1e-3;
        os << " (d=" << points[k].first << ",L=" << points[k].second << "): |err|=" << fmt(errs[k])
           << " var=" << fmt(vars[k]) << ";";
    }
    res.pass = ok;
    res.detail = os.str() + " tol 5e-3 / 1e-3";
    return res;
}

CriterionResult c2_monotone_bracket(int jobs) {
    CriterionResult res{2, "monotonicity and bracketing", {"P0", "P1"}, false, "", 0.0};
    const double alpha_star = brick_root(3.0, 1.0);
    bool ok = true;
    std::ostringstream os;
    for (const std::string preset : {"P0", "P1"}) {
        auto prob = make_problem(preset, 200, 100);
        std::vector<double> lams{alpha_star - 1.0, alpha_star, alpha_star + 1.0};
        std::vector<double> rs(lams.size());
        parallel_for(3, jobs, [&](int k) {
            rs[k] = spectral_radius(lams[k], prob.tables, prob.grid, 1.0, 1.0).r;
        });
        bool mono = rs[0] > rs[1] && rs[1] > rs[2];
        const double lam_lo = preset == "P0" ? alpha_star : brick_root(3.0, 2.0);
        const double lam_hi = alpha_star;
        bool bracket = true;
        const std::vector<std::pair<double, double>> points{{1.0, 1.0}, {0.5, -2.0}};
        std::vector<double> lam0(points.size());
        parallel_for(static_cast<int>(points.size()), jobs, [&](int k) {
            lam0[k] = principal_eigenvalue(prob.tables, prob.grid, points[k].first, points[k].second).lambda0;
        });
        for (double v : lam0) bracket = bracket && v >= lam_lo - 0.01 && v <= lam_hi + 0.01;
        ok = ok && mono && bracket;
        os << preset << ": r=[" << fmt(rs[0]) << "," << fmt(rs[1]) << "," << fmt(rs[2])
           << "] lam0=[" << fmt(lam0[0]) << "," << fmt(lam0[1]) << "] in [" << fmt(lam_lo - 0.01)
           << "," << fmt(lam_hi + 0.01) << "]; ";
    }
    res.pass = ok;
    res.detail = os.str();
    return res;
}

CriterionResult c3_large_advection(int jobs) {
    CriterionResult res{3, "large-advection limit", {"P1"}, false, "", 0.0};
    const double alpha1 = brick_root(3.0, 1.0);
    const double alpha0 = brick_root(3.0, 2.0);
    auto prob = make_problem("P1", 200, 200);
    const std::vector<double> lams{10.0, 30.0, 100.0, -10.0, -30.0, -100.0};
    std::vector<double> gaps(lams.size());
    parallel_for(static_cast<int>(lams.size()), jobs, [&](int k) {
        double target = lams[k] > 0 ? alpha1 : alpha0;
        gaps[k] = std::abs(principal_eigenvalue(prob.tables, prob.grid, 1.0, lams[k]).lambda0 - target);
    });
    bool ok = gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] <= 0.05 * alpha1;
    ok = ok && gaps[3] > gaps[4] && gaps[4] > gaps[5] && gaps[5] <= 0.05 * alpha0;
    res.pass = ok;
    std::ostringstream os;
    os << "gaps to alpha1: [" << fmt(gaps[0]) << "," << fmt(gaps[1]) << "," << fmt(gaps[2])
       << "] tol " << fmt(0.05 * alpha1) << "; gaps to alpha0: [" << fmt(gaps[3]) << ","
       << fmt(gaps[4]) << "," << fmt(gaps[5]) << "] tol " << fmt(0.05 * alpha0);
    res.detail = os.str();
    return res;
}

CriterionResult c4_small_diffusion(int jobs) {
    CriterionResult res{4, "small-diffusion limits", {"P1", "peak"}, false, "", 0.0};
    const double alpha1 = brick_root(3.0, 1.0);
    const std::vector<std::pair<double, int>> pts{{1e-1, 100}, {1e-2, 400}, {1e-3, 800}};
    std::vector<double> gaps(pts.size());
    parallel_for(static_cast<int>(pts.size()), jobs, [&](int k) {
        auto prob = make_problem("P1", 200, pts[k].second);
        gaps[k] = std::abs(principal_eigenvalue(prob.tables, prob.grid, pts[k].first, 1.0).lambda0 - alpha1);
    });
    bool ok = gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] <= 0.05 * alpha1;

    // without advection the limit is the best column of the habitat
    auto peak = make_problem("peak", 200, 400);
    const double alpha_max = brick_root(3.0, 1.0); // attained at x = 1/2 where mu = 1
    double gap_peak = std::abs(principal_eigenvalue(peak.tables, peak.grid, 1e-3, 0.0).lambda0 - alpha_max);
    ok = ok && gap_peak <= 0.05 * alpha_max;

    res.pass = ok;
    std::ostringstream os;
    os << "with advection gaps: [" << fmt(gaps[0]) << "," << fmt(gaps[1]) << "," << fmt(gaps[2])
       << "] tol " << fmt(0.05 * alpha1) << "; peak gap " << fmt(gap_peak) << " tol "
       << fmt(0.05 * alpha_max);
    res.detail = os.str();
    return res;
}

CriterionResult c5_large_diffusion(int jobs) {
    CriterionResult res{5, "large-diffusion limit", {"P1"}, false, "", 0.0};
    const double alpha_bar = brick_root(3.0, 1.5);
    auto prob = make_problem("P1", 200, 100);
    std::vector<double> gaps(2);
    const std::vector<double> ds{10.0, 100.0};
    parallel_for(2, jobs, [&](int k) {
        gaps[k] = std::abs(principal_eigenvalue(prob.tables, prob.grid, ds[k], 1.0).lambda0 - alpha_bar);
    });
    res.pass = gaps[1] <= 0.01 * alpha_bar;
    std::ostringstream os;
    os << "gaps to alpha_bar: d=10: " << fmt(gaps[0]) << ", d=100: " << fmt(gaps[1]) << " (tol "
       << fmt(0.01 * alpha_bar) << ")";
    res.detail = os.str();
    return res;
}

CriterionResult c6_truncation_independence(int jobs) {
    CriterionResult res{6, "truncation-age independence", {"P1"}, false, "", 0.0};
    std::vector<double> lam0(2);
    parallel_for(2, jobs, [&](int k) {
        auto prob = k == 0 ? make_problem("P1", 200, 100, 1.0) : make_problem("P1", 300, 100, 1.5);
        lam0[k] = principal_eigenvalue(prob.tables, prob.grid, 1.0, 1.0).lambda0;
    });
    double diff = std::abs(lam0[0] - lam0[1]);
    res.pass = diff <= 5e-3;
    res.detail = "lambda0(a+ = a_c) = " + fmt(lam0[0]) + ", lambda0(a+ = 1.5 a_c) = " + fmt(lam0[1]) +
                 ", diff " + fmt(diff) + " (tol 5e-3)";
    return res;
}

CriterionResult c7_global_dynamics(int jobs) {
    CriterionResult res{7, "global dynamics", {"P1", "subcritical"}, false, "", 0.0};
    auto sup_prob = make_problem("P1", 200, 100);
    auto sub_prob = make_problem("subcritical", 200, 100);
    std::vector<Field2D> limits(4);
    std::vector<double> residuals(2);
    DynamicsOptions sup_opts;
    DynamicsOptions sub_opts;
    sub_opts.t_max = 100.0;
    parallel_for(4, jobs, [&](int k) {
        if (k < 2) {
            Field2D seed = k == 0 ? constant_field(sup_prob.grid, 0.1)
                                  : bump_field(sup_prob.grid, 2.0, 0.4, 0.6);
            auto eq = equilibrium(sup_prob.tables, sup_prob.grid, sup_prob.spec.birth, 1.0, 1.0, sup_opts, &seed);
            residuals[k] = eq.residual;
            limits[k] = std::move(eq.u);
        } else {
            Field2D seed = k == 2 ? constant_field(sub_prob.grid, 0.1)
                                  : bump_field(sub_prob.grid, 2.0, 0.4, 0.6);
            auto eq = equilibrium(sub_prob.tables, sub_prob.grid, sub_prob.spec.birth, 1.0, 1.0, sub_opts, &seed);
            limits[k] = std::move(eq.u);
        }
    });
    double dist = sup_distance(limits[0], limits[1]);
    double sub_sup = std::max(limits[2].max_abs(), limits[3].max_abs());
    double max_res = std::max(residuals[0], residuals[1]);
    res.pass = dist <= 1e-4 && max_res <= 1e-6 && sub_sup <= 1e-6;
    std::ostringstream os;
    os << "supercritical: seed distance " << fmt(dist) << " (tol 1e-4), residual " << fmt(max_res)
       << " (tol 1e-6); subcritical sup by t=100: " << fmt(sub_sup) << " (tol 1e-6)";
    res.detail = os.str();
    return res;
}

CriterionResult c8_advection_extinction(int jobs) {
    CriterionResult res{8, "advection-driven extinction", {"P1"}, false, "", 0.0};
    auto spec = make_preset("P1");
    spec.d = 0.05;
    auto grid = build_grid(spec, 200, 400);
    auto curves = mass_curves(spec, grid, SweepParameter::advection, {1.0, 50.0}, DynamicsOptions{}, jobs);
    double m1 = curves[0].mass[0], m50 = curves[1].mass[0];
    bool mono = curves[0].age_monotone && curves[1].age_monotone;
    bool conv = curves[0].converged && curves[1].converged;
    res.pass = conv && mono && m50 <= 0.1 * m1;
    std::ostringstream os;
    os << "mass(L=1) = " << fmt(m1) << ", mass(L=50) = " << fmt(m50) << " (need <= " << fmt(0.1 * m1)
       << "); age-monotone " << (mono ? "yes" : "no");
    res.detail = os.str();
    return res;
}

CriterionResult c9_small_d_profile(int) {
    CriterionResult res{9, "small-diffusion equilibrium profile", {"P1"}, false, "", 0.0};
    auto spec = make_preset("P1");
    spec.d = 1e-3;
    spec.lambda_adv = 0.0;
    auto grid = build_grid(spec, 200, 200);
    auto tables = sample_coefficients(spec, grid);
    auto eq = equilibrium(tables, grid, spec.birth, spec.d, 0.0);

    // Holling II closed form: v0(x) = (Gamma - 1)/Gamma with
    // Gamma(x) = 3(1 - e^{-(2-x)})/(2-x) for this preset
    int i_lo = static_cast<int>(std::ceil(0.25 / grid.dx));
    int i_hi = static_cast<int>(std::floor(0.75 / grid.dx));
    double err = 0.0, sup_v = 0.0;
    for (int i = i_lo; i <= i_hi; ++i) {
        double mu = 2.0 - grid.x(i);
        double gamma = brick_kernel(3.0, mu, 0.0);
        double v0 = (gamma - 1.0) / gamma;
        for (int j = 0; j <= grid.n_a; ++j) {
            double v = v0 * std::exp(-mu * grid.age(j));
            sup_v = std::max(sup_v, v);
            err = std::max(err, std::abs(eq.u(j, i) - v));
        }
    }
    res.pass = eq.converged && err <= 0.05 * sup_v;
    std::ostringstream os;
    os << "sup |u* - v*| on [0.25,0.75] = " << fmt(err) << " (tol " << fmt(0.05 * sup_v) << ")";
    res.detail = os.str();
    return res;
}

CriterionResult c10_large_d_profile(int) {
    CriterionResult res{10, "large-diffusion equilibrium profile", {"P1"}, false, "", 0.0};
    auto spec = make_preset("P1");
    spec.d = 100.0;
    spec.lambda_adv = 1.0;
    auto grid = build_grid(spec, 200, 100);
    auto tables = sample_coefficients(spec, grid);
    auto eq = equilibrium(tables, grid, spec.birth, spec.d, spec.lambda_adv);

    // spatially averaged death rate 3/2; Holling II closed form for u_*(0)
    double kbar = brick_kernel(3.0, 1.5, 0.0);
    double u0 = (kbar - 1.0) / kbar;
    double err = 0.0, variation = 0.0, sup_u = u0;
    for (int j = 0; j <= grid.n_a; ++j) {
        double target = u0 * std::exp(-1.5 * grid.age(j));
        double lo = eq.u(j, 0), hi = eq.u(j, 0);
        for (int i = 0; i <= grid.n_x; ++i) {
            err = std::max(err, std::abs(eq.u(j, i) - target));
            lo = std::min(lo, eq.u(j, i));
            hi = std::max(hi, eq.u(j, i));
        }
        variation = std::max(variation, hi - lo);
    }
    res.pass = eq.converged && err <= 0.02 * sup_u && variation <= 0.02 * sup_u;
    std::ostringstream os;
    os << "sup |u* - u_*| = " << fmt(err) << ", spatial variation = " << fmt(variation) << " (tol "
       << fmt(0.02 * sup_u) << ")";
    res.detail = os.str();
    return res;
}

CriterionResult c11_integral_bounds(int jobs) {
    CriterionResult res{11, "equilibrium integral bounds", {"P1"}, false, "", 0.0};
    auto spec = make_preset("P1");
    auto grid = build_grid(spec, 200, 100);
    auto tables = sample_coefficients(spec, grid);
    // second point sits below the sharpened-bound threshold Lambda^2 / 12
    const std::vector<double> ds{0.5, 1.0 / 6.0};
    std::vector<IntegralBoundReport> reps(2);
    parallel_for(2, jobs, [&](int k) {
        auto eq = equilibrium(tables, grid, spec.birth, ds[k], 2.0);
        reps[k] = integral_bound_check(eq, spec, tables, grid, ds[k], 2.0);
    });
    res.pass = reps[0].checked_first && reps[0].holds_first && reps[1].checked_first &&
               reps[1].holds_first && reps[1].checked_second && reps[1].holds_second;
    std::ostringstream os;
    os << "d=0.5: margin " << fmt(reps[0].margin_first) << "; d=1/6: margins "
       << fmt(reps[1].margin_first) << " / " << fmt(reps[1].margin_second)
       << " (threshold d < " << fmt(reps[1].second_threshold_d) << ")";
    res.detail = os.str();
    return res;
}

CriterionResult c12_grid_convergence(int jobs) {
    CriterionResult res{12, "grid convergence", {"P0"}, false, "", 0.0};
    const double alpha_star = brick_root(3.0, 1.0);
    const std::vector<std::pair<int, int>> grids{{50, 25}, {100, 50}, {200, 100}};
    std::vector<double> errs(grids.size());
    parallel_for(static_cast<int>(grids.size()), jobs, [&](int k) {
        auto prob = make_problem("P0", grids[k].first, grids[k].second);
        errs[k] = std::abs(principal_eigenvalue(prob.tables, prob.grid, 1.0, 2.0).lambda0 - alpha_star);
    });
    double p1 = std::log2(errs[0] / errs[1]);
    double p2 = std::log2(errs[1] / errs[2]);
    res.pass = p1 >= 1.8 && p2 >= 1.8;
    std::ostringstream os;
    os << "errors [" << fmt(errs[0]) << "," << fmt(errs[1]) << "," << fmt(errs[2]) << "], orders ["
       << fmt(p1) << "," << fmt(p2) << "] (need >= 1.8)";
    res.detail = os.str();
    return res;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const std::string& preset_filter, int jobs) {
    struct Entry {
        int id;
        const char* name;
        std::vector<std::string> presets;
        CriterionResult (*run)(int);
    };
    const std::vector<Entry> entries{
        {1, "homogeneity collapse", {"P0"}, c1_homogeneity},
        {2, "monotonicity and bracketing", {"P0", "P1"}, c2_monotone_bracket},
        {3, "large-advection limit", {"P1"}, c3_large_advection},
        {4, "small-diffusion limits", {"P1", "peak"}, c4_small_diffusion},
        {5, "large-diffusion limit", {"P1"}, c5_large_diffusion},
        {6, "truncation-age independence", {"P1"}, c6_truncation_independence},
        {7, "global dynamics", {"P1", "subcritical"}, c7_global_dynamics},
        {8, "advection-driven extinction", {"P1"}, c8_advection_extinction},
        {9, "small-diffusion equilibrium profile", {"P1"}, c9_small_d_profile},
        {10, "large-diffusion equilibrium profile", {"P1"}, c10_large_d_profile},
        {11, "equilibrium integral bounds", {"P1"}, c11_integral_bounds},
        {12, "grid convergence", {"P0"}, c12_grid_convergence},
    };
    std::vector<CriterionResult> out;
    for (const auto& entry : entries) {
        bool matches = preset_filter.empty() || preset_filter == "all";
        for (const auto& p : entry.presets) matches = matches || p == preset_filter;
        if (!matches) continue;
        auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = entry.run(jobs);
        } catch (const std::exception& e) {
            r.id = entry.id;
            r.name = entry.name;
            r.presets = entry.presets;
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

int print_acceptance(std::ostream& os, const std::vector<CriterionResult>& results) {
    int failed = 0;
    for (const auto& r : results) {
        os << "[" << (r.id < 10 ? " " : "") << r.id << "] " << (r.pass ? "PASS" : "FAIL") << "  "
           << r.name << "  (" << fmt(r.seconds) << " s)  " << r.detail << "\n";
        if (!r.pass) ++failed;
    }
    return failed;
}

} // namespace ageflow
