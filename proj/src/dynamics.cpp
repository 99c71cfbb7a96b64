#include "ageflow/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ageflow/parallel.hpp"
#include "ageflow/quadrature.hpp"
#include "ageflow/spectral.hpp"

namespace ageflow {

namespace {

// The split march (age shift + renewal + theta step) resonates weakly when
// the trapezoidal half-step is far out of its stability budget: stiff modes
// leave Crank-Nicolson barely damped and the renewal loop can amplify them.
// Raising theta toward backward Euler past da * stiffness = 2 removes the
// resonance and restores unconditional positivity; below that budget the
// step stays plain Crank-Nicolson.
PropagatorPlan dynamics_plan(const CoefficientTables& tables, const Grid& grid, double d,
                             double lambda_adv, AgeScheme scheme) {
    auto plan = make_plan(tables, grid, d, lambda_adv, Gauge::flux, scheme);
    if (scheme == AgeScheme::crank_nicolson) {
        double stiffness = 0.0;
        for (int i = 0; i <= grid.n_x; ++i) stiffness = std::max(stiffness, -plan.di[i]);
        double mu_max = 0.0;
        for (double v : tables.mu_mid.data()) mu_max = std::max(mu_max, v);
        plan.theta = std::max(0.5, 1.0 - 1.0 / (grid.da * (stiffness + mu_max)));
    }
    return plan;
}

// Newborn row: u0 = f(x, c + w0 * u0) where w0 = da/2 * beta_mid(0, x) is the
// cell-0 quadrature weight on the row being defined. The contraction factor
// w0 * f_u is O(da), so a plain fixed-point iteration converges fast.
double solve_newborn(const BirthLaw& birth, double x, double c, double w0) {
    double u0 = birth.f(x, c);
    for (int it = 0; it < 64; ++it) {
        double next = birth.f(x, c + w0 * u0);
        if (std::abs(next - u0) <= 1e-15 * std::max(1.0, std::abs(next))) return next;
        u0 = next;
    }
    return u0;
}

void renewal_row(Field2D& u, const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth) {
    for (int i = 0; i <= grid.n_x; ++i) {
        double c = 0.0;
        for (int j = 0; j < grid.ac_index; ++j)
            c += tables.beta_mid(j, i) * (u(j, i) + u(j + 1, i));
        double w0 = 0.5 * grid.da * tables.beta_mid(0, i);
        c = 0.5 * grid.da * c - w0 * u(0, i); // drop the stale newborn term
        u(0, i) = solve_newborn(birth, grid.x(i), c, w0);
    }
}

double steady_residual(const Field2D& u, const PropagatorPlan& plan, const CoefficientTables& tables,
                       const Grid& grid, const BirthLaw& birth) {
    double res = 0.0;
    SpaceProfile next(grid.n_x + 1);
    for (int j = 1; j <= grid.n_a; ++j) {
        step_inplace(plan, j - 1, u.row(j - 1), next);
        for (int i = 0; i <= grid.n_x; ++i)
            res = std::max(res, std::abs(u(j, i) - next[i]) / grid.da);
    }
    auto births = birth_integral(tables, grid, u);
    for (int i = 0; i <= grid.n_x; ++i)
        res = std::max(res, std::abs(u(0, i) - birth.f(grid.x(i), births[i])));
    return res;
}

} // namespace

PopulationState advance(const PopulationState& state, double dt, const CoefficientTables& tables,
                        const Grid& grid, const BirthLaw& birth, double d, double lambda_adv,
                        const PropagatorPlan* plan) {
    if (std::abs(dt - grid.da) > 1e-12 * grid.da)
        throw std::invalid_argument("advance: dt must equal the age step (characteristic alignment)");
    if (state.u.rows() != grid.n_a + 1 || state.u.cols() != grid.n_x + 1)
        throw std::invalid_argument("advance: state shape does not match grid");
    if (plan && plan->gauge != Gauge::flux)
        throw std::invalid_argument("advance: the marcher needs a flux-gauge plan");
    PropagatorPlan local;
    if (!plan) {
        local = dynamics_plan(tables, grid, d, lambda_adv, AgeScheme::crank_nicolson);
        plan = &local;
    }
    PopulationState out;
    out.time = state.time + dt;
    out.u = Field2D(grid.n_a + 1, grid.n_x + 1);
    for (int j = grid.n_a; j >= 1; --j)
        step_inplace(*plan, j - 1, state.u.row(j - 1), out.u.row(j));
    renewal_row(out.u, tables, grid, birth);
    return out;
}

EquilibriumResult equilibrium(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth,
                              double d, double lambda_adv, const DynamicsOptions& opts,
                              const Field2D* start) {
    auto plan = dynamics_plan(tables, grid, d, lambda_adv, opts.scheme);

    PopulationState state;
    state.time = 0.0;
    if (start) {
        state.u = *start;
        if (state.u.rows() != grid.n_a + 1 || state.u.cols() != grid.n_x + 1)
            throw std::invalid_argument("equilibrium: start field shape does not match grid");
    } else {
        state.u = Field2D(grid.n_a + 1, grid.n_x + 1);
        double rho = lambda_adv / d;
        for (int i = 0; i <= grid.n_x; ++i) {
            double v = birth.L * std::exp(std::min(rho * grid.x(i), 30.0));
            for (int j = 0; j <= grid.n_a; ++j) state.u(j, i) = v;
        }
    }

    EquilibriumResult result;
    const long n_steps = std::lround(std::ceil(opts.t_max / grid.da));
    const long per_unit = std::max<long>(1, std::lround(1.0 / grid.da));
    const double min_time = 2.0 * grid.a_plus;
    std::vector<double> sup_history;
    sup_history.reserve(n_steps + 1);
    sup_history.push_back(state.u.max_abs());

    double rate = std::numeric_limits<double>::infinity();
    long step = 0;
    for (; step < n_steps; ++step) {
        PopulationState next = advance(state, grid.da, tables, grid, birth, d, lambda_adv, &plan);
        rate = sup_distance(next.u, state.u) / grid.da;
        state = std::move(next);
        double sup = state.u.max_abs();
        sup_history.push_back(sup);
        if (step % per_unit == 0) result.rate_history.emplace_back(state.time, rate);

        if (sup < 0.01 * opts.extinction_threshold) break; // decisively extinct
        if (rate < opts.tol_steady && state.time >= min_time) {
            // keep marching through the near-zero band while still decaying
            bool decaying_tail = false;
            if (sup < 1e-6 && static_cast<long>(sup_history.size()) > per_unit) {
                double ago = sup_history[sup_history.size() - 1 - per_unit];
                decaying_tail = sup < 0.99 * ago;
            }
            if (!decaying_tail) break;
        }
    }
    result.converged = step < n_steps || rate < opts.tol_steady;
    result.t_reached = state.time;
    result.u = std::move(state.u);
    result.residual = steady_residual(result.u, plan, tables, grid, birth);
    result.classification =
        result.u.max_abs() < opts.extinction_threshold ? Classification::extinct : Classification::positive;

    if (opts.cross_check && result.classification == Classification::positive) {
        double lam0 = opts.lambda0 ? *opts.lambda0 : 0.0;
        if (!opts.lambda0) {
            SpectralOptions sopts;
            sopts.scheme = opts.scheme;
            lam0 = flux_gauge_eigenvalue(tables, grid, birth, d, lambda_adv, sopts).lambda0;
        }
        if (lam0 > 0.0) {
            Field2D small(grid.n_a + 1, grid.n_x + 1, 0.01 * birth.L);
            DynamicsOptions second = opts;
            second.cross_check = false;
            auto other = equilibrium(tables, grid, birth, d, lambda_adv, second, &small);
            result.cross_checked = true;
            result.cross_distance = sup_distance(result.u, other.u);
        }
    }
    return result;
}

GlobalDynamicsReport verify_global_dynamics(const ProblemSpec& spec, const Grid& grid,
                                            const std::vector<Field2D>& seeds, const DynamicsOptions& opts) {
    if (seeds.size() < 2) throw std::invalid_argument("verify_global_dynamics: need at least two seeds");
    for (const auto& s : seeds) {
        if (s.rows() != grid.n_a + 1 || s.cols() != grid.n_x + 1)
            throw std::invalid_argument("verify_global_dynamics: seed shape does not match grid");
        if (!s.all_finite() || s.min() < 0.0)
            throw std::invalid_argument("verify_global_dynamics: seeds must be finite and nonnegative");
        if (s.max_abs() == 0.0) throw std::invalid_argument("verify_global_dynamics: seed is identically zero");
    }
    auto tables = sample_coefficients(spec, grid);

    GlobalDynamicsReport rep;
    SpectralOptions sopts;
    sopts.scheme = opts.scheme;
    rep.lambda0 = flux_gauge_eigenvalue(tables, grid, spec.birth, spec.d, spec.lambda_adv, sopts).lambda0;

    std::vector<EquilibriumResult> runs;
    runs.reserve(seeds.size());
    rep.all_converged = true;
    for (const auto& s : seeds) {
        runs.push_back(equilibrium(tables, grid, spec.birth, spec.d, spec.lambda_adv, opts, &s));
        rep.all_converged = rep.all_converged && runs.back().converged;
        rep.final_sup.push_back(runs.back().u.max_abs());
    }
    for (std::size_t a = 0; a < runs.size(); ++a)
        for (std::size_t b = a + 1; b < runs.size(); ++b)
            rep.max_pairwise = std::max(rep.max_pairwise, sup_distance(runs[a].u, runs[b].u));

    std::ostringstream os;
    if (rep.lambda0 > 0.0) {
        rep.pass = rep.all_converged && rep.max_pairwise <= 1e-4;
        os << "supercritical (lambda0 = " << rep.lambda0 << "), max pairwise distance " << rep.max_pairwise;
    } else {
        double worst = 0.0;
        for (double s : rep.final_sup) worst = std::max(worst, s);
        rep.pass = rep.all_converged && worst <= std::max(1e-6, 10.0 * opts.extinction_threshold);
        os << "subcritical (lambda0 = " << rep.lambda0 << "), max final sup " << worst;
    }
    rep.detail = os.str();
    return rep;
}

std::vector<MassCurve> mass_curves(const ProblemSpec& spec, const Grid& grid, SweepParameter parameter,
                                   const std::vector<double>& values, const DynamicsOptions& opts, int jobs) {
    auto tables = sample_coefficients(spec, grid);
    auto gam = gamma_threshold(tables, grid, spec.birth);
    if (!gam.downstream)
        throw std::invalid_argument("mass_curves: the downstream hypothesis Gamma(1) > 1 fails for this family");

    std::vector<MassCurve> out(values.size());
    parallel_for(static_cast<int>(values.size()), jobs, [&](int k) {
        double d = parameter == SweepParameter::diffusion ? values[k] : spec.d;
        double lam = parameter == SweepParameter::advection ? values[k] : spec.lambda_adv;
        MassCurve row;
        row.parameter = values[k];
        auto eq = equilibrium(tables, grid, spec.birth, d, lam, opts);
        row.converged = eq.converged;
        row.mass.resize(grid.n_a + 1);
        for (int j = 0; j <= grid.n_a; ++j) row.mass[j] = trapezoid(eq.u.row(j), grid.dx);
        row.age_monotone = true;
        double slack = 1e-9 * (1.0 + row.mass[0]);
        for (int j = 0; j < grid.n_a; ++j)
            if (row.mass[j + 1] > row.mass[j] + slack) row.age_monotone = false;
        out[k] = std::move(row);
    });
    return out;
}

ProfileCheckReport profile_checks(const ProblemSpec& spec, const Grid& grid, ProfileRegime regime,
                                  const DynamicsOptions& opts) {
    auto tables = sample_coefficients(spec, grid);
    ProfileCheckReport rep;
    rep.regime = regime;
    std::ostringstream os;

    if (regime == ProfileRegime::small_d_no_advection) {
        if (spec.lambda_adv != 0.0)
            throw std::invalid_argument("profile_checks: the small-diffusion regime requires Lambda = 0");
        auto gam = gamma_threshold(tables, grid, spec.birth);
        int i_lo = static_cast<int>(std::ceil(0.25 / grid.dx));
        int i_hi = static_cast<int>(std::floor(0.75 / grid.dx));
        bool all_super = true, all_sub = true;
        for (int i = i_lo; i <= i_hi; ++i) {
            if (gam.gamma[i] > 1.0) all_sub = false;
            else all_super = false;
        }
        if (!all_super && !all_sub)
            throw std::invalid_argument("profile_checks: probe interval mixes super- and subcritical nodes");

        auto eq = equilibrium(tables, grid, spec.birth, spec.d, 0.0, opts);
        rep.equilibrium_converged = eq.converged;
        if (all_super) {
            auto vs = v_star_profile(tables, grid, spec.birth);
            double sup_v = 0.0;
            for (int j = 0; j <= grid.n_a; ++j)
                for (int i = i_lo; i <= i_hi; ++i) sup_v = std::max(sup_v, vs.v(j, i));
            for (int j = 0; j <= grid.n_a; ++j)
                for (int i = i_lo; i <= i_hi; ++i)
                    rep.max_error = std::max(rep.max_error, std::abs(eq.u(j, i) - vs.v(j, i)));
            rep.threshold = 0.05 * sup_v;
            os << "sup |u* - v*| on probe = " << rep.max_error << " vs 0.05 sup v* = " << rep.threshold;
        } else {
            rep.subcritical_probe = true;
            for (int j = 0; j <= grid.n_a; ++j)
                for (int i = i_lo; i <= i_hi; ++i) rep.max_error = std::max(rep.max_error, eq.u(j, i));
            rep.threshold = 0.05 * spec.birth.L;
            os << "sup u* on subcritical probe = " << rep.max_error << " vs 0.05 L = " << rep.threshold;
        }
        rep.pass = rep.equilibrium_converged && rep.max_error <= rep.threshold;
    } else {
        auto us = u_star_profile(tables, grid, spec.birth);
        if (!us.positive)
            throw std::invalid_argument("profile_checks: the averaged supercriticality hypothesis fails");
        auto eq = equilibrium(tables, grid, spec.birth, spec.d, spec.lambda_adv, opts);
        rep.equilibrium_converged = eq.converged;
        double sup_u = 0.0;
        for (double v : us.u) sup_u = std::max(sup_u, v);
        for (int j = 0; j <= grid.n_a; ++j) {
            double lo = eq.u(j, 0), hi = eq.u(j, 0);
            for (int i = 0; i <= grid.n_x; ++i) {
                rep.max_error = std::max(rep.max_error, std::abs(eq.u(j, i) - us.u[j]));
                lo = std::min(lo, eq.u(j, i));
                hi = std::max(hi, eq.u(j, i));
            }
            rep.spatial_variation = std::max(rep.spatial_variation, hi - lo);
        }
        rep.threshold = 0.02 * sup_u;
        rep.pass = rep.equilibrium_converged && rep.max_error <= rep.threshold &&
                   rep.spatial_variation <= rep.threshold;
        os << "sup |u* - u_*| = " << rep.max_error << ", spatial variation = " << rep.spatial_variation
           << " vs 0.02 sup u_* = " << rep.threshold;
    }
    rep.detail = os.str();
    return rep;
}

IntegralBoundReport integral_bound_check(const EquilibriumResult& eq, const ProblemSpec& spec,
                                         const CoefficientTables& tables, const Grid& grid,
                                         double d, double lambda_adv) {
    IntegralBoundReport rep;
    if (lambda_adv <= 0.0) {
        rep.detail = "skipped: the bounds require Lambda > 0";
        return rep;
    }
    const double L = spec.birth.L;
    const double a_plus = grid.a_plus;
    double mu_sup = 0.0;
    for (double v : tables.mu_node.data()) mu_sup = std::max(mu_sup, v);
    double beta_sup = 0.0;
    for (double v : tables.beta_node.data()) beta_sup = std::max(beta_sup, v);
    for (double v : tables.beta_mid.data()) beta_sup = std::max(beta_sup, v);
    double fu0_max = 0.0;
    for (int i = 0; i <= grid.n_x; ++i) fu0_max = std::max(fu0_max, spec.birth.f_u0(grid.x(i)));

    const double M1 = a_plus * L * mu_sup + 2.0 * L;
    const double ratio = lambda_adv / d;
    const double denom = -std::expm1(-ratio); // 1 - e^{-Lambda/d}
    const double prefactor = (lambda_adv * L * a_plus + M1 * (1.0 - denom / ratio)) / (d * denom);

    // cumulative age integral of the equilibrium, trapezoid per column
    Field2D cum(grid.n_a + 1, grid.n_x + 1);
    for (int j = 1; j <= grid.n_a; ++j)
        for (int i = 0; i <= grid.n_x; ++i)
            cum(j, i) = cum(j - 1, i) + 0.5 * grid.da * (eq.u(j - 1, i) + eq.u(j, i));

    rep.checked_first = true;
    rep.holds_first = true;
    rep.margin_first = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid.n_x; ++i) {
        double tail = std::exp(-ratio * (1.0 - grid.x(i)));
        double bound = prefactor * tail + (L / lambda_adv) * (1.0 - tail);
        for (int j = 0; j <= grid.n_a; ++j) {
            double margin = bound - cum(j, i);
            rep.margin_first = std::min(rep.margin_first, margin);
            if (margin < -1e-12) rep.holds_first = false;
        }
    }

    rep.second_threshold_d = lambda_adv * lambda_adv / (4.0 * beta_sup * fu0_max);
    std::ostringstream os;
    if (d < rep.second_threshold_d) {
        const double M2 = 2.0 * beta_sup * fu0_max;
        const double decay = ratio * (1.0 - M2 * d / (lambda_adv * lambda_adv));
        rep.checked_second = true;
        rep.holds_second = true;
        rep.margin_second = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= grid.n_x; ++i) {
            double bound = prefactor * std::exp(-decay * (1.0 - grid.x(i)));
            for (int j = 0; j <= grid.n_a; ++j) {
                double margin = bound - cum(j, i);
                rep.margin_second = std::min(rep.margin_second, margin);
                if (margin < -1e-12) rep.holds_second = false;
            }
        }
        os << "both bounds checked; margins " << rep.margin_first << " and " << rep.margin_second;
    } else {
        os << "first bound margin " << rep.margin_first << "; second bound skipped (d = " << d
           << " not below the threshold " << rep.second_threshold_d << ")";
    }
    rep.detail = os.str();
    return rep;
}

} // namespace ageflow
