#include "ageflow/evolution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ageflow {

namespace {

// Bernoulli function z / (e^z - 1), the Scharfetter-Gummel flux weight.
double bernoulli(double z) {
    if (std::abs(z) < 1e-5) return 1.0 - z / 2.0 + z * z / 12.0;
    if (z > 0.0) return z / std::expm1(z);
    return -z / std::expm1(-z) - z; // B(z) = B(-z) - z
}

// Solves (I - theta*da*(L - diag(mu))) out = rhs with the plan's tridiagonal L.
// Workspace arrays are caller-provided to keep the hot loop allocation-free.
void solve_step(const PropagatorPlan& p, int age_index, std::span<const double> rhs,
                std::span<double> out, std::vector<double>& cw, std::vector<double>& dw) {
    const int n = p.n_x;
    const double h = p.theta * p.da;
    const auto& mu = p.tables->mu_mid;
    auto diag = [&](int i) { return 1.0 - h * (p.di[i] - mu(age_index, i)); };

    double piv = diag(0);
    if (std::abs(piv) < 1e-300) throw std::runtime_error("tridiagonal solve failed at age index " + std::to_string(age_index));
    cw[0] = -h * p.up[0] / piv;
    dw[0] = rhs[0] / piv;
    for (int i = 1; i <= n; ++i) {
        double a = -h * p.lo[i];
        double m = diag(i) - a * cw[i - 1];
        if (std::abs(m) < 1e-300) throw std::runtime_error("tridiagonal solve failed at age index " + std::to_string(age_index));
        if (i < n) cw[i] = -h * p.up[i] / m;
        dw[i] = (rhs[i] - a * dw[i - 1]) / m;
    }
    out[n] = dw[n];
    for (int i = n - 1; i >= 0; --i) out[i] = dw[i] - cw[i] * out[i + 1];
}

void explicit_half(const PropagatorPlan& p, int age_index, std::span<const double> in, std::vector<double>& y) {
    const int n = p.n_x;
    const double h = (1.0 - p.theta) * p.da;
    const auto& mu = p.tables->mu_mid;
    if (h == 0.0) {
        for (int i = 0; i <= n; ++i) y[i] = in[i];
        return;
    }
    for (int i = 0; i <= n; ++i) {
        double av = (p.di[i] - mu(age_index, i)) * in[i];
        if (i > 0) av += p.lo[i] * in[i - 1];
        if (i < n) av += p.up[i] * in[i + 1];
        y[i] = in[i] + h * av;
    }
}

} // namespace

bool gauge_overflow_risk(double d, double lambda_adv, double dx) {
    return std::abs(lambda_adv / d) * dx > 30.0;
}

PropagatorPlan make_plan(const CoefficientTables& tables, const Grid& grid, double d, double lambda_adv,
                         Gauge gauge, AgeScheme scheme) {
    if (d <= 0.0) throw std::invalid_argument("make_plan: diffusion rate must be positive");
    PropagatorPlan p;
    p.gauge = gauge;
    p.scheme = scheme;
    p.theta = scheme == AgeScheme::crank_nicolson ? 0.5 : 1.0;
    p.n_a = grid.n_a;
    p.n_x = grid.n_x;
    p.da = grid.da;
    p.dx = grid.dx;
    p.tables = &tables;
    const int n = grid.n_x;
    const double dx = grid.dx;
    p.lo.assign(n + 1, 0.0);
    p.di.assign(n + 1, 0.0);
    p.up.assign(n + 1, 0.0);

    if (gauge == Gauge::neumann) {
        double q_max = 0.0;
        for (double q : tables.q_node) q_max = std::max(q_max, std::abs(q));
        p.central = std::abs(lambda_adv) * q_max * dx / (2.0 * d) <= 1.0 + 1e-12;
        for (int i = 0; i <= n; ++i) {
            double c = lambda_adv * tables.q_node[i];
            if (i == 0) {
                p.di[i] += -2.0 * d / (dx * dx);
                p.up[i] += 2.0 * d / (dx * dx);
                // mirror ghost kills the centered advection term at the wall
                if (!p.central && c != 0.0) {
                    p.di[i] += -std::abs(c) / dx;
                    p.up[i] += std::abs(c) / dx;
                }
            } else if (i == n) {
                p.di[i] += -2.0 * d / (dx * dx);
                p.lo[i] += 2.0 * d / (dx * dx);
                if (!p.central && c != 0.0) {
                    p.di[i] += -std::abs(c) / dx;
                    p.lo[i] += std::abs(c) / dx;
                }
            } else {
                p.lo[i] += d / (dx * dx);
                p.di[i] += -2.0 * d / (dx * dx);
                p.up[i] += d / (dx * dx);
                if (p.central) {
                    p.lo[i] += -c / (2.0 * dx);
                    p.up[i] += c / (2.0 * dx);
                } else if (c > 0.0) {
                    p.di[i] += -c / dx;
                    p.up[i] += c / dx;
                } else if (c < 0.0) {
                    p.di[i] += c / dx;
                    p.lo[i] += -c / dx;
                }
            }
        }
    } else {
        // conservation form: row_i = (F_{i+1/2} - F_{i-1/2}) / cell width,
        // F_{i+1/2} = (d/dx) (B(z) u_{i+1} - B(-z) u_i), z = Lambda dx / d
        p.central = true;
        const double z = lambda_adv * dx / d;
        const double bp = bernoulli(z), bm = bernoulli(-z);
        const double k = d / (dx * dx);
        for (int i = 0; i <= n; ++i) {
            if (i == 0) {
                p.di[i] += -2.0 * k * bm;
                p.up[i] += 2.0 * k * bp;
            } else if (i == n) {
                p.di[i] += -2.0 * k * bp;
                p.lo[i] += 2.0 * k * bm;
            } else {
                p.lo[i] += k * bm;
                p.di[i] += -k * (bm + bp);
                p.up[i] += k * bp;
            }
        }
    }
    return p;
}

bool advection_is_central(const CoefficientTables& tables, const Grid& grid, double d, double lambda_adv) {
    double q_max = 0.0;
    for (double q : tables.q_node) q_max = std::max(q_max, std::abs(q));
    return std::abs(lambda_adv) * q_max * grid.dx / (2.0 * d) <= 1.0 + 1e-12;
}

void step_inplace(const PropagatorPlan& plan, int age_index, std::span<const double> in, std::span<double> out) {
    if (age_index < 0 || age_index >= plan.n_a) throw std::invalid_argument("step: age index out of range");
    static thread_local std::vector<double> y, cw, dw;
    y.resize(plan.n_x + 1);
    cw.resize(plan.n_x + 1);
    dw.resize(plan.n_x + 1);
    explicit_half(plan, age_index, in, y);
    solve_step(plan, age_index, y, out, cw, dw);
}

SpaceProfile step_neumann(const SpaceProfile& state, int age_index, const CoefficientTables& tables,
                          const Grid& grid, double d, double lambda_adv, AgeScheme scheme) {
    auto plan = make_plan(tables, grid, d, lambda_adv, Gauge::neumann, scheme);
    SpaceProfile out(state.size());
    step_inplace(plan, age_index, state, out);
    return out;
}

SpaceProfile step_flux(const SpaceProfile& state, int age_index, const CoefficientTables& tables,
                       const Grid& grid, double d, double lambda_adv, AgeScheme scheme) {
    auto plan = make_plan(tables, grid, d, lambda_adv, Gauge::flux, scheme);
    SpaceProfile out(state.size());
    step_inplace(plan, age_index, state, out);
    return out;
}

Trajectory propagate(const SpaceProfile& phi, const PropagatorPlan& plan) {
    if (static_cast<int>(phi.size()) != plan.n_x + 1) throw std::invalid_argument("propagate: profile size does not match grid");
    for (double v : phi)
        if (!std::isfinite(v)) throw std::invalid_argument("propagate: initial profile has non-finite entries");
    Trajectory traj;
    traj.gauge = plan.gauge;
    traj.values = Field2D(plan.n_a + 1, plan.n_x + 1);
    for (int i = 0; i <= plan.n_x; ++i) traj.values(0, i) = phi[i];
    for (int j = 0; j < plan.n_a; ++j) step_inplace(plan, j, traj.values.row(j), traj.values.row(j + 1));
    return traj;
}

Trajectory propagate(const SpaceProfile& phi, const CoefficientTables& tables, const Grid& grid,
                     double d, double lambda_adv, Gauge gauge, AgeScheme scheme) {
    auto plan = make_plan(tables, grid, d, lambda_adv, gauge, scheme);
    return propagate(phi, plan);
}

namespace {
std::vector<double> gauge_factors(const Grid& grid, double d, double lambda_adv, GaugeDirection direction) {
    if (d <= 0.0) throw std::invalid_argument("gauge_transform: diffusion rate must be positive");
    double rho = lambda_adv / d;
    double sign = direction == GaugeDirection::to_neumann ? -1.0 : 1.0;
    std::vector<double> f(grid.n_x + 1);
    for (int i = 0; i <= grid.n_x; ++i) f[i] = std::exp(sign * rho * grid.x(i));
    return f;
}
} // namespace

SpaceProfile gauge_transform(const SpaceProfile& profile, const Grid& grid, double d, double lambda_adv,
                             GaugeDirection direction) {
    auto f = gauge_factors(grid, d, lambda_adv, direction);
    SpaceProfile out(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) out[i] = profile[i] * f[i];
    return out;
}

Field2D gauge_transform(const Field2D& field, const Grid& grid, double d, double lambda_adv,
                        GaugeDirection direction) {
    auto f = gauge_factors(grid, d, lambda_adv, direction);
    Field2D out(field.rows(), field.cols());
    for (int j = 0; j < field.rows(); ++j)
        for (int i = 0; i < field.cols(); ++i) out(j, i) = field(j, i) * f[i];
    return out;
}

} // namespace ageflow
