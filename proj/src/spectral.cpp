#include "ageflow/spectral.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ageflow/quadrature.hpp"

namespace ageflow {

SpaceProfile apply_M(double lambda, const SpaceProfile& phi, const PropagatorPlan& plan,
                     const CoefficientTables& tables, const Grid& grid) {
    const int n = grid.n_x;
    SpaceProfile out(n + 1, 0.0);
    SpaceProfile prev = phi, next(n + 1);
    // stream the trajectory: rows past the fertility cutoff do not contribute
    for (int j = 0; j < grid.ac_index; ++j) {
        step_inplace(plan, j, prev, next);
        double wl = std::exp(-lambda * grid.age(j));
        double wr = std::exp(-lambda * grid.age(j + 1));
        for (int i = 0; i <= n; ++i)
            out[i] += tables.beta_mid(j, i) * (wl * prev[i] + wr * next[i]);
        prev.swap(next);
    }
    for (double& v : out) v *= 0.5 * grid.da;
    return out;
}

SpaceProfile apply_M(double lambda, const SpaceProfile& phi, const CoefficientTables& tables,
                     const Grid& grid, double d, double lambda_adv, AgeScheme scheme) {
    auto plan = make_plan(tables, grid, d, lambda_adv, Gauge::neumann, scheme);
    return apply_M(lambda, phi, plan, tables, grid);
}

SpectralRadius spectral_radius(double lambda, const PropagatorPlan& plan, const CoefficientTables& tables,
                               const Grid& grid, const SpectralOptions& opts, const SpaceProfile* start) {
    if (opts.tol_r <= 0.0) throw std::invalid_argument("spectral_radius: tolerance must be positive");
    SpaceProfile phi = start && !start->empty() ? *start : SpaceProfile(grid.n_x + 1, 1.0);
    double m = sup_norm(phi);
    if (m == 0.0) throw std::invalid_argument("spectral_radius: start profile is zero");
    for (double& v : phi) v /= m;

    double r_raw_prev = 0.0;
    double estimate = 0.0;
    double last_gap = std::numeric_limits<double>::infinity();
    bool have_raw = false, have_estimate = false;
    for (int k = 1; k <= opts.max_power_iters; ++k) {
        SpaceProfile psi = apply_M(lambda, phi, plan, tables, grid);
        double r_raw = sup_norm(psi);
        if (r_raw == 0.0) return {0.0, std::move(psi), k}; // kernel annihilates the cone
        for (double& v : psi) v /= r_raw;
        phi.swap(psi);
        if (have_raw) {
            double next = 0.5 * (r_raw + r_raw_prev);
            if (have_estimate) {
                last_gap = std::abs(next - estimate);
                if (last_gap < opts.tol_r) return {next, std::move(phi), k};
            }
            estimate = next;
            have_estimate = true;
        }
        r_raw_prev = r_raw;
        have_raw = true;
    }
    std::ostringstream os;
    os << "spectral_radius: no convergence in " << opts.max_power_iters
       << " iterations (gap between the last two estimates " << last_gap << ")";
    throw std::runtime_error(os.str());
}

SpectralRadius spectral_radius(double lambda, const CoefficientTables& tables, const Grid& grid,
                               double d, double lambda_adv, const SpectralOptions& opts,
                               const SpaceProfile* start) {
    auto plan = make_plan(tables, grid, d, lambda_adv, Gauge::neumann, opts.scheme);
    return spectral_radius(lambda, plan, tables, grid, opts, start);
}

EigenBounds eigen_bounds(const CoefficientTables& tables, const Grid& grid) {
    try {
        EigenBounds b;
        b.lambda_hi = characteristic_root(kernel_upper(tables, grid));
        b.lambda_lo = characteristic_root(kernel_lower(tables, grid));
        return b;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("eigen_bounds: bracket undefined (") + e.what() + ")");
    }
}

double pde_residual(const Field2D& u, const CoefficientTables& tables, const Grid& grid, double d,
                    double lambda_adv, double lambda0, Gauge gauge) {
    double res = 0.0;
    const double da = grid.da, dx = grid.dx;
    for (int j = 1; j < grid.n_a; ++j) {
        for (int i = 1; i < grid.n_x; ++i) {
            double u_a = (u(j + 1, i) - u(j - 1, i)) / (2.0 * da);
            double u_xx = (u(j, i - 1) - 2.0 * u(j, i) + u(j, i + 1)) / (dx * dx);
            double u_x = (u(j, i + 1) - u(j, i - 1)) / (2.0 * dx);
            double adv = gauge == Gauge::neumann ? lambda_adv * tables.q_node[i] * u_x : -lambda_adv * u_x;
            double r = u_a - d * u_xx - adv + (tables.mu_node(j, i) + lambda0) * u(j, i);
            res = std::max(res, std::abs(r));
        }
    }
    return res;
}

EigenResult principal_eigenvalue(const CoefficientTables& tables, const Grid& grid, double d,
                                 double lambda_adv, const SpectralOptions& opts) {
    auto plan = make_plan(tables, grid, d, lambda_adv, Gauge::neumann, opts.scheme);
    EigenBounds bounds = eigen_bounds(tables, grid);
    double lo = bounds.lambda_lo, hi = bounds.lambda_hi;

    EigenResult result;
    SpaceProfile warm(grid.n_x + 1, 1.0);
    long power_total = 0;
    auto radius = [&](double lambda) {
        auto sr = spectral_radius(lambda, plan, tables, grid, opts, &warm);
        power_total += sr.iterations;
        warm = sr.profile;
        return sr;
    };

    // the scalar bracket can miss the discrete root by a sliver; widen by 1
    int guard = 0;
    while (radius(lo).r < 1.0) {
        lo -= 1.0;
        if (++guard > 5) throw std::runtime_error("principal_eigenvalue: no root in search window (r < 1 at the lower end)");
    }
    guard = 0;
    while (radius(hi).r > 1.0) {
        hi += 1.0;
        if (++guard > 5) throw std::runtime_error("principal_eigenvalue: no root in search window (r > 1 at the upper end)");
    }
    result.bracket_lo = lo;
    result.bracket_hi = hi;

    int iters = 0;
    while (hi - lo > opts.tol_lambda) {
        double mid = 0.5 * (lo + hi);
        (radius(mid).r >= 1.0 ? lo : hi) = mid;
        ++iters;
    }
    result.lambda0 = 0.5 * (lo + hi);
    result.bisect_iterations = iters;

    auto final_sr = radius(result.lambda0);
    result.r_residual = std::abs(final_sr.r - 1.0);
    result.power_iterations = power_total;

    // eigenfunction: full trajectory of the converged profile, discounted by
    // e^{-lambda0 a} and normalized to sup-norm 1
    Trajectory traj = propagate(final_sr.profile, plan);
    result.eigenfunction = std::move(traj.values);
    for (int j = 0; j <= grid.n_a; ++j) {
        double w = std::exp(-result.lambda0 * grid.age(j));
        for (int i = 0; i <= grid.n_x; ++i) result.eigenfunction(j, i) *= w;
    }
    double m = result.eigenfunction.max_abs();
    if (m > 0.0)
        for (double& v : result.eigenfunction.data()) v /= m;
    result.gauge = Gauge::neumann;
    result.pde_residual = pde_residual(result.eigenfunction, tables, grid, d, lambda_adv, result.lambda0, Gauge::neumann);
    return result;
}

CoefficientTables fold_birth_weight(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth) {
    CoefficientTables out = tables;
    for (int i = 0; i <= grid.n_x; ++i) {
        double w = birth.f_u0(grid.x(i));
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::runtime_error("fold_birth_weight: f_u(x, 0) must be finite and nonnegative");
        for (int j = 0; j < out.beta_node.rows(); ++j) out.beta_node(j, i) *= w;
        for (int j = 0; j < out.beta_mid.rows(); ++j) out.beta_mid(j, i) *= w;
    }
    return out;
}

EigenResult flux_gauge_eigenvalue(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth,
                                  double d, double lambda_adv, const SpectralOptions& opts) {
    CoefficientTables weighted = fold_birth_weight(tables, grid, birth);
    std::fill(weighted.q_node.begin(), weighted.q_node.end(), 1.0); // flux advection has no profile
    EigenResult result = principal_eigenvalue(weighted, grid, d, lambda_adv, opts);
    result.eigenfunction = gauge_transform(result.eigenfunction, grid, d, lambda_adv, GaugeDirection::to_flux);
    double m = result.eigenfunction.max_abs();
    if (m > 0.0)
        for (double& v : result.eigenfunction.data()) v /= m;
    result.gauge = Gauge::flux;
    result.pde_residual = pde_residual(result.eigenfunction, weighted, grid, d, lambda_adv, result.lambda0, Gauge::flux);
    return result;
}

} // namespace ageflow
