#pragma once

#include <optional>
#include <vector>

#include "ageflow/evolution.hpp"
#include "ageflow/limits.hpp"
#include "ageflow/model.hpp"

namespace ageflow {

struct SpectralOptions {
    double tol_r = 1e-10;      // spectral-radius convergence
    int max_power_iters = 2000;
    double tol_lambda = 1e-8;  // bisection bracket width
    AgeScheme scheme = AgeScheme::crank_nicolson;
};

/// Next-generation operator: integral over [0, a_c] of
/// beta(a, .) e^{-lambda a} (U(a, 0) phi)(.) da.
SpaceProfile apply_M(double lambda, const SpaceProfile& phi, const PropagatorPlan& plan,
                     const CoefficientTables& tables, const Grid& grid);
SpaceProfile apply_M(double lambda, const SpaceProfile& phi, const CoefficientTables& tables,
                     const Grid& grid, double d, double lambda_adv,
                     AgeScheme scheme = AgeScheme::crank_nicolson);

struct SpectralRadius {
    double r = 0.0;
    SpaceProfile profile; // positive fixed direction, sup-norm 1
    int iterations = 0;
};

/// Power iteration with sup-norm normalization from the constant profile
/// (or `start` when given). The estimate is the average of the last two
/// sup-norm ratios; converged when successive estimates differ by < tol_r.
SpectralRadius spectral_radius(double lambda, const PropagatorPlan& plan, const CoefficientTables& tables,
                               const Grid& grid, const SpectralOptions& opts = {},
                               const SpaceProfile* start = nullptr);
SpectralRadius spectral_radius(double lambda, const CoefficientTables& tables, const Grid& grid,
                               double d, double lambda_adv, const SpectralOptions& opts = {},
                               const SpaceProfile* start = nullptr);

struct EigenBounds {
    double lambda_lo = 0.0; // root of the (beta_under, mu_over) kernel
    double lambda_hi = 0.0; // root of the (beta_over, mu_under) kernel
};

/// Scalar characteristic roots bracketing the principal eigenvalue,
/// independent of d and Lambda.
EigenBounds eigen_bounds(const CoefficientTables& tables, const Grid& grid);

struct EigenResult {
    double lambda0 = 0.0;
    Field2D eigenfunction;   // (n_a+1) x (n_x+1), positive, sup-norm 1
    Gauge gauge = Gauge::neumann;
    double r_residual = 0.0; // |r(M_{lambda0}) - 1|
    double pde_residual = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    int bisect_iterations = 0;
    long power_iterations = 0;
};

/// Principal eigenvalue of the Neumann-gauge problem by bisection on
/// r(M_lambda) = 1 inside the scalar bracket (widened by +-1 when the
/// discrete endpoints do not straddle 1).
EigenResult principal_eigenvalue(const CoefficientTables& tables, const Grid& grid, double d,
                                 double lambda_adv, const SpectralOptions& opts = {});

/// Multiply the birth tables by the per-position weight f_u(x, 0); used to
/// linearize the nonlinear model at zero.
CoefficientTables fold_birth_weight(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth);

/// Principal eigenvalue of the flux-gauge linearized problem. The flux form
/// is the Neumann form with q = 1 conjugated by e^{(Lambda/d) x}, so the
/// eigenvalue is computed on that problem and the eigenfunction is gauged
/// back and renormalized.
EigenResult flux_gauge_eigenvalue(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth,
                                  double d, double lambda_adv, const SpectralOptions& opts = {});

/// Sup-norm of the centered-difference residual of the eigenvalue problem on
/// interior nodes, in either gauge.
double pde_residual(const Field2D& u, const CoefficientTables& tables, const Grid& grid, double d,
                    double lambda_adv, double lambda0, Gauge gauge);

} // namespace ageflow
