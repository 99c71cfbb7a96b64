#pragma once

#include <span>
#include <vector>

#include "ageflow/field.hpp"
#include "ageflow/model.hpp"

namespace ageflow {

using SpaceProfile = std::vector<double>;

enum class Gauge { neumann, flux };
enum class AgeScheme { crank_nicolson, backward_euler };

struct Trajectory {
    Field2D values; // (n_a+1) x (n_x+1), row j = U(a_j, 0) phi
    Gauge gauge = Gauge::neumann;
};

/// Precomputed spatial stencil and age-midpoint death rates for the theta
/// stepper. The referenced tables must outlive the plan.
///
/// Neumann gauge: v_a = d v_xx + Lambda q(x) v_x - mu v with v_x = 0 at both
/// ends (mirror ghosts). Advection is centered when the cell Peclet number
/// |Lambda| q_max dx / (2d) <= 1 and first-order upwind otherwise, biased by
/// the sign of Lambda q.
///
/// Flux gauge: u_a = d u_xx - Lambda u_x - mu u with d u_x - Lambda u = 0 at
/// both ends, discretized in conservation form with Scharfetter-Gummel face
/// fluxes. The trapezoid mass is exactly conserved when mu = 0, and the
/// sampled profile e^{(Lambda/d) x} is exactly stationary.
struct PropagatorPlan {
    Gauge gauge = Gauge::neumann;
    AgeScheme scheme = AgeScheme::crank_nicolson;
    int n_a = 0, n_x = 0;
    double da = 0.0, dx = 0.0;
    double theta = 0.5;
    bool central = true;
    std::vector<double> lo, di, up; // age-independent part of the spatial operator
    const CoefficientTables* tables = nullptr;
};

PropagatorPlan make_plan(const CoefficientTables& tables, const Grid& grid, double d, double lambda_adv,
                         Gauge gauge, AgeScheme scheme = AgeScheme::crank_nicolson);

/// True when the hybrid advection discretization uses the centered branch.
bool advection_is_central(const CoefficientTables& tables, const Grid& grid, double d, double lambda_adv);

/// One implicit step of the plan's operator from age node j to j+1,
/// with mu evaluated at the age midpoint.
void step_inplace(const PropagatorPlan& plan, int age_index, std::span<const double> in, std::span<double> out);

SpaceProfile step_neumann(const SpaceProfile& state, int age_index, const CoefficientTables& tables,
                          const Grid& grid, double d, double lambda_adv,
                          AgeScheme scheme = AgeScheme::crank_nicolson);

SpaceProfile step_flux(const SpaceProfile& state, int age_index, const CoefficientTables& tables,
                       const Grid& grid, double d, double lambda_adv,
                       AgeScheme scheme = AgeScheme::crank_nicolson);

/// Rows j = 0..n_a of the discrete evolution family applied to phi.
Trajectory propagate(const SpaceProfile& phi, const PropagatorPlan& plan);
Trajectory propagate(const SpaceProfile& phi, const CoefficientTables& tables, const Grid& grid,
                     double d, double lambda_adv, Gauge gauge = Gauge::neumann,
                     AgeScheme scheme = AgeScheme::crank_nicolson);

enum class GaugeDirection {
    to_neumann, // multiply by e^{-(Lambda/d) x}
    to_flux     // multiply by e^{+(Lambda/d) x}
};

/// Pointwise gauge factor e^{-+(Lambda/d) x}; round trip is the identity.
SpaceProfile gauge_transform(const SpaceProfile& profile, const Grid& grid, double d, double lambda_adv,
                             GaugeDirection direction);
Field2D gauge_transform(const Field2D& field, const Grid& grid, double d, double lambda_adv,
                        GaugeDirection direction);

/// The per-cell gauge exponent |Lambda/d| dx is large enough to risk overflow.
bool gauge_overflow_risk(double d, double lambda_adv, double dx);

} // namespace ageflow
