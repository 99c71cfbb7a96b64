#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ageflow/evolution.hpp"
#include "ageflow/limits.hpp"
#include "ageflow/model.hpp"

namespace ageflow {

struct PopulationState {
    Field2D u; // (n_a+1) x (n_x+1), nonnegative
    double time = 0.0;
};

struct DynamicsOptions {
    double t_max = 200.0;
    double tol_steady = 1e-8;           // sup-norm rate per unit time
    double extinction_threshold = 1e-8; // sup-norm below this classifies extinct
    AgeScheme scheme = AgeScheme::crank_nicolson;
    bool cross_check = false;           // re-march from a small seed and compare
    std::optional<double> lambda0;      // linearized eigenvalue, if already known
};

/// One step of the characteristics splitting with dt = da: age rows shift up
/// by one, each shifted row takes an implicit flux-gauge step, and the
/// newborn row solves u(0,x) = f(x, integral of beta u) (the cell-0 weight
/// makes this a mildly implicit scalar fixed point per column). When no plan
/// is supplied, the trapezoidal half-step is damped toward backward Euler
/// once da * stiffness leaves its stability budget, keeping the split march
/// positive and resonance-free.
PopulationState advance(const PopulationState& state, double dt, const CoefficientTables& tables,
                        const Grid& grid, const BirthLaw& birth, double d, double lambda_adv,
                        const PropagatorPlan* plan = nullptr);

enum class Classification { positive, extinct };

struct EquilibriumResult {
    Field2D u;
    double residual = 0.0; // sup-norm residual of the discrete steady problem
    bool converged = false;
    double t_reached = 0.0;
    Classification classification = Classification::extinct;
    std::vector<std::pair<double, double>> rate_history; // (t, rate), once per unit time
    bool cross_checked = false;
    double cross_distance = 0.0;
};

/// Marches from the bounded super-solution L e^{(Lambda/d) x} (exponent
/// capped at 30) until the sup-norm rate falls below tol_steady or t_max is
/// reached. States decaying through the near-zero band keep marching until
/// they are decisively extinct.
EquilibriumResult equilibrium(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth,
                              double d, double lambda_adv, const DynamicsOptions& opts = {},
                              const Field2D* start = nullptr);

struct GlobalDynamicsReport {
    double lambda0 = 0.0;
    std::vector<double> final_sup;  // per seed
    double max_pairwise = 0.0;
    bool all_converged = false;
    bool pass = false;
    std::string detail;
};

/// Global-stability check: every admissible seed converges to the same limit,
/// u* when lambda0 > 0 and zero otherwise.
GlobalDynamicsReport verify_global_dynamics(const ProblemSpec& spec, const Grid& grid,
                                            const std::vector<Field2D>& seeds,
                                            const DynamicsOptions& opts = {});

struct MassCurve {
    double parameter = 0.0;
    std::vector<double> mass; // trapezoid space mass per age node
    bool converged = false;
    bool age_monotone = false;
};

enum class SweepParameter { advection, diffusion };

/// Equilibrium space-mass per age node along a sweep of Lambda or d.
std::vector<MassCurve> mass_curves(const ProblemSpec& spec, const Grid& grid, SweepParameter parameter,
                                   const std::vector<double>& values, const DynamicsOptions& opts = {},
                                   int jobs = 1);

enum class ProfileRegime { small_d_no_advection, large_d };

struct ProfileCheckReport {
    ProfileRegime regime = ProfileRegime::small_d_no_advection;
    bool equilibrium_converged = false;
    double max_error = 0.0;
    double threshold = 0.0;
    double spatial_variation = 0.0; // large_d only
    bool subcritical_probe = false; // small_d: probe interval has Gamma <= 1
    bool pass = false;
    std::string detail;
};

/// Compares the computed equilibrium against the small-diffusion profile v*
/// on the interior probe [0.25, 0.75], or against the large-diffusion
/// profile u_* uniformly.
ProfileCheckReport profile_checks(const ProblemSpec& spec, const Grid& grid, ProfileRegime regime,
                                  const DynamicsOptions& opts = {});

struct IntegralBoundReport {
    bool checked_first = false, holds_first = false;
    double margin_first = 0.0;
    bool checked_second = false, holds_second = false;
    double margin_second = 0.0;
    double second_threshold_d = 0.0;
    std::string detail;
};

/// Explicit upper bounds on the cumulative age integral of the equilibrium:
/// the general advective bound, and the sharpened exponential bound when d
/// is below Lambda^2 / (4 ||beta_over|| max f_u(.,0)).
IntegralBoundReport integral_bound_check(const EquilibriumResult& eq, const ProblemSpec& spec,
                                         const CoefficientTables& tables, const Grid& grid,
                                         double d, double lambda_adv);

} // namespace ageflow
