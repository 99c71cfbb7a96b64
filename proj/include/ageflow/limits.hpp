#pragma once

#include <optional>
#include <vector>

#include "ageflow/field.hpp"
#include "ageflow/model.hpp"

namespace ageflow {

/// Space-free renewal kernel: birth rate per age cell (midpoint samples,
/// zero at and beyond the fertility cutoff) and the cumulative death
/// integral at age nodes.
struct ScalarRenewalKernel {
    std::vector<double> beta_cell; // n_a entries
    std::vector<double> mu_cum;    // n_a+1 entries, non-decreasing, mu_cum[0] = 0
    double da = 0.0;
};

/// F(alpha) = integral of beta(a) e^{-alpha a} e^{-mu_cum(a)} da, strictly
/// decreasing in alpha whenever the kernel is nontrivial.
double kernel_value(const ScalarRenewalKernel& kernel, double alpha);

/// The unique root of F(alpha) = 1, by bisection on a geometrically expanded
/// bracket starting from [-50, 50]. Throws "kernel too weak" when no root
/// exists within the expansion cap.
double characteristic_root(const ScalarRenewalKernel& kernel);

/// Kernel at a fixed space column of the sampled tables.
ScalarRenewalKernel kernel_at_column(const CoefficientTables& tables, const Grid& grid, int column);

/// Kernel with beta and mu replaced by their spatial averages (trapezoid in x).
ScalarRenewalKernel kernel_space_averaged(const CoefficientTables& tables, const Grid& grid);

/// Kernels from the per-age spatial extrema: (beta_over, mu_under) bounds the
/// principal eigenvalue from above, (beta_under, mu_over) from below.
ScalarRenewalKernel kernel_upper(const CoefficientTables& tables, const Grid& grid);
ScalarRenewalKernel kernel_lower(const CoefficientTables& tables, const Grid& grid);

struct LimitValues {
    double alpha1 = 0.0;   // large positive advection / small diffusion with Lambda > 0
    double alpha0 = 0.0;   // large negative advection / small diffusion with Lambda < 0
    double alpha_max = 0.0; // small diffusion without advection
    double alpha_bar = 0.0; // large diffusion
    int argmax_index = 0;   // space node where the per-column root peaks
};

LimitValues limit_values(const CoefficientTables& tables, const Grid& grid);

/// Threshold function Gamma(x) = f_u(x,0) * integral of beta e^{-int mu} da,
/// plus the three explicit supercriticality hypotheses built from it.
struct GammaResult {
    std::vector<double> gamma;  // per space node
    bool downstream = false;    // Gamma(1) > 1
    bool peak = false;          // max_x Gamma(x) > 1
    bool average = false;       // spatially averaged condition > 1
    double average_value = 0.0; // the double integral behind `average`
};

GammaResult gamma_threshold(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth);

/// Small-diffusion, no-advection equilibrium profile: column x solves
/// v_a = -mu v with v(0) = f(x, integral beta v) when Gamma(x) > 1, and is
/// zero otherwise (flagged per column).
struct VStarResult {
    Field2D v;                     // (n_a+1) x (n_x+1)
    std::vector<unsigned char> positive; // per space node
};

VStarResult v_star_profile(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth);

/// Large-diffusion equilibrium profile: u'(a) = -mu_avg(a) u with
/// u(0) = integral of f(x, u(0) K_x) dx; zero with positive=false when the
/// averaged condition fails.
struct UStarResult {
    std::vector<double> u; // n_a+1 entries
    bool positive = false;
};

UStarResult u_star_profile(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth);

/// Every scalar quantity the asymptotic theory attaches to one problem.
struct LimitSet {
    LimitValues values;
    GammaResult gamma;
    VStarResult v_star;
    UStarResult u_star;
};

LimitSet compute_limit_set(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth);

} // namespace ageflow
