#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ageflow/field.hpp"

namespace ageflow {

/// Nonlinear birth law f(x, u) with its density-derivative at zero and the
/// uniform bound L (f(x, u) <= L for all u >= 0).
struct BirthLaw {
    std::function<double(double x, double u)> f;
    std::function<double(double x)> f_u0;
    double L = 1.0;
};

/// Holling type II response: f(x, u) = scale * u / (1 + tau * u).
BirthLaw holling_birth(double tau = 1.0, double scale = 1.0);

/// Saturating-exponential response: f(x, u) = scale * (1 - e^{-u}).
BirthLaw logistic_birth(double scale = 1.0);

/// Modulate a birth law by a positive spatial weight: f(x, u) -> w(x) f(x, u).
BirthLaw weighted_birth(BirthLaw base, std::function<double(double)> weight, double weight_max);

/// Full parameterization of the age-structured problem: death rate mu(a, x),
/// birth rate beta(a, x), advection profile q(x), birth nonlinearity,
/// diffusion and advection rates, fertility cutoff a_c and truncation age a_plus.
struct ProblemSpec {
    std::function<double(double a, double x)> mu;
    std::function<double(double a, double x)> beta;
    std::function<double(double x)> q;
    BirthLaw birth;
    double d = 1.0;
    double lambda_adv = 0.0;
    double a_c = 1.0;
    double a_plus = 1.0;
};

/// Built-in presets:
///   "P0"           mu = 1, beta = 3 on [0, a_c), q = 1
///   "P1"           mu = 2 - x, otherwise as P0
///   "peak"         mu = 1 + 4(x - 1/2)^2, otherwise as P0
///   "gamma_valley" mu chosen so Gamma(x) <= 1 on [0.25, 0.75] and > 1 near the boundary
///   "subcritical"  mu = 0, beta = 0.9 on [0, a_c)
/// All presets use a_c = a_plus = 1 and the Holling II birth law.
ProblemSpec make_preset(const std::string& name);

/// Coefficient given as a dense table over a uniform lattice on
/// [0, a_max] x [0, 1]; evaluated by bilinear interpolation.
std::function<double(double, double)>
tabulated_coefficient(std::vector<double> values_row_major, int n_age_rows, int n_space_cols, double a_max);

/// Uniform tensor grid on [0, a_plus] x [0, 1]. The fertility cutoff a_c is
/// snapped onto an age node (ac_index) whenever that changes da by at most 1%.
struct Grid {
    int n_a = 0, n_x = 0;
    double da = 0.0, dx = 0.0;
    double a_plus = 0.0;
    int ac_index = 0;
    std::vector<double> age_nodes;
    std::vector<double> space_nodes;

    double age(int j) const { return age_nodes[j]; }
    double x(int i) const { return space_nodes[i]; }
    double age_mid(int j) const { return (j + 0.5) * da; }
};

Grid build_grid(const ProblemSpec& spec, int n_a, int n_x);

/// Pointwise samples of the coefficients. Node tables are used for extrema,
/// cumulative death integrals and validation; the age-midpoint tables drive
/// the steppers and the birth quadrature (beta_mid is zero for cells at or
/// beyond the fertility cutoff).
struct CoefficientTables {
    Field2D mu_node, beta_node;  // (n_a+1) x (n_x+1)
    Field2D mu_mid, beta_mid;    // n_a x (n_x+1)
    std::vector<double> q_node;  // n_x+1
};

CoefficientTables sample_coefficients(const ProblemSpec& spec, const Grid& grid);

/// Per-age-node extrema over space of mu and beta (node tables), plus the
/// same for the midpoint beta table used by renewal kernels.
struct SpatialExtrema {
    std::vector<double> mu_under, mu_over;            // size n_a+1
    std::vector<double> beta_under, beta_over;        // size n_a+1
    std::vector<double> beta_mid_under, beta_mid_over; // size n_a
};

SpatialExtrema spatial_extrema(const CoefficientTables& tables);

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct AssumptionReport {
    std::vector<Check> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Sampled verification of the standing assumptions: beta cutoff and tail
/// integral, nonnegative finite mu, strictly positive q, and monotone /
/// sublinear / bounded birth law on a 64x64 lattice of (x, u).
AssumptionReport validate_assumptions(const ProblemSpec& spec, const Grid& grid);

} // namespace ageflow
