#pragma once

#include <span>
#include <vector>

#include "ageflow/field.hpp"
#include "ageflow/model.hpp"

namespace ageflow {

/// Trapezoid rule over uniformly spaced samples.
inline double trapezoid(std::span<const double> v, double h) {
    if (v.size() < 2) return 0.0;
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * h;
}

/// Cumulative trapezoid: out[k] = integral over [0, k*h].
inline std::vector<double> cumulative_trapezoid(std::span<const double> v, double h) {
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t k = 1; k < v.size(); ++k) out[k] = out[k - 1] + 0.5 * h * (v[k - 1] + v[k]);
    return out;
}

/// Birth integral over [0, a_c] of beta(a) w(a) da at one space column.
/// Beta enters at age-cell midpoints (already zeroed at and beyond the
/// cutoff cell), w at age nodes averaged per cell. Keeping the midpoint
/// sampling makes the rule second-order even when beta jumps at a_c.
inline double birth_integral_at(const CoefficientTables& tables, const Grid& grid, const Field2D& w, int i) {
    double s = 0.0;
    for (int j = 0; j < grid.ac_index; ++j)
        s += tables.beta_mid(j, i) * (w(j, i) + w(j + 1, i));
    return 0.5 * grid.da * s;
}

/// Birth integral at every space column.
inline std::vector<double> birth_integral(const CoefficientTables& tables, const Grid& grid, const Field2D& w) {
    std::vector<double> out(grid.n_x + 1, 0.0);
    for (int j = 0; j < grid.ac_index; ++j) {
        for (int i = 0; i <= grid.n_x; ++i)
            out[i] += tables.beta_mid(j, i) * (w(j, i) + w(j + 1, i));
    }
    for (double& v : out) v *= 0.5 * grid.da;
    return out;
}

/// Scalar form: cell-midpoint beta against node samples of w.
inline double birth_integral_scalar(std::span<const double> beta_cell, std::span<const double> w_nodes, double da) {
    double s = 0.0;
    for (std::size_t j = 0; j < beta_cell.size(); ++j)
        if (beta_cell[j] != 0.0) s += beta_cell[j] * (w_nodes[j] + w_nodes[j + 1]);
    return 0.5 * da * s;
}

} // namespace ageflow
