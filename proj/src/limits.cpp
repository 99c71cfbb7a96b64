#include "ageflow/limits.hpp"

#include <cmath>
#include <stdexcept>

#include "ageflow/quadrature.hpp"

namespace ageflow {

double kernel_value(const ScalarRenewalKernel& kernel, double alpha) {
    const double da = kernel.da;
    double s = 0.0;
    for (std::size_t j = 0; j < kernel.beta_cell.size(); ++j) {
        if (kernel.beta_cell[j] == 0.0) continue; // avoids 0 * inf at extreme alpha
        double wl = std::exp(-alpha * (j * da) - kernel.mu_cum[j]);
        double wr = std::exp(-alpha * ((j + 1) * da) - kernel.mu_cum[j + 1]);
        s += kernel.beta_cell[j] * 0.5 * (wl + wr);
    }
    if (std::isnan(s)) throw std::runtime_error("characteristic kernel produced NaN");
    return s * da;
}

double characteristic_root(const ScalarRenewalKernel& kernel) {
    double weight = 0.0;
    for (double b : kernel.beta_cell) weight += b;
    if (!(weight > 0.0)) throw std::runtime_error("characteristic_root: kernel too weak (beta integral vanishes)");

    double lo = -50.0, hi = 50.0;
    int expansions = 0;
    while (kernel_value(kernel, lo) < 1.0) {
        lo *= 2.0;
        if (++expansions > 8) throw std::runtime_error("characteristic_root: kernel too weak (no root above the expansion cap)");
    }
    expansions = 0;
    while (kernel_value(kernel, hi) > 1.0) {
        hi *= 2.0;
        if (++expansions > 8) throw std::runtime_error("characteristic_root: kernel does not decay below 1");
    }
    // F is strictly decreasing: F(lo) >= 1 >= F(hi)
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        double mid = 0.5 * (lo + hi);
        (kernel_value(kernel, mid) >= 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ScalarRenewalKernel kernel_at_column(const CoefficientTables& tables, const Grid& grid, int column) {
    ScalarRenewalKernel k;
    k.da = grid.da;
    k.beta_cell.resize(grid.n_a);
    for (int j = 0; j < grid.n_a; ++j) k.beta_cell[j] = tables.beta_mid(j, column);
    std::vector<double> mu(grid.n_a + 1);
    for (int j = 0; j <= grid.n_a; ++j) mu[j] = tables.mu_node(j, column);
    k.mu_cum = cumulative_trapezoid(mu, grid.da);
    return k;
}

ScalarRenewalKernel kernel_space_averaged(const CoefficientTables& tables, const Grid& grid) {
    ScalarRenewalKernel k;
    k.da = grid.da;
    k.beta_cell.resize(grid.n_a);
    for (int j = 0; j < grid.n_a; ++j) k.beta_cell[j] = trapezoid(tables.beta_mid.row(j), grid.dx);
    std::vector<double> mu(grid.n_a + 1);
    for (int j = 0; j <= grid.n_a; ++j) mu[j] = trapezoid(tables.mu_node.row(j), grid.dx);
    k.mu_cum = cumulative_trapezoid(mu, grid.da);
    return k;
}

ScalarRenewalKernel kernel_upper(const CoefficientTables& tables, const Grid& grid) {
    auto ex = spatial_extrema(tables);
    ScalarRenewalKernel k;
    k.da = grid.da;
    k.beta_cell = ex.beta_mid_over;
    k.mu_cum = cumulative_trapezoid(ex.mu_under, grid.da);
    return k;
}

ScalarRenewalKernel kernel_lower(const CoefficientTables& tables, const Grid& grid) {
    auto ex = spatial_extrema(tables);
    ScalarRenewalKernel k;
    k.da = grid.da;
    k.beta_cell = ex.beta_mid_under;
    k.mu_cum = cumulative_trapezoid(ex.mu_over, grid.da);
    return k;
}

LimitValues limit_values(const CoefficientTables& tables, const Grid& grid) {
    LimitValues v;
    v.alpha1 = characteristic_root(kernel_at_column(tables, grid, grid.n_x));
    v.alpha0 = characteristic_root(kernel_at_column(tables, grid, 0));
    // max over per-column roots; equivalent to placing the max inside the
    // unit-level-set condition because F is strictly decreasing in alpha
    bool found = false;
    for (int i = 0; i <= grid.n_x; ++i) {
        ScalarRenewalKernel k = kernel_at_column(tables, grid, i);
        double weight = 0.0;
        for (double b : k.beta_cell) weight += b;
        if (!(weight > 0.0)) continue;
        double root = characteristic_root(k);
        if (!found || root > v.alpha_max) {
            v.alpha_max = root;
            v.argmax_index = i;
            found = true;
        }
    }
    if (!found) throw std::runtime_error("limit_values: every spatial column has a vanishing birth kernel");
    v.alpha_bar = characteristic_root(kernel_space_averaged(tables, grid));
    return v;
}

GammaResult gamma_threshold(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth) {
    GammaResult r;
    r.gamma.resize(grid.n_x + 1);
    for (int i = 0; i <= grid.n_x; ++i)
        r.gamma[i] = birth.f_u0(grid.x(i)) * kernel_value(kernel_at_column(tables, grid, i), 0.0);
    r.downstream = r.gamma[grid.n_x] > 1.0;
    double peak = 0.0;
    for (double g : r.gamma) peak = std::max(peak, g);
    r.peak = peak > 1.0;

    // averaged condition: inner weight uses the spatially averaged death rate
    std::vector<double> mu_bar(grid.n_a + 1);
    for (int j = 0; j <= grid.n_a; ++j) mu_bar[j] = trapezoid(tables.mu_node.row(j), grid.dx);
    auto mu_bar_cum = cumulative_trapezoid(mu_bar, grid.da);
    std::vector<double> integrand(grid.n_x + 1);
    for (int i = 0; i <= grid.n_x; ++i) {
        ScalarRenewalKernel k;
        k.da = grid.da;
        k.beta_cell.resize(grid.n_a);
        for (int j = 0; j < grid.n_a; ++j) k.beta_cell[j] = tables.beta_mid(j, i);
        k.mu_cum = mu_bar_cum;
        integrand[i] = birth.f_u0(grid.x(i)) * kernel_value(k, 0.0);
    }
    r.average_value = trapezoid(integrand, grid.dx);
    r.average = r.average_value > 1.0;
    return r;
}

namespace {

// Positive root of v = f(x, v * K), which exists iff f_u(x,0) * K > 1.
// g(v) = v - f(x, vK) is negative near zero and nonnegative at L.
double positive_fixed_point(const BirthLaw& birth, double x, double K) {
    double lo = 1e-30 * std::max(1.0, birth.L);
    double hi = birth.L;
    if (lo - birth.f(x, lo * K) >= 0.0) return 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * birth.L; ++it) {
        double mid = 0.5 * (lo + hi);
        (mid - birth.f(x, mid * K) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

VStarResult v_star_profile(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth) {
    auto gam = gamma_threshold(tables, grid, birth);
    VStarResult r;
    r.v = Field2D(grid.n_a + 1, grid.n_x + 1);
    r.positive.assign(grid.n_x + 1, 0);
    for (int i = 0; i <= grid.n_x; ++i) {
        if (!(gam.gamma[i] > 1.0)) continue; // below threshold: column stays zero
        ScalarRenewalKernel k = kernel_at_column(tables, grid, i);
        double K = kernel_value(k, 0.0);
        double v0 = positive_fixed_point(birth, grid.x(i), K);
        if (v0 <= 0.0) continue;
        r.positive[i] = 1;
        for (int j = 0; j <= grid.n_a; ++j) r.v(j, i) = v0 * std::exp(-k.mu_cum[j]);
    }
    return r;
}

UStarResult u_star_profile(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth) {
    auto gam = gamma_threshold(tables, grid, birth);
    UStarResult r;
    r.u.assign(grid.n_a + 1, 0.0);
    if (!gam.average) return r;

    std::vector<double> mu_bar(grid.n_a + 1);
    for (int j = 0; j <= grid.n_a; ++j) mu_bar[j] = trapezoid(tables.mu_node.row(j), grid.dx);
    auto mu_bar_cum = cumulative_trapezoid(mu_bar, grid.da);

    std::vector<double> K(grid.n_x + 1);
    std::vector<double> w(grid.n_a + 1);
    for (int j = 0; j <= grid.n_a; ++j) w[j] = std::exp(-mu_bar_cum[j]);
    for (int i = 0; i <= grid.n_x; ++i) {
        std::vector<double> beta_cell(grid.n_a);
        for (int j = 0; j < grid.n_a; ++j) beta_cell[j] = tables.beta_mid(j, i);
        K[i] = birth_integral_scalar(beta_cell, w, grid.da);
    }

    auto birth_average = [&](double u0) {
        std::vector<double> vals(grid.n_x + 1);
        for (int i = 0; i <= grid.n_x; ++i) vals[i] = birth.f(grid.x(i), u0 * K[i]);
        return trapezoid(vals, grid.dx);
    };
    double lo = 1e-30 * std::max(1.0, birth.L);
    double hi = birth.L;
    if (lo - birth_average(lo) >= 0.0) return r;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * birth.L; ++it) {
        double mid = 0.5 * (lo + hi);
        (mid - birth_average(mid) < 0.0 ? lo : hi) = mid;
    }
    double u0 = 0.5 * (lo + hi);
    r.positive = true;
    for (int j = 0; j <= grid.n_a; ++j) r.u[j] = u0 * std::exp(-mu_bar_cum[j]);
    return r;
}

LimitSet compute_limit_set(const CoefficientTables& tables, const Grid& grid, const BirthLaw& birth) {
    LimitSet s;
    s.values = limit_values(tables, grid);
    s.gamma = gamma_threshold(tables, grid, birth);
    s.v_star = v_star_profile(tables, grid, birth);
    s.u_star = u_star_profile(tables, grid, birth);
    return s;
}

} // namespace ageflow
