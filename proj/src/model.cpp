#include "ageflow/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ageflow {

BirthLaw holling_birth(double tau, double scale) {
    if (tau <= 0.0 || scale <= 0.0) throw std::invalid_argument("holling_birth: tau and scale must be positive");
    BirthLaw b;
    b.f = [tau, scale](double, double u) { return scale * u / (1.0 + tau * u); };
    b.f_u0 = [scale](double) { return scale; };
    b.L = scale / tau;
    return b;
}

BirthLaw logistic_birth(double scale) {
    if (scale <= 0.0) throw std::invalid_argument("logistic_birth: scale must be positive");
    BirthLaw b;
    b.f = [scale](double, double u) { return scale * (1.0 - std::exp(-u)); };
    b.f_u0 = [scale](double) { return scale; };
    b.L = scale;
    return b;
}

BirthLaw weighted_birth(BirthLaw base, std::function<double(double)> weight, double weight_max) {
    if (weight_max <= 0.0) throw std::invalid_argument("weighted_birth: weight_max must be positive");
    BirthLaw b;
    b.f = [f = base.f, weight](double x, double u) { return weight(x) * f(x, u); };
    b.f_u0 = [g = base.f_u0, weight](double x) { return weight(x) * g(x); };
    b.L = weight_max * base.L;
    return b;
}

ProblemSpec make_preset(const std::string& name) {
    ProblemSpec s;
    s.q = [](double) { return 1.0; };
    s.birth = holling_birth();
    s.a_c = 1.0;
    s.a_plus = 1.0;
    s.beta = [](double a, double) { return a < 1.0 ? 3.0 : 0.0; };
    if (name == "P0") {
        s.mu = [](double, double) { return 1.0; };
    } else if (name == "P1") {
        s.mu = [](double, double x) { return 2.0 - x; };
    } else if (name == "peak") {
        s.mu = [](double, double x) { return 1.0 + 4.0 * (x - 0.5) * (x - 0.5); };
    } else if (name == "gamma_valley") {
        // Gamma(x) = 3(1 - e^{-mu})/mu crosses 1 at mu ~= 2.8214. The
        // subcritical plateau reaches |x - 0.5| ~= 0.427, leaving room for the
        // boundary leakage layer before the [0.25, 0.75] probe interval.
        s.mu = [](double, double x) {
            double t = std::max(0.0, std::abs(x - 0.5) - 0.42);
            return 2.9 - 12.0 * t;
        };
    } else if (name == "subcritical") {
        s.mu = [](double, double) { return 0.0; };
        s.beta = [](double a, double) { return a < 1.0 ? 0.9 : 0.0; };
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return s;
}

std::function<double(double, double)>
tabulated_coefficient(std::vector<double> values, int n_age_rows, int n_space_cols, double a_max) {
    if (n_age_rows < 2 || n_space_cols < 2) throw std::invalid_argument("tabulated_coefficient: need at least a 2x2 table");
    if (a_max <= 0.0) throw std::invalid_argument("tabulated_coefficient: a_max must be positive");
    if (values.size() != static_cast<std::size_t>(n_age_rows) * n_space_cols)
        throw std::invalid_argument("tabulated_coefficient: table size does not match row/col counts");
    return [values = std::move(values), n_age_rows, n_space_cols, a_max](double a, double x) {
        double sa = std::clamp(a / a_max, 0.0, 1.0) * (n_age_rows - 1);
        double sx = std::clamp(x, 0.0, 1.0) * (n_space_cols - 1);
        int ja = std::min(static_cast<int>(sa), n_age_rows - 2);
        int ix = std::min(static_cast<int>(sx), n_space_cols - 2);
        double ta = sa - ja, tx = sx - ix;
        auto v = [&](int j, int i) { return values[static_cast<std::size_t>(j) * n_space_cols + i]; };
        return (1 - ta) * ((1 - tx) * v(ja, ix) + tx * v(ja, ix + 1)) +
               ta * ((1 - tx) * v(ja + 1, ix) + tx * v(ja + 1, ix + 1));
    };
}

Grid build_grid(const ProblemSpec& spec, int n_a, int n_x) {
    if (n_a < 8 || n_x < 8) throw std::invalid_argument("build_grid: need n_a >= 8 and n_x >= 8");
    if (spec.a_plus <= 0.0) throw std::invalid_argument("build_grid: a_plus must be positive");
    if (spec.a_c <= 0.0 || spec.a_c > spec.a_plus) throw std::invalid_argument("build_grid: need 0 < a_c <= a_plus");

    double ratio = spec.a_c / spec.a_plus;
    if (n_a * ratio < 0.5)
        throw std::invalid_argument("build_grid: n_a is too coarse to resolve the fertility cutoff");
    int jc = std::max(1, static_cast<int>(std::lround(n_a * ratio)));
    int n_a_adj = std::max(jc, static_cast<int>(std::lround(jc / ratio)));
    // Snap only when the adjustment keeps da within 1% of the requested step.
    double da_req = spec.a_plus / n_a;
    double da_adj = spec.a_plus / n_a_adj;
    if (std::abs(da_adj - da_req) <= 0.01 * da_req) n_a = n_a_adj;
    else jc = std::clamp(static_cast<int>(std::lround(n_a * ratio)), 1, n_a);

    Grid g;
    g.n_a = n_a;
    g.n_x = n_x;
    g.da = spec.a_plus / n_a;
    g.dx = 1.0 / n_x;
    g.a_plus = spec.a_plus;
    g.ac_index = jc;
    g.age_nodes.resize(n_a + 1);
    for (int j = 0; j <= n_a; ++j) g.age_nodes[j] = j * g.da;
    g.space_nodes.resize(n_x + 1);
    for (int i = 0; i <= n_x; ++i) g.space_nodes[i] = i * g.dx;
    return g;
}

CoefficientTables sample_coefficients(const ProblemSpec& spec, const Grid& grid) {
    CoefficientTables t;
    t.mu_node = Field2D(grid.n_a + 1, grid.n_x + 1);
    t.beta_node = Field2D(grid.n_a + 1, grid.n_x + 1);
    t.mu_mid = Field2D(grid.n_a, grid.n_x + 1);
    t.beta_mid = Field2D(grid.n_a, grid.n_x + 1);
    t.q_node.resize(grid.n_x + 1);

    auto check = [](double v, const char* name, double a, double x) {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << name << " evaluated to a non-finite value at (a=" << a << ", x=" << x << ")";
            throw std::runtime_error(os.str());
        }
        if (v < 0.0) {
            std::ostringstream os;
            os << name << " is negative (" << v << ") at (a=" << a << ", x=" << x << ")";
            throw std::runtime_error(os.str());
        }
        return v;
    };

    double a_c = grid.ac_index * grid.da;
    for (int j = 0; j <= grid.n_a; ++j) {
        double a = grid.age(j);
        for (int i = 0; i <= grid.n_x; ++i) {
            double x = grid.x(i);
            t.mu_node(j, i) = check(spec.mu(a, x), "mu", a, x);
            t.beta_node(j, i) = j >= grid.ac_index ? 0.0 : check(spec.beta(a, x), "beta", a, x);
        }
    }
    for (int j = 0; j < grid.n_a; ++j) {
        double a = grid.age_mid(j);
        for (int i = 0; i <= grid.n_x; ++i) {
            double x = grid.x(i);
            t.mu_mid(j, i) = check(spec.mu(a, x), "mu", a, x);
            t.beta_mid(j, i) = a >= a_c ? 0.0 : check(spec.beta(a, x), "beta", a, x);
        }
    }
    for (int i = 0; i <= grid.n_x; ++i) {
        double v = spec.q(grid.x(i));
        if (!std::isfinite(v)) throw std::runtime_error("q evaluated to a non-finite value");
        t.q_node[i] = v;
    }
    return t;
}

SpatialExtrema spatial_extrema(const CoefficientTables& tables) {
    SpatialExtrema e;
    auto row_minmax = [](const Field2D& f, int j) {
        double lo = f(j, 0), hi = f(j, 0);
        for (int i = 1; i < f.cols(); ++i) {
            lo = std::min(lo, f(j, i));
            hi = std::max(hi, f(j, i));
        }
        return std::pair{lo, hi};
    };
    int n_nodes = tables.mu_node.rows();
    e.mu_under.resize(n_nodes);
    e.mu_over.resize(n_nodes);
    e.beta_under.resize(n_nodes);
    e.beta_over.resize(n_nodes);
    for (int j = 0; j < n_nodes; ++j) {
        auto [ml, mh] = row_minmax(tables.mu_node, j);
        e.mu_under[j] = ml;
        e.mu_over[j] = mh;
        auto [bl, bh] = row_minmax(tables.beta_node, j);
        e.beta_under[j] = bl;
        e.beta_over[j] = bh;
    }
    int n_cells = tables.beta_mid.rows();
    e.beta_mid_under.resize(n_cells);
    e.beta_mid_over.resize(n_cells);
    for (int j = 0; j < n_cells; ++j) {
        auto [bl, bh] = row_minmax(tables.beta_mid, j);
        e.beta_mid_under[j] = bl;
        e.beta_mid_over[j] = bh;
    }
    return e;
}

AssumptionReport validate_assumptions(const ProblemSpec& spec, const Grid& grid) {
    AssumptionReport rep;
    auto add = [&rep](std::string name, bool pass, std::string detail = "") {
        rep.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    CoefficientTables tables;
    try {
        tables = sample_coefficients(spec, grid);
    } catch (const std::exception& e) {
        add("coefficients finite and nonnegative", false, e.what());
        return rep;
    }
    add("coefficients finite and nonnegative", true);

    // beta vanishes at and beyond the true fertility cutoff
    bool cutoff_ok = true;
    for (int j = grid.ac_index; j <= grid.n_a && cutoff_ok; ++j)
        for (int i = 0; i <= grid.n_x; ++i)
            if (tables.beta_node(j, i) != 0.0) {
                cutoff_ok = false;
                break;
            }
    for (int i = 0; i <= grid.n_x && cutoff_ok; ++i) {
        double x = grid.x(i);
        for (double a : {spec.a_c + 1e-9, 0.5 * (spec.a_c + spec.a_plus), spec.a_plus})
            if (a >= spec.a_c && spec.beta(a, x) != 0.0) {
                cutoff_ok = false;
                break;
            }
    }
    add("beta cutoff at a_c", cutoff_ok);

    // tail integral of underline-beta stays positive on [0, a_c)
    auto ex = spatial_extrema(tables);
    bool tail_ok = true;
    double tail = 0.0;
    for (int j = grid.ac_index - 1; j >= 0; --j) {
        tail += grid.da * ex.beta_mid_under[j];
        if (tail <= 0.0) {
            tail_ok = false;
            break;
        }
    }
    add("integral of underline-beta positive up to a_c", tail_ok);

    bool q_ok = true;
    for (double v : tables.q_node)
        if (!(v > 0.0)) {
            q_ok = false;
            break;
        }
    add("q positivity", q_ok);

    // birth law on a 64x64 lattice of (x, u), u in (0, 4 max(1, L)]
    const int n = 64;
    double u_hi = 4.0 * std::max(1.0, spec.birth.L);
    bool zero_ok = true, mono_ok = true, sub_ok = true, bound_ok = true, fin_ok = true;
    for (int ix = 0; ix < n; ++ix) {
        double x = ix / double(n - 1);
        if (std::abs(spec.birth.f(x, 0.0)) > 1e-12) zero_ok = false;
        double prev_f = 0.0, prev_ratio = std::numeric_limits<double>::infinity();
        for (int iu = 1; iu <= n; ++iu) {
            double u = u_hi * iu / n;
            double fv = spec.birth.f(x, u);
            if (!std::isfinite(fv)) fin_ok = false;
            if (fv <= prev_f - 1e-12) mono_ok = false;
            double ratio = fv / u;
            if (ratio > prev_ratio + 1e-12) sub_ok = false;
            if (fv > spec.birth.L + 1e-12) bound_ok = false;
            prev_f = fv;
            prev_ratio = ratio;
        }
    }
    add("f(x,0) = 0", zero_ok && fin_ok);
    add("f increasing in u", mono_ok);
    add("f(x,u)/u non-increasing", sub_ok);
    add("f bounded by L", bound_ok);
    return rep;
}

} // namespace ageflow
