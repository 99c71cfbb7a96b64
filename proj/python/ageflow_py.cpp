#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ageflow/dynamics.hpp"
#include "ageflow/limits.hpp"
#include "ageflow/model.hpp"
#include "ageflow/spectral.hpp"

namespace py = pybind11;
using namespace ageflow;

namespace {

std::vector<std::vector<double>> field_to_rows(const Field2D& f) {
    std::vector<std::vector<double>> rows(f.rows());
    for (int j = 0; j < f.rows(); ++j) rows[j].assign(f.row(j).begin(), f.row(j).end());
    return rows;
}

/// One problem instance: preset + grid + sampled tables, ready to solve.
struct Problem {
    ProblemSpec spec;
    Grid grid;
    CoefficientTables tables;

    Problem(const std::string& preset, int n_a, int n_x, double d, double lambda_adv,
            const std::string& birth, double birth_tau, double birth_scale, double a_plus_factor) {
        spec = make_preset(preset);
        spec.d = d;
        spec.lambda_adv = lambda_adv;
        spec.a_plus = a_plus_factor * spec.a_c;
        spec.birth = birth == "logistic" ? logistic_birth(birth_scale) : holling_birth(birth_tau, birth_scale);
        grid = build_grid(spec, n_a, n_x);
        tables = sample_coefficients(spec, grid);
    }

    py::dict grid_info() const {
        py::dict g;
        g["n_a"] = grid.n_a;
        g["n_x"] = grid.n_x;
        g["da"] = grid.da;
        g["dx"] = grid.dx;
        g["a_plus"] = grid.a_plus;
        g["ac_index"] = grid.ac_index;
        return g;
    }

    py::dict eigen(bool with_eigenfunction) const {
        auto r = principal_eigenvalue(tables, grid, spec.d, spec.lambda_adv);
        py::dict out;
        out["lambda0"] = r.lambda0;
        out["r_residual"] = r.r_residual;
        out["pde_residual"] = r.pde_residual;
        out["bracket"] = py::make_tuple(r.bracket_lo, r.bracket_hi);
        if (with_eigenfunction) out["eigenfunction"] = field_to_rows(r.eigenfunction);
        return out;
    }

    py::dict flux_eigen() const {
        auto r = flux_gauge_eigenvalue(tables, grid, spec.birth, spec.d, spec.lambda_adv);
        py::dict out;
        out["lambda0"] = r.lambda0;
        out["r_residual"] = r.r_residual;
        return out;
    }

    double radius(double lambda) const {
        return spectral_radius(lambda, tables, grid, spec.d, spec.lambda_adv).r;
    }

    py::dict limits() const {
        auto v = limit_values(tables, grid);
        py::dict out;
        out["alpha1"] = v.alpha1;
        out["alpha0"] = v.alpha0;
        out["alpha_max"] = v.alpha_max;
        out["alpha_bar"] = v.alpha_bar;
        out["argmax_x"] = grid.x(v.argmax_index);
        return out;
    }

    py::dict gamma() const {
        auto g = gamma_threshold(tables, grid, spec.birth);
        py::dict out;
        out["gamma"] = g.gamma;
        out["downstream"] = g.downstream;
        out["peak"] = g.peak;
        out["average"] = g.average;
        out["average_value"] = g.average_value;
        return out;
    }

    py::dict v_star() const {
        auto v = v_star_profile(tables, grid, spec.birth);
        py::dict out;
        out["v"] = field_to_rows(v.v);
        out["positive"] = std::vector<int>(v.positive.begin(), v.positive.end());
        return out;
    }

    py::dict u_star() const {
        auto u = u_star_profile(tables, grid, spec.birth);
        py::dict out;
        out["u"] = u.u;
        out["positive"] = u.positive;
        return out;
    }

    py::dict run_equilibrium(double t_max, bool with_field) const {
        DynamicsOptions opts;
        opts.t_max = t_max;
        auto eq = equilibrium(tables, grid, spec.birth, spec.d, spec.lambda_adv, opts);
        py::dict out;
        out["classification"] = eq.classification == Classification::positive ? "positive" : "extinct";
        out["residual"] = eq.residual;
        out["converged"] = eq.converged;
        out["t_reached"] = eq.t_reached;
        out["sup"] = eq.u.max_abs();
        if (with_field) out["field"] = field_to_rows(eq.u);
        return out;
    }

    std::vector<py::dict> validate() const {
        auto rep = validate_assumptions(spec, grid);
        std::vector<py::dict> out;
        for (const auto& c : rep.checks) {
            py::dict d;
            d["name"] = c.name;
            d["pass"] = c.pass;
            d["detail"] = c.detail;
            out.push_back(std::move(d));
        }
        return out;
    }
};

} // namespace

PYBIND11_MODULE(_ageflow, m) {
    m.doc() = "age-structured diffusion-advection eigenvalue and equilibrium toolkit";

    py::class_<Problem>(m, "Problem")
        .def(py::init<const std::string&, int, int, double, double, const std::string&, double, double, double>(),
             py::arg("preset"), py::arg("n_a") = 200, py::arg("n_x") = 100, py::arg("d") = 1.0,
             py::arg("lambda_adv") = 0.0, py::arg("birth") = "holling2", py::arg("birth_tau") = 1.0,
             py::arg("birth_scale") = 1.0, py::arg("a_plus_factor") = 1.0)
        .def_property_readonly("grid", &Problem::grid_info)
        .def("principal_eigenvalue", &Problem::eigen, py::arg("with_eigenfunction") = false)
        .def("flux_eigenvalue", &Problem::flux_eigen)
        .def("spectral_radius", &Problem::radius, py::arg("lam"))
        .def("limit_values", &Problem::limits)
        .def("gamma_threshold", &Problem::gamma)
        .def("v_star", &Problem::v_star)
        .def("u_star", &Problem::u_star)
        .def("equilibrium", &Problem::run_equilibrium, py::arg("t_max") = 200.0,
             py::arg("with_field") = false)
        .def("validate_assumptions", &Problem::validate);

    m.def("characteristic_root",
          [](std::vector<double> beta_cell, std::vector<double> mu_cum, double da) {
              ScalarRenewalKernel k;
              k.beta_cell = std::move(beta_cell);
              k.mu_cum = std::move(mu_cum);
              k.da = da;
              return characteristic_root(k);
          },
          py::arg("beta_cell"), py::arg("mu_cum"), py::arg("da"),
          "Unique root of the scalar renewal equation for a tabulated kernel");

    m.attr("__version__") = "0.1.0";
}
