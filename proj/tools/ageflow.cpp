// Command-line front end: eigen | limits | sweep | equilibrium | simulate | verify.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "ageflow/config.hpp"
#include "ageflow/dynamics.hpp"
#include "ageflow/io.hpp"
#include "ageflow/limits.hpp"
#include "ageflow/parallel.hpp"
#include "ageflow/quadrature.hpp"
#include "ageflow/spectral.hpp"
#include "ageflow/verify.hpp"

namespace {

struct CliState {
    std::string config_path;
    std::string out_dir;
    std::string grid_spec;
    std::string preset;
    int jobs = -1;
    double d = std::numeric_limits<double>::quiet_NaN();
    double lambda_adv = std::numeric_limits<double>::quiet_NaN();
};

void add_common(CLI::App* cmd, CliState& st) {
    cmd->add_option("--config", st.config_path, "run configuration file (key = value)");
    cmd->add_option("--out", st.out_dir, "output directory");
    cmd->add_option("--grid", st.grid_spec, "grid as <n_a>x<n_x>, e.g. 200x100");
    cmd->add_option("--jobs", st.jobs, "worker threads for sweeps (0 = all cores)");
    cmd->add_option("--preset", st.preset, "problem preset name");
    cmd->add_option("--d", st.d, "diffusion rate");
    cmd->add_option("--lambda", st.lambda_adv, "advection rate");
}

ageflow::RunConfig resolve(const CliState& st) {
    ageflow::RunConfig cfg;
    if (!st.config_path.empty()) cfg = ageflow::parse_config_file(st.config_path);
    ageflow::apply_env_overrides(cfg);
    if (!st.preset.empty()) cfg.preset = st.preset;
    if (!st.out_dir.empty()) cfg.out_dir = st.out_dir;
    if (st.jobs >= 0) cfg.jobs = st.jobs;
    if (!std::isnan(st.d)) cfg.d = st.d;
    if (!std::isnan(st.lambda_adv)) cfg.lambda_adv = st.lambda_adv;
    if (!st.grid_spec.empty()) {
        auto x = st.grid_spec.find('x');
        if (x == std::string::npos) throw std::runtime_error("--grid expects <n_a>x<n_x>");
        cfg.n_a = std::stoi(st.grid_spec.substr(0, x));
        cfg.n_x = std::stoi(st.grid_spec.substr(x + 1));
    }
    std::filesystem::create_directories(cfg.out_dir);
    return cfg;
}

struct Resolved {
    ageflow::RunConfig cfg;
    ageflow::ProblemSpec spec;
    ageflow::Grid grid;
    ageflow::CoefficientTables tables;
};

Resolved materialize(const CliState& st) {
    Resolved r;
    r.cfg = resolve(st);
    r.spec = ageflow::spec_from_config(r.cfg);
    r.grid = ageflow::build_grid(r.spec, r.cfg.n_a, r.cfg.n_x);
    r.tables = ageflow::sample_coefficients(r.spec, r.grid);
    if (ageflow::gauge_overflow_risk(r.spec.d, r.spec.lambda_adv, r.grid.dx))
        std::cerr << "warning: |Lambda/d| dx = "
                  << std::abs(r.spec.lambda_adv / r.spec.d) * r.grid.dx
                  << " > 30; gauge factors are overflow-prone at this resolution\n";
    return r;
}

ageflow::SpectralOptions spectral_options(const ageflow::RunConfig& cfg) {
    ageflow::SpectralOptions o;
    o.tol_r = cfg.tol_r;
    o.tol_lambda = cfg.tol_lambda;
    o.max_power_iters = cfg.max_power_iters;
    o.scheme = cfg.scheme == "backward_euler" ? ageflow::AgeScheme::backward_euler
                                              : ageflow::AgeScheme::crank_nicolson;
    return o;
}

ageflow::DynamicsOptions dynamics_options(const ageflow::RunConfig& cfg) {
    ageflow::DynamicsOptions o;
    o.t_max = cfg.t_max;
    o.tol_steady = cfg.tol_steady;
    o.scheme = cfg.scheme == "backward_euler" ? ageflow::AgeScheme::backward_euler
                                              : ageflow::AgeScheme::crank_nicolson;
    return o;
}

int run_eigen(const CliState& st, const std::string& field_path) {
    auto r = materialize(st);
    auto result = ageflow::principal_eigenvalue(r.tables, r.grid, r.spec.d, r.spec.lambda_adv,
                                                spectral_options(r.cfg));
    ageflow::write_json_file(r.cfg.out_dir + "/eigen.json", ageflow::eigen_to_json(result));
    if (!field_path.empty()) ageflow::write_field_csv(field_path, result.eigenfunction, r.grid);
    std::cout << "lambda0 = " << ageflow::format_g17(result.lambda0) << "\n";
    return 0;
}

int run_limits(const CliState& st) {
    auto r = materialize(st);
    auto set = ageflow::compute_limit_set(r.tables, r.grid, r.spec.birth);
    ageflow::write_json_file(r.cfg.out_dir + "/limits.json", ageflow::limit_set_to_json(set));
    std::cout << "alpha1 = " << set.values.alpha1 << ", alpha0 = " << set.values.alpha0
              << ", alpha_max = " << set.values.alpha_max << ", alpha_bar = " << set.values.alpha_bar
              << "\n";
    return 0;
}

int run_sweep(const CliState& st) {
    auto r = materialize(st);
    if (r.cfg.sweep_values.empty()) throw std::runtime_error("sweep: sweep_values is empty");
    const bool over_lambda = r.cfg.sweep_param == "lambda";
    auto lims = ageflow::limit_values(r.tables, r.grid);
    auto limit_for = [&](double value) {
        if (r.cfg.sweep_limit == "alpha1") return lims.alpha1;
        if (r.cfg.sweep_limit == "alpha0") return lims.alpha0;
        if (r.cfg.sweep_limit == "alpha_max") return lims.alpha_max;
        if (r.cfg.sweep_limit == "alpha_bar") return lims.alpha_bar;
        // auto: the asymptote the swept parameter is heading toward
        if (over_lambda) return value >= 0 ? lims.alpha1 : lims.alpha0;
        if (r.spec.lambda_adv > 0) return lims.alpha1;
        if (r.spec.lambda_adv < 0) return lims.alpha0;
        return lims.alpha_max;
    };

    const auto& vals = r.cfg.sweep_values;
    std::vector<std::vector<double>> rows(vals.size());
    ageflow::parallel_for(static_cast<int>(vals.size()), r.cfg.jobs, [&](int k) {
        double d = over_lambda ? r.spec.d : vals[k];
        double lam = over_lambda ? vals[k] : r.spec.lambda_adv;
        auto res = ageflow::principal_eigenvalue(r.tables, r.grid, d, lam, spectral_options(r.cfg));
        rows[k] = {vals[k], res.lambda0, res.bracket_lo, res.bracket_hi, res.r_residual, limit_for(vals[k])};
    });
    ageflow::write_csv(r.cfg.out_dir + "/sweep.csv",
                       {"parameter", "lambda0", "bracket_lo", "bracket_hi", "r_residual", "limit_value"},
                       rows);
    std::cout << "sweep over " << vals.size() << " values of " << r.cfg.sweep_param << " written to "
              << r.cfg.out_dir << "/sweep.csv\n";
    return 0;
}

int run_equilibrium(const CliState& st) {
    auto r = materialize(st);
    auto eq = ageflow::equilibrium(r.tables, r.grid, r.spec.birth, r.spec.d, r.spec.lambda_adv,
                                   dynamics_options(r.cfg));
    ageflow::write_field_csv(r.cfg.out_dir + "/equilibrium.csv", eq.u, r.grid);
    std::vector<std::vector<double>> mass_rows(r.grid.n_a + 1);
    for (int j = 0; j <= r.grid.n_a; ++j)
        mass_rows[j] = {r.grid.age(j), ageflow::trapezoid(eq.u.row(j), r.grid.dx)};
    ageflow::write_csv(r.cfg.out_dir + "/equilibrium_mass.csv", {"a", "mass"}, mass_rows);
    ageflow::write_json_file(r.cfg.out_dir + "/equilibrium.json", ageflow::equilibrium_to_json(eq));
    std::cout << (eq.classification == ageflow::Classification::positive ? "positive" : "extinct")
              << " equilibrium, residual " << eq.residual << ", t = " << eq.t_reached << "\n";
    return eq.converged ? 0 : 2;
}

int run_simulate(const CliState& st) {
    auto r = materialize(st);
    if (r.cfg.snapshot_times.empty()) throw std::runtime_error("simulate: snapshot_times is empty");
    auto opts = dynamics_options(r.cfg);
    auto plan = ageflow::make_plan(r.tables, r.grid, r.spec.d, r.spec.lambda_adv, ageflow::Gauge::flux,
                                   opts.scheme);
    ageflow::PopulationState state;
    state.u = ageflow::Field2D(r.grid.n_a + 1, r.grid.n_x + 1, r.cfg.seed_level);
    state.time = 0.0;

    std::vector<double> times = r.cfg.snapshot_times;
    std::sort(times.begin(), times.end());
    std::vector<std::vector<double>> rows;
    std::size_t next = 0;
    auto snap = [&](const ageflow::PopulationState& s) {
        for (int j = 0; j <= r.grid.n_a; ++j)
            for (int i = 0; i <= r.grid.n_x; ++i)
                rows.push_back({s.time, r.grid.age(j), r.grid.x(i), s.u(j, i)});
    };
    if (next < times.size() && times[next] <= 0.0) {
        snap(state);
        ++next;
    }
    long n_steps = std::lround(std::ceil(times.back() / r.grid.da));
    for (long step = 0; step < n_steps && next < times.size(); ++step) {
        state = ageflow::advance(state, r.grid.da, r.tables, r.grid, r.spec.birth, r.spec.d,
                                 r.spec.lambda_adv, &plan);
        while (next < times.size() && state.time + 0.5 * r.grid.da >= times[next]) {
            snap(state);
            ++next;
        }
    }
    ageflow::write_csv(r.cfg.out_dir + "/simulate.csv", {"t", "a", "x", "value"}, rows);
    std::cout << "wrote " << rows.size() << " rows to " << r.cfg.out_dir << "/simulate.csv\n";
    return 0;
}

int run_verify(const CliState& st, bool all) {
    ageflow::RunConfig cfg;
    if (!st.config_path.empty()) cfg = ageflow::parse_config_file(st.config_path);
    ageflow::apply_env_overrides(cfg);
    if (!st.preset.empty()) cfg.preset = st.preset;
    if (!st.out_dir.empty()) cfg.out_dir = st.out_dir;
    std::filesystem::create_directories(cfg.out_dir);
    int jobs = st.jobs >= 0 ? st.jobs : cfg.jobs;
    auto results = ageflow::run_acceptance(all ? "all" : cfg.preset, jobs);
    if (results.empty()) {
        std::cerr << "verify: no criteria exercise preset '" << cfg.preset << "'\n";
        return 2;
    }
    int failed = ageflow::print_acceptance(std::cout, results);

    ageflow::json report;
    report["schema_version"] = ageflow::kSchemaVersion;
    report["preset"] = all ? "all" : cfg.preset;
    report["checks"] = ageflow::json::array();
    for (const auto& r : results)
        report["checks"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    report["all_pass"] = failed == 0;
    ageflow::write_json_file(cfg.out_dir + "/verify.json", report);

    std::cout << (failed == 0 ? "all checks passed" : "FAILURES: " + std::to_string(failed)) << "\n";
    return failed == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"age-structured diffusion-advection eigenvalue and equilibrium toolkit"};
    app.require_subcommand(1);

    CliState st;
    std::string field_path;
    bool verify_all = false;

    auto* eigen = app.add_subcommand("eigen", "principal eigenvalue of the Neumann-gauge problem");
    add_common(eigen, st);
    eigen->add_option("--field", field_path, "also write the eigenfunction as CSV to this path");

    auto* limits = app.add_subcommand("limits", "scalar characteristic limits and profiles");
    add_common(limits, st);

    auto* sweep = app.add_subcommand("sweep", "eigenvalue sweep over Lambda or d");
    add_common(sweep, st);

    auto* equilibrium = app.add_subcommand("equilibrium", "march the nonlinear model to steady state");
    add_common(equilibrium, st);

    auto* simulate = app.add_subcommand("simulate", "time-march and dump trajectory snapshots");
    add_common(simulate, st);

    auto* verify = app.add_subcommand("verify", "run the verification suite for the configured preset");
    add_common(verify, st);
    verify->add_flag("--all", verify_all, "run every criterion regardless of preset");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eigen->parsed()) return run_eigen(st, field_path);
        if (limits->parsed()) return run_limits(st);
        if (sweep->parsed()) return run_sweep(st);
        if (equilibrium->parsed()) return run_equilibrium(st);
        if (simulate->parsed()) return run_simulate(st);
        if (verify->parsed()) return run_verify(st, verify_all);
    } catch (const ageflow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
