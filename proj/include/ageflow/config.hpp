#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ageflow/model.hpp"

namespace ageflow {

/// Raised for malformed or inconsistent run configurations; messages carry
/// file:line positions where available.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key = value run configuration (see README for the schema).
struct RunConfig {
    std::string preset = "P0"; // preset name, or "custom" with inline tables
    std::string birth = "holling2";
    double birth_tau = 1.0;
    double birth_scale = 1.0;
    double birth_weight_a = 1.0; // f -> (a + b x) f
    double birth_weight_b = 0.0;

    double d = 1.0;
    double lambda_adv = 0.0;
    int n_a = 200;
    int n_x = 100;
    double a_plus_factor = 1.0; // a_plus = factor * a_c

    double tol_r = 1e-10;
    double tol_lambda = 1e-8;
    int max_power_iters = 2000;
    std::string scheme = "crank_nicolson";

    double t_max = 200.0;
    double tol_steady = 1e-8;
    double seed_level = 0.1;

    std::string sweep_param = "lambda"; // "lambda" | "d"
    std::vector<double> sweep_values;
    std::string sweep_limit = "auto"; // auto | alpha1 | alpha0 | alpha_max | alpha_bar
    std::vector<double> snapshot_times;

    int jobs = 0; // 0 = all hardware threads
    std::string out_dir = ".";

    // inline tables for preset = "custom"
    double a_c = 1.0;
    int mu_rows = 0, mu_cols = 0;
    std::vector<double> mu_table;
    int beta_rows = 0, beta_cols = 0;
    std::vector<double> beta_table;
    std::vector<double> q_table;
};

/// Parses the key = value file; errors carry file:line positions.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// Applies AGEFLOW_<UPPERCASE_KEY> environment overrides.
void apply_env_overrides(RunConfig& cfg);

/// Materializes the problem the configuration describes.
ProblemSpec spec_from_config(const RunConfig& cfg);

} // namespace ageflow
