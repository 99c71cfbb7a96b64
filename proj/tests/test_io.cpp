#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ageflow/config.hpp"
#include "ageflow/io.hpp"
#include "ageflow/spectral.hpp"

using namespace ageflow;

TEST_CASE("config parsing") {
    const char* text = R"(
# sample configuration
preset = "P1"
d = 0.5
lambda = -2.5
n_a = 64
n_x = 32
sweep_param = d
sweep_values = [0.1, 0.2, 0.4]
birth = holling2
birth_tau = 2.0
out_dir = "/tmp/ageflow-test"
)";
    auto cfg = parse_config_text(text);
    CHECK(cfg.preset == "P1");
    CHECK(cfg.d == 0.5);
    CHECK(cfg.lambda_adv == -2.5);
    CHECK(cfg.n_a == 64);
    CHECK(cfg.sweep_values.size() == 3);
    CHECK(cfg.sweep_values[2] == 0.4);
    CHECK(cfg.birth_tau == 2.0);

    auto spec = spec_from_config(cfg);
    CHECK(spec.d == 0.5);
    CHECK(spec.mu(0.0, 0.0) == 2.0);
    CHECK(spec.birth.L == doctest::Approx(0.5));
}

TEST_CASE("config errors carry line numbers") {
    try {
        parse_config_text("d = 1.0\nwhat = 3\n", "demo.cfg");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("demo.cfg:2") != std::string::npos);
    }
    try {
        parse_config_text("d = banana\n", "demo.cfg");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("demo.cfg:1") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("n_a = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("tol_r = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("scheme = theta\n"), ConfigError);
}

TEST_CASE("environment overrides") {
    auto cfg = parse_config_text("d = 1.0\n");
    setenv("AGEFLOW_D", "2.5", 1);
    setenv("AGEFLOW_N_X", "48", 1);
    apply_env_overrides(cfg);
    unsetenv("AGEFLOW_D");
    unsetenv("AGEFLOW_N_X");
    CHECK(cfg.d == 2.5);
    CHECK(cfg.n_x == 48);
}

TEST_CASE("custom tabulated problem from config") {
    std::string text = R"(
preset = custom
a_c = 1.0
mu_rows = 2
mu_cols = 2
mu_table = [1.0, 2.0, 1.0, 2.0]
beta_rows = 2
beta_cols = 2
beta_table = [3.0, 3.0, 0.0, 0.0]
n_a = 32
n_x = 16
)";
    auto cfg = parse_config_text(text);
    auto spec = spec_from_config(cfg);
    CHECK(spec.mu(0.0, 0.0) == doctest::Approx(1.0));
    CHECK(spec.mu(0.5, 1.0) == doctest::Approx(2.0));
    CHECK(spec.q(0.3) == 1.0);
    auto grid = build_grid(spec, cfg.n_a, cfg.n_x);
    auto tables = sample_coefficients(spec, grid);
    CHECK(tables.beta_node(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("g17 formatting round-trips") {
    for (double v : {1.0 / 3.0, 2.718281828459045, 1e-300, -4.9406564584124654e-324, 12345.678901234567}) {
        double back = std::strtod(format_g17(v).c_str(), nullptr);
        CHECK(back == v);
    }
}

TEST_CASE("json payload shapes") {
    EigenResult r;
    r.lambda0 = 1.5;
    r.bracket_lo = 1.0;
    r.bracket_hi = 2.0;
    auto j = eigen_to_json(r);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j.contains("lambda0"));
    CHECK(j.contains("r_residual"));
    CHECK(j.contains("pde_residual"));
    CHECK(j.contains("bracket"));
    CHECK(j.contains("iterations"));
    CHECK(j["bracket"][0] == 1.0);
}

TEST_CASE("csv emission") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "ageflow_io_test";
    fs::create_directories(dir);
    auto path = (dir / "table.csv").string();
    write_csv(path, {"a", "b"}, {{1.0, 2.0}, {0.1, 1.0 / 3.0}});
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "a,b");
    std::getline(in, line);
    CHECK(line == "1,2");
    std::getline(in, line);
    CHECK(line.find("0.1") == 0);
    CHECK(line.find("0.33333333333333331") != std::string::npos);
    CHECK_THROWS(write_csv("/nonexistent-dir/x.csv", {"a"}, {}));
    fs::remove_all(dir);
}

TEST_CASE("identical configuration gives identical artifacts") {
    auto spec = make_preset("P0");
    auto grid = build_grid(spec, 48, 16);
    auto tables = sample_coefficients(spec, grid);
    auto a = principal_eigenvalue(tables, grid, 1.0, 0.5);
    auto b = principal_eigenvalue(tables, grid, 1.0, 0.5);
    CHECK(eigen_to_json(a).dump() == eigen_to_json(b).dump());
}
