#include "ageflow/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace ageflow {

namespace {

struct Value {
    std::string raw;
    int line = 0;
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << msg;
    throw ConfigError(os.str());
}

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c); };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

double parse_number(const std::string& origin, int line, const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) fail(origin, line, "trailing characters after number '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(origin, line, "expected a number, got '" + s + "'");
    } catch (const std::out_of_range&) {
        fail(origin, line, "number out of range: '" + s + "'");
    }
}

std::vector<double> parse_array(const std::string& origin, int line, const std::string& s) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        fail(origin, line, "expected an array like [1, 2, 3]");
    std::vector<double> out;
    std::string inner = s.substr(1, s.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number(origin, line, item));
    }
    return out;
}

std::string parse_string(const std::string& origin, int line, const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    for (char c : s)
        if (std::isspace(static_cast<unsigned char>(c)))
            fail(origin, line, "unquoted string values may not contain spaces: '" + s + "'");
    return s;
}

using Setter = std::function<void(RunConfig&, const std::string& origin, int line, const std::string& raw)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> m;
        auto num = [&m](const std::string& key, double RunConfig::* field) {
            m[key] = [field](RunConfig& c, const std::string& o, int l, const std::string& r) {
                c.*field = parse_number(o, l, r);
            };
        };
        auto integer = [&m](const std::string& key, int RunConfig::* field) {
            m[key] = [field](RunConfig& c, const std::string& o, int l, const std::string& r) {
                double v = parse_number(o, l, r);
                c.*field = static_cast<int>(v);
            };
        };
        auto str = [&m](const std::string& key, std::string RunConfig::* field) {
            m[key] = [field](RunConfig& c, const std::string& o, int l, const std::string& r) {
                c.*field = parse_string(o, l, r);
            };
        };
        auto arr = [&m](const std::string& key, std::vector<double> RunConfig::* field) {
            m[key] = [field](RunConfig& c, const std::string& o, int l, const std::string& r) {
                c.*field = parse_array(o, l, r);
            };
        };
        str("preset", &RunConfig::preset);
        str("birth", &RunConfig::birth);
        num("birth_tau", &RunConfig::birth_tau);
        num("birth_scale", &RunConfig::birth_scale);
        num("birth_weight_a", &RunConfig::birth_weight_a);
        num("birth_weight_b", &RunConfig::birth_weight_b);
        num("d", &RunConfig::d);
        num("lambda", &RunConfig::lambda_adv);
        integer("n_a", &RunConfig::n_a);
        integer("n_x", &RunConfig::n_x);
        num("a_plus_factor", &RunConfig::a_plus_factor);
        num("tol_r", &RunConfig::tol_r);
        num("tol_lambda", &RunConfig::tol_lambda);
        integer("max_power_iters", &RunConfig::max_power_iters);
        str("scheme", &RunConfig::scheme);
        num("t_max", &RunConfig::t_max);
        num("tol_steady", &RunConfig::tol_steady);
        num("seed_level", &RunConfig::seed_level);
        str("sweep_param", &RunConfig::sweep_param);
        arr("sweep_values", &RunConfig::sweep_values);
        str("sweep_limit", &RunConfig::sweep_limit);
        arr("snapshot_times", &RunConfig::snapshot_times);
        integer("jobs", &RunConfig::jobs);
        str("out_dir", &RunConfig::out_dir);
        num("a_c", &RunConfig::a_c);
        integer("mu_rows", &RunConfig::mu_rows);
        integer("mu_cols", &RunConfig::mu_cols);
        arr("mu_table", &RunConfig::mu_table);
        integer("beta_rows", &RunConfig::beta_rows);
        integer("beta_cols", &RunConfig::beta_cols);
        arr("beta_table", &RunConfig::beta_table);
        arr("q_table", &RunConfig::q_table);
        return m;
    }();
    return table;
}

void validate(const RunConfig& c, const std::string& origin) {
    auto bad = [&origin](const std::string& msg) { fail(origin, 0, msg); };
    if (c.n_a < 8 || c.n_x < 8) bad("grid sizes must satisfy n_a >= 8 and n_x >= 8");
    if (c.tol_r <= 0 || c.tol_lambda <= 0 || c.tol_steady <= 0) bad("tolerances must be positive");
    if (c.a_plus_factor < 1.0) bad("a_plus_factor must be >= 1");
    if (c.d <= 0) bad("diffusion rate d must be positive");
    if (c.sweep_param != "lambda" && c.sweep_param != "d") bad("sweep_param must be 'lambda' or 'd'");
    if (c.scheme != "crank_nicolson" && c.scheme != "backward_euler")
        bad("scheme must be 'crank_nicolson' or 'backward_euler'");
    if (c.birth != "holling2" && c.birth != "logistic") bad("birth must be 'holling2' or 'logistic'");
}

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos && line.find('"') == std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(origin, line_no, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = setters().find(key);
        if (it == setters().end()) fail(origin, line_no, "unknown key '" + key + "'");
        it->second(cfg, origin, line_no, value);
    }
    validate(cfg, origin);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

void apply_env_overrides(RunConfig& cfg) {
    for (const auto& [key, setter] : setters()) {
        std::string env = "AGEFLOW_";
        for (char c : key) env += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (const char* v = std::getenv(env.c_str())) setter(cfg, env, 0, trim(v));
    }
}

ProblemSpec spec_from_config(const RunConfig& cfg) {
    ProblemSpec spec;
    if (cfg.preset == "custom") {
        if (cfg.mu_table.empty() || cfg.beta_table.empty())
            throw ConfigError("config: preset 'custom' requires mu_table and beta_table");
        double a_plus = cfg.a_plus_factor * cfg.a_c;
        spec = ProblemSpec{};
        spec.a_c = cfg.a_c;
        spec.a_plus = a_plus;
        spec.mu = tabulated_coefficient(cfg.mu_table, cfg.mu_rows, cfg.mu_cols, a_plus);
        spec.beta = tabulated_coefficient(cfg.beta_table, cfg.beta_rows, cfg.beta_cols, a_plus);
        if (cfg.q_table.empty()) {
            spec.q = [](double) { return 1.0; };
        } else {
            std::vector<double> q = cfg.q_table;
            spec.q = [q](double x) {
                double s = std::clamp(x, 0.0, 1.0) * (q.size() - 1);
                std::size_t i = std::min(static_cast<std::size_t>(s), q.size() - 2);
                double t = s - i;
                return (1 - t) * q[i] + t * q[i + 1];
            };
        }
    } else {
        spec = make_preset(cfg.preset);
        spec.a_plus = cfg.a_plus_factor * spec.a_c;
    }
    spec.d = cfg.d;
    spec.lambda_adv = cfg.lambda_adv;

    BirthLaw base = cfg.birth == "holling2" ? holling_birth(cfg.birth_tau, cfg.birth_scale)
                                            : logistic_birth(cfg.birth_scale);
    if (cfg.birth_weight_a != 1.0 || cfg.birth_weight_b != 0.0) {
        double a = cfg.birth_weight_a, b = cfg.birth_weight_b;
        double wmax = std::max(a, a + b);
        if (std::min(a, a + b) <= 0.0) throw ConfigError("config: birth weight must stay positive on [0, 1]");
        base = weighted_birth(base, [a, b](double x) { return a + b * x; }, wmax);
    }
    spec.birth = base;
    return spec;
}

} // namespace ageflow
