#include "ageflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ageflow {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json eigen_to_json(const EigenResult& r) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["lambda0"] = r.lambda0;
    j["r_residual"] = r.r_residual;
    j["pde_residual"] = r.pde_residual;
    j["bracket"] = {r.bracket_lo, r.bracket_hi};
    j["iterations"] = {{"bisection", r.bisect_iterations}, {"power", r.power_iterations}};
    j["gauge"] = r.gauge == Gauge::neumann ? "neumann" : "flux";
    return j;
}

json limit_set_to_json(const LimitSet& s) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["alpha1"] = s.values.alpha1;
    j["alpha0"] = s.values.alpha0;
    j["alpha_max"] = s.values.alpha_max;
    j["alpha_bar"] = s.values.alpha_bar;
    j["gamma"] = s.gamma.gamma;
    j["hypotheses"] = {{"downstream", s.gamma.downstream},
                       {"peak", s.gamma.peak},
                       {"average", s.gamma.average},
                       {"average_value", s.gamma.average_value}};
    j["u_star_positive"] = s.u_star.positive;
    j["u_star"] = s.u_star.u;
    return j;
}

json equilibrium_to_json(const EquilibriumResult& r) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["residual"] = r.residual;
    j["converged"] = r.converged;
    j["t_reached"] = r.t_reached;
    j["classification"] = r.classification == Classification::positive ? "positive" : "extinct";
    j["sup"] = r.u.max_abs();
    if (r.cross_checked) j["cross_check_distance"] = r.cross_distance;
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write to " + path);
    out << j.dump(2) << "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write to " + path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_g17(row[i]);
        out << "\n";
    }
}

void write_field_csv(const std::string& path, const Field2D& field, const Grid& grid) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write to " + path);
    out << "a,x,value\n";
    for (int j = 0; j < field.rows(); ++j)
        for (int i = 0; i < field.cols(); ++i)
            out << format_g17(grid.age(j)) << "," << format_g17(grid.x(i)) << ","
                << format_g17(field(j, i)) << "\n";
}

} // namespace ageflow
