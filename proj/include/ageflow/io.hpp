#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ageflow/dynamics.hpp"
#include "ageflow/limits.hpp"
#include "ageflow/model.hpp"
#include "ageflow/spectral.hpp"

namespace ageflow {

inline constexpr int kSchemaVersion = 1;

/// 17 significant digits, '.' decimal separator, locale-independent.
std::string format_g17(double v);

using json = nlohmann::ordered_json;

json eigen_to_json(const EigenResult& r);
json limit_set_to_json(const LimitSet& s);
json equilibrium_to_json(const EquilibriumResult& r);

void write_json_file(const std::string& path, const json& j);

/// CSV with header row; every number printed with format_g17.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Field rows as (a, x, value) triples, age-major.
void write_field_csv(const std::string& path, const Field2D& field, const Grid& grid);

} // namespace ageflow
