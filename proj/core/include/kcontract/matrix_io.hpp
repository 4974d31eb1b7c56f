#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>

namespace kcontract {

/// JSON schema: { "rows": r, "cols": c, "data": [[...], ...] } (row-major).
nlohmann::json matrix_to_json(const Eigen::MatrixXd& M);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

/// Headerless CSV, one row per line.
std::string matrix_to_csv(const Eigen::MatrixXd& M);
Eigen::MatrixXd matrix_from_csv(const std::string& text);

/// Loads a matrix from a .json or .csv file (decided by extension, falling
/// back to sniffing the first non-space character).
Eigen::MatrixXd load_matrix(const std::string& path);
void save_matrix_json(const Eigen::MatrixXd& M, const std::string& path);

}  // namespace kcontract
