#include "kcontract/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "kcontract/errors.hpp"

namespace kcontract {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", rows}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw InvalidArgument("matrix JSON must have fields rows, cols, data");
    const auto r = j.at("rows").get<Eigen::Index>();
    const auto c = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (r < 1 || c < 1) throw InvalidArgument("matrix JSON: rows/cols must be positive");
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != r)
        throw InvalidArgument("matrix JSON: data has wrong row count");
    Eigen::MatrixXd M(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = data[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
            throw InvalidArgument("matrix JSON: row " + std::to_string(i) + " has wrong length");
        for (Eigen::Index jx = 0; jx < c; ++jx) {
            const auto& v = row[static_cast<std::size_t>(jx)];
            if (!v.is_number()) throw InvalidArgument("matrix JSON: non-numeric entry");
            M(i, jx) = v.get<double>();
        }
    }
    if (!M.allFinite()) throw NonFiniteError("matrix JSON: non-finite entry");
    return M;
}

std::string matrix_to_csv(const Eigen::MatrixXd& M) {
    std::ostringstream out;
    out.precision(17);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out << ',';
            out << M(i, j);
        }
        out << '\n';
    }
    return out.str();
}

Eigen::MatrixXd matrix_from_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw InvalidArgument("matrix CSV: bad cell '" + cell + "'");
            }
            if (cell.find_first_not_of(" \t\r", pos) != std::string::npos)
                throw InvalidArgument("matrix CSV: bad cell '" + cell + "'");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw InvalidArgument("matrix CSV: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty()) throw InvalidArgument("matrix CSV: empty input");
    Eigen::MatrixXd M(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
    if (!M.allFinite()) throw NonFiniteError("matrix CSV: non-finite entry");
    return M;
}

Eigen::MatrixXd load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const bool looks_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
    const auto first = text.find_first_not_of(" \t\r\n");
    if (looks_json || (first != std::string::npos && text[first] == '{'))
        return matrix_from_json(json::parse(text));
    return matrix_from_csv(text);
}

void save_matrix_json(const Eigen::MatrixXd& M, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << matrix_to_json(M).dump(2) << '\n';
}

}  // namespace kcontract
