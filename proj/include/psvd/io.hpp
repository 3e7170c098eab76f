#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "psvd/matrix.hpp"
#include "psvd/op_counter.hpp"

namespace psvd {

inline constexpr const char* kToolVersion = "1.0.0";

// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Plain-text matrix: one row per line, comma-separated decimals, optional
// leading `# m n` header. Errors name the offending line.
inline DenseMatrix parse_matrix(std::istream& in, const std::string& name = "<input>")
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t declared_m = 0, declared_n = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        const auto first = trimmed.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (trimmed[first] == '#') {
            if (rows.empty() && declared_m == 0) {
                std::istringstream hs(trimmed.substr(first + 1));
                hs >> declared_m >> declared_n;
            }
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() && (cell[used] == ' ' || cell[used] == '\t')) ++used;
                if (used != cell.size()) throw std::invalid_argument("trailing characters");
                row.push_back(v);
            } catch (const std::exception&) {
                throw std::invalid_argument(name + ":" + std::to_string(lineno) +
                                            ": cannot parse value '" + cell + "'");
            }
        }
        if (row.empty())
            throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": empty row");
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": ragged row (" +
                                        std::to_string(row.size()) + " values, expected " +
                                        std::to_string(rows.front().size()) + ")");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument(name + ": no matrix rows");
    if (declared_m && (declared_m != rows.size() || declared_n != rows.front().size()))
        throw std::invalid_argument(name + ": header dimensions do not match the data");
    DenseMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j) {
            if (!std::isfinite(rows[i][j]))
                throw std::invalid_argument(name + ": non-finite entry at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
            m(i, j) = rows[i][j];
        }
    return m;
}

inline DenseMatrix read_matrix_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open matrix file: " + path);
    return parse_matrix(in, path);
}

inline void write_matrix_csv(std::ostream& out, const DenseMatrix& m)
{
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

inline nlohmann::json counter_to_json(const OpCounter& ops)
{
    nlohmann::json j;
    for (std::size_t k = 0; k < kOpKindCount; ++k) {
        const OpKind kind = static_cast<OpKind>(k);
        j[std::string(to_string(kind))] = ops.get(kind);
    }
    return j;
}

inline OpCounter counter_from_json(const nlohmann::json& j)
{
    OpCounter ops;
    for (std::size_t k = 0; k < kOpKindCount; ++k) {
        const OpKind kind = static_cast<OpKind>(k);
        ops.set(kind, j.at(std::string(to_string(kind))).get<std::uint64_t>());
    }
    return ops;
}

// Key-value result document for one decomposition run; serialized as JSON
// and parses back losslessly.
struct ResultDocument {
    std::string algorithm;
    std::string mode;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::uint64_t iterations = 0;
    bool converged = false;
    double residual_offdiag = 0.0;
    std::vector<double> sigma;
    OpCounter counters;
    OpCounter gpu_actual;
    double time_units = 0.0;
    double time_seconds = 0.0;
    double energy_pj = 0.0;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["algorithm"] = algorithm;
        j["mode"] = mode;
        j["rows"] = rows;
        j["cols"] = cols;
        j["iterations"] = iterations;
        j["converged"] = converged;
        j["residual_offdiag"] = residual_offdiag;
        j["sigma"] = sigma;
        j["counters"] = counter_to_json(counters);
        j["gpu_actual"] = {{"add", gpu_actual.add}, {"mul", gpu_actual.mul}};
        j["time_units"] = time_units;
        j["time_seconds"] = time_seconds;
        j["energy_pj"] = energy_pj;
        j["seed"] = seed;
        j["tool_version"] = tool_version;
        return j;
    }

    std::string serialize() const { return to_json().dump(2) + "\n"; }

    static ResultDocument parse(const std::string& text)
    {
        const nlohmann::json j = nlohmann::json::parse(text);
        ResultDocument d;
        d.algorithm = j.at("algorithm").get<std::string>();
        d.mode = j.at("mode").get<std::string>();
        d.rows = j.at("rows").get<std::size_t>();
        d.cols = j.at("cols").get<std::size_t>();
        d.iterations = j.at("iterations").get<std::uint64_t>();
        d.converged = j.at("converged").get<bool>();
        d.residual_offdiag = j.at("residual_offdiag").get<double>();
        d.sigma = j.at("sigma").get<std::vector<double>>();
        d.counters = counter_from_json(j.at("counters"));
        d.gpu_actual.add = j.at("gpu_actual").at("add").get<std::uint64_t>();
        d.gpu_actual.mul = j.at("gpu_actual").at("mul").get<std::uint64_t>();
        d.time_units = j.at("time_units").get<double>();
        d.time_seconds = j.at("time_seconds").get<double>();
        d.energy_pj = j.at("energy_pj").get<double>();
        d.seed = j.at("seed").get<std::uint64_t>();
        d.tool_version = j.at("tool_version").get<std::string>();
        return d;
    }
};

}  // namespace psvd
