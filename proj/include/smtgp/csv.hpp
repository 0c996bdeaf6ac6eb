#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace smtgp::csv {

/// Writes through a temp file and renames, so readers never observe a
/// half-written file.
inline void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp(target);
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out)
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec)
        throw std::runtime_error("cannot move '" + tmp.string() + "' to '" + target.string() +
                                 "': " + ec.message());
}

/// Full round-trip precision (17 significant digits).
inline std::string format_full(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::vector<std::string> split_line(const std::string& line, char sep = ',') {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep))
        cells.push_back(cell);
    if (!line.empty() && line.back() == sep)
        cells.emplace_back();
    return cells;
}

inline bool try_parse_cell(const std::string& cell, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos])))
            ++pos;
        return pos == cell.size();
    } catch (const std::exception&) {
        return false;
    }
}

inline double parse_cell(const std::string& cell, const std::string& path, size_t line_no) {
    double v = 0.0;
    if (!try_parse_cell(cell, v))
        throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": cell '" + cell +
                                 "' is not numeric");
    return v;
}

/// Headerless numeric CSV into a dense matrix; every row must have the same
/// width. Errors name the offending line.
inline Eigen::MatrixXd load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto cells = split_line(line);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells)
            row.push_back(parse_cell(cell, path, line_no));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(rows.front().size()) + " columns, found " +
                                     std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw std::runtime_error(path + ": no numeric rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return m;
}

/// A single row or single column of numbers.
inline Eigen::VectorXd load_vector(const std::string& path) {
    const Eigen::MatrixXd m = load_matrix(path);
    if (m.rows() == 1)
        return m.row(0).transpose();
    if (m.cols() == 1)
        return m.col(0);
    throw std::runtime_error(path + ": expected a single row or column vector, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

}  // namespace smtgp::csv
