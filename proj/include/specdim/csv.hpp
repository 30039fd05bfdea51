#pragma once

// Strict CSV ingestion/emission.
//
// Dialect (pinned): comma separator, '.' decimal point, first row is a
// header, UTF-8, numeric cells unquoted.  Every data cell must parse as a
// finite real; missing or non-numeric cells are rejected with row/column
// diagnostics.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace specdim {

struct CsvTable {
    std::vector<std::string> header;
    Eigen::MatrixXd values; // rows x columns, header excluded

    // Index of a named column, or input_error.
    Eigen::Index column(const std::string& name) const {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return static_cast<Eigen::Index>(j);
        throw input_error("column '" + name + "' not found in CSV header");
    }

    // All columns except `drop`, as a matrix, preserving order.
    Eigen::MatrixXd without_column(Eigen::Index drop) const {
        Eigen::MatrixXd out(values.rows(), values.cols() - 1);
        Eigen::Index k = 0;
        for (Eigen::Index j = 0; j < values.cols(); ++j)
            if (j != drop) out.col(k++) = values.col(j);
        return out;
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
    if (b == e)
        throw input_error("missing cell at row " + std::to_string(row) +
                          ", column " + std::to_string(col + 1));
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e || !std::isfinite(v))
        throw input_error("non-numeric cell '" + std::string(b, e) + "' at row " +
                          std::to_string(row) + ", column " + std::to_string(col + 1));
    return v;
}

} // namespace detail

// Read a whole CSV file into a table.  Row numbers in diagnostics are
// 1-based file line numbers (the header is line 1).
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw input_error("empty file: " + path);
    CsvTable table;
    table.header = detail::split_csv_line(line);
    const std::size_t ncol = table.header.size();

    std::vector<double> buf;
    std::size_t nrow = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != ncol)
            throw input_error("row " + std::to_string(lineno) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(ncol));
        for (std::size_t j = 0; j < ncol; ++j)
            buf.push_back(detail::parse_cell(cells[j], lineno, j));
        ++nrow;
    }
    if (nrow == 0) throw input_error("no data rows in file: " + path);

    table.values.resize(static_cast<Eigen::Index>(nrow), static_cast<Eigen::Index>(ncol));
    for (std::size_t i = 0; i < nrow; ++i)
        for (std::size_t j = 0; j < ncol; ++j)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                buf[i * ncol + j];
    return table;
}

// Shortest-round-trip formatting for doubles in emitted CSV.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace specdim
