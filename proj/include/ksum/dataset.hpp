#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ksum/linalg.hpp"

namespace ksum {

// Rectangular, all-numeric table read from CSV with a header row.
struct Dataset {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t nrow() const { return columns.empty() ? 0 : columns[0].size(); }
    std::size_t ncol() const { return columns.size(); }

    // Column lookup by name, or by 1-based index when `key` is an integer.
    std::size_t column_index(const std::string& key) const;
};

Dataset load_csv(const std::string& path);
Dataset parse_csv(std::istream& in, const std::string& origin = "<stream>");

// Full-precision output (round-trips through load_csv losslessly).
void write_csv(std::ostream& out, const Dataset& data);
void write_csv_file(const std::string& path, const Dataset& data);

std::string format_double(double v); // shortest exact decimal form

Matrix to_matrix(const Dataset& data);
Matrix to_matrix(const Dataset& data, const std::vector<std::size_t>& cols);
Dataset from_matrix(const Matrix& m, const std::string& prefix = "x");

} // namespace ksum
