#include "ksum/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ksum/error.hpp"

namespace ksum {

namespace {

// One CSV record, honouring quoted fields with doubled-quote escapes.
// Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool quoted = false, any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get();
            break;
        } else {
            field.push_back(ch);
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col,
                  const std::string& origin) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw invalid_input(origin + ": non-numeric cell '" + cell + "' at data row " +
                            std::to_string(row) + ", column '" + col + "'");
    return value;
}

} // namespace

std::size_t Dataset::column_index(const std::string& key) const {
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == key) return j;
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
    if (ec == std::errc() && ptr == key.data() + key.size() && idx >= 1 &&
        idx <= columns.size())
        return idx - 1;
    throw invalid_input("no such column: '" + key + "'");
}

Dataset parse_csv(std::istream& in, const std::string& origin) {
    Dataset data;
    std::vector<std::string> fields;
    if (!read_record(in, fields)) throw invalid_input(origin + ": empty file");
    data.names = fields;
    data.columns.assign(data.names.size(), {});

    std::size_t row = 0;
    while (read_record(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue; // trailing blank line
        ++row;
        if (fields.size() != data.names.size())
            throw invalid_input(origin + ": ragged row " + std::to_string(row) +
                                " (expected " + std::to_string(data.names.size()) +
                                " fields, got " + std::to_string(fields.size()) + ")");
        for (std::size_t j = 0; j < fields.size(); ++j)
            data.columns[j].push_back(parse_cell(fields[j], row, data.names[j], origin));
    }
    if (row == 0) throw invalid_input(origin + ": no data rows");
    return data;
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("cannot open file: " + path);
    return parse_csv(in, path);
}

std::string format_double(double v) {
    char buf[40];
    // shortest representation that parses back to the same double
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        auto [ptr, ec] = std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
        (void)ptr;
        if (ec == std::errc() && back == v) break;
    }
    return buf;
}

void write_csv(std::ostream& out, const Dataset& data) {
    for (std::size_t j = 0; j < data.names.size(); ++j) {
        if (j) out << ',';
        out << data.names[j];
    }
    out << '\n';
    for (std::size_t i = 0; i < data.nrow(); ++i) {
        for (std::size_t j = 0; j < data.ncol(); ++j) {
            if (j) out << ',';
            out << format_double(data.columns[j][i]);
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("cannot write file: " + path);
    write_csv(out, data);
}

Matrix to_matrix(const Dataset& data) {
    std::vector<std::size_t> cols(data.ncol());
    for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
    return to_matrix(data, cols);
}

Matrix to_matrix(const Dataset& data, const std::vector<std::size_t>& cols) {
    Matrix m(data.nrow(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] >= data.ncol()) throw invalid_input("column index out of range");
        for (std::size_t i = 0; i < data.nrow(); ++i) m(i, j) = data.columns[cols[j]][i];
    }
    return m;
}

Dataset from_matrix(const Matrix& m, const std::string& prefix) {
    Dataset data;
    data.names.resize(m.cols());
    data.columns.assign(m.cols(), std::vector<double>(m.rows()));
    for (std::size_t j = 0; j < m.cols(); ++j) {
        data.names[j] = prefix + std::to_string(j + 1);
        for (std::size_t i = 0; i < m.rows(); ++i) data.columns[j][i] = m(i, j);
    }
    return data;
}

} // namespace ksum
