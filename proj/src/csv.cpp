#include "anmf/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace anmf {

namespace {

std::string location(std::size_t row, std::size_t column) {
    return "row " + std::to_string(row) + ", column " + std::to_string(column);
}

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

void require_rectangular(const std::string& path,
                         const std::vector<std::vector<std::string>>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) {
            throw ParseError(path + ": row " + std::to_string(i + 1) + " has " +
                             std::to_string(rows[i].size()) + " fields, row 1 has " +
                             std::to_string(rows[0].size()));
        }
    }
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary: keep \n endings as-is
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

} // namespace

std::string format_value(double v) {
    // Shortest decimal string that parses back to exactly v.
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_value(const std::string& field, std::size_t row, std::size_t column) {
    if (field.empty()) {
        throw ParseError("empty field at " + location(row, column));
    }
    double v = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw ParseError("cannot parse '" + field + "' as a number at " +
                         location(row, column));
    }
    if (!std::isfinite(v)) {
        throw ParseError("non-finite value '" + field + "' at " + location(row, column));
    }
    return v;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path,
                                                    char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        rows.push_back(split_fields(line, delimiter));
    }
    return rows;
}

Matrix read_matrix_csv(const std::string& path, char delimiter, bool has_header) {
    auto rows = read_csv_rows(path, delimiter);
    require_rectangular(path, rows);
    const std::size_t first_data = has_header ? 1 : 0;
    if (rows.size() <= first_data || rows[0].empty()) {
        throw ParseError(path + ": no data rows");
    }
    const std::size_t n_rows = rows.size() - first_data;
    const std::size_t n_cols = rows[0].size();
    Matrix m(static_cast<Index>(n_rows), static_cast<Index>(n_cols));
    for (std::size_t i = 0; i < n_rows; ++i) {
        for (std::size_t j = 0; j < n_cols; ++j) {
            try {
                m(static_cast<Index>(i), static_cast<Index>(j)) =
                    parse_value(rows[i + first_data][j], i + first_data + 1, j + 1);
            } catch (const ParseError& e) {
                throw ParseError(path + ": " + e.what());
            }
        }
    }
    return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m, char delimiter) {
    std::ofstream out = open_for_write(path);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << delimiter;
            out << format_value(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<MaskedVector> read_masked_csv(const std::string& path, char delimiter,
                                          bool has_header) {
    auto rows = read_csv_rows(path, delimiter);
    require_rectangular(path, rows);
    const std::size_t first_data = has_header ? 1 : 0;
    if (rows.size() <= first_data || rows[0].empty()) {
        throw ParseError(path + ": no data rows");
    }
    std::vector<MaskedVector> points;
    points.reserve(rows.size() - first_data);
    for (std::size_t i = first_data; i < rows.size(); ++i) {
        const auto& fields = rows[i];
        Vector values(static_cast<Index>(fields.size()));
        AttributeMask mask;
        mask.flags.resize(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (fields[j].empty()) {
                values(static_cast<Index>(j)) = 0.0;
                mask.flags[j] = false;
            } else {
                try {
                    values(static_cast<Index>(j)) = parse_value(fields[j], i + 1, j + 1);
                } catch (const ParseError& e) {
                    throw ParseError(path + ": " + e.what());
                }
                mask.flags[j] = true;
            }
        }
        try {
            points.emplace_back(std::move(values), std::move(mask));
        } catch (const NumericError& e) {
            throw NumericError(path + ": row " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return points;
}

void write_trace_csv(const std::string& path, const ConvergenceTrace& trace) {
    std::ofstream out = open_for_write(path);
    out << "iteration,objective\n";
    for (std::size_t i = 0; i < trace.objective_values.size(); ++i) {
        out << (i + 1) << ',' << format_value(trace.objective_values[i]) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace anmf
