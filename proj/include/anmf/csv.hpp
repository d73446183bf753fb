#pragma once

#include <string>
#include <vector>

#include "anmf/imputation.hpp"
#include "anmf/matrix.hpp"
#include "anmf/nmf.hpp"

namespace anmf {

/// Render one value with 17 significant digits (lossless double round-trip);
/// every CSV writer in the library goes through this so output is uniform and
/// rerun-stable byte for byte.
std::string format_value(double v);

/// Parse a full field as a double; rejects partial parses, empty fields and
/// non-finite values. `row` and `column` are 1-based and only used for the
/// error message.
double parse_value(const std::string& field, std::size_t row, std::size_t column);

/// Raw rows of delimiter-separated fields. No quoting rules: fields are plain
/// numbers or labels. CR-LF endings are tolerated, blank trailing lines
/// skipped.
std::vector<std::vector<std::string>> read_csv_rows(const std::string& path,
                                                    char delimiter = ',');

/// Numeric matrix from CSV, one matrix row per line.
Matrix read_matrix_csv(const std::string& path, char delimiter = ',',
                       bool has_header = false);

void write_matrix_csv(const std::string& path, const Matrix& m, char delimiter = ',');

/// Masked points from CSV: one point per row, empty fields mark missing
/// attributes (placeholder 0 is stored, which by contract carries no meaning).
std::vector<MaskedVector> read_masked_csv(const std::string& path,
                                          char delimiter = ',',
                                          bool has_header = false);

/// Trace as "iteration,objective" rows, iterations numbered from 1.
void write_trace_csv(const std::string& path, const ConvergenceTrace& trace);

} // namespace anmf
