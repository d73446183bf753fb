#include "anmf/matrix.hpp"

#include <cmath>

namespace anmf {

namespace detail {

std::string shape_string(Index rows, Index cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

void require_same_shape(const char* op, Index r1, Index c1, Index r2, Index c2) {
    if (r1 != r2 || c1 != c2) {
        throw DimensionError(std::string(op) + ": shape mismatch, " +
                             shape_string(r1, c1) + " vs " + shape_string(r2, c2));
    }
}

} // namespace detail

void NonNegMatrix::check() const {
    if (m_.rows() < 1 || m_.cols() < 1) {
        throw DimensionError("NonNegMatrix: shape must be at least 1x1, got " +
                             detail::shape_string(m_.rows(), m_.cols()));
    }
    for (Index c = 0; c < m_.cols(); ++c) {
        for (Index r = 0; r < m_.rows(); ++r) {
            const double v = m_(r, c);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw NumericError("NonNegMatrix: entry (" + std::to_string(r) +
                                   "," + std::to_string(c) + ") = " +
                                   std::to_string(v) + " violates nonnegativity");
            }
        }
    }
}

Index AttributeMask::observed_count() const {
    Index n = 0;
    for (bool f : flags) n += f ? 1 : 0;
    return n;
}

MaskedPartition partition_rows(const Matrix& W, const AttributeMask& mask) {
    if (mask.size() != W.rows()) {
        throw DimensionError("partition_rows: mask length " +
                             std::to_string(mask.size()) + " != row count " +
                             std::to_string(W.rows()));
    }
    MaskedPartition part;
    for (Index r = 0; r < W.rows(); ++r) {
        (mask.observed(r) ? part.observed_index_list : part.missing_index_list)
            .push_back(r);
    }
    const Index n_obs = static_cast<Index>(part.observed_index_list.size());
    const Index n_mis = static_cast<Index>(part.missing_index_list.size());
    part.observed_rows.resize(n_obs, W.cols());
    part.missing_rows.resize(n_mis, W.cols());
    for (Index i = 0; i < n_obs; ++i)
        part.observed_rows.row(i) = W.row(part.observed_index_list[static_cast<std::size_t>(i)]);
    for (Index i = 0; i < n_mis; ++i)
        part.missing_rows.row(i) = W.row(part.missing_index_list[static_cast<std::size_t>(i)]);
    return part;
}

MaskedPartition partition_rows(const NonNegMatrix& W, const AttributeMask& mask) {
    return partition_rows(W.value(), mask);
}

NonNegMatrix clamp_nonneg(const Matrix& m) {
    return NonNegMatrix(clamp_nonneg_matrix(m));
}

} // namespace anmf
