#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "anmf/errors.hpp"

namespace anmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace detail {

std::string shape_string(Index rows, Index cols);

void require_same_shape(const char* op, Index r1, Index c1, Index r2, Index c2);

} // namespace detail

/// Dense real matrix constrained to entrywise nonnegative values.
///
/// The invariant (rows >= 1, cols >= 1, every entry >= 0 and finite) is
/// checked once at construction; instances are immutable afterwards and safe
/// to share across threads.
class NonNegMatrix {
public:
    template <typename Derived>
    explicit NonNegMatrix(const Eigen::MatrixBase<Derived>& m) : m_(m) {
        check();
    }

    explicit NonNegMatrix(Matrix m) : m_(std::move(m)) { check(); }

    const Matrix& value() const { return m_; }
    Index rows() const { return m_.rows(); }
    Index cols() const { return m_.cols(); }
    double operator()(Index r, Index c) const { return m_(r, c); }

private:
    void check() const;

    Matrix m_;
};

/// Per-attribute observed/missing flags for one data point (true = observed).
struct AttributeMask {
    std::vector<bool> flags;

    Index size() const { return static_cast<Index>(flags.size()); }
    bool observed(Index i) const { return flags[static_cast<std::size_t>(i)]; }

    Index observed_count() const;
    Index missing_count() const { return size() - observed_count(); }
    bool all_observed() const { return missing_count() == 0; }
    bool none_observed() const { return observed_count() == 0; }
};

/// Row split of a dictionary into its observed and missing blocks.
///
/// The two index lists are disjoint, sorted ascending and together cover
/// every row; either block may be empty (0 x cols), which is why the blocks
/// are plain matrices rather than NonNegMatrix values.
struct MaskedPartition {
    Matrix observed_rows;
    Matrix missing_rows;
    std::vector<Index> observed_index_list;
    std::vector<Index> missing_index_list;
};

/// Half the squared Frobenius norm of (target - approx).
/// Zero exactly when the operands are entrywise equal.
template <typename DerivedA, typename DerivedB>
double frobenius_error(const Eigen::MatrixBase<DerivedA>& target,
                       const Eigen::MatrixBase<DerivedB>& approx) {
    detail::require_same_shape("frobenius_error", target.rows(), target.cols(),
                               approx.rows(), approx.cols());
    return 0.5 * (target - approx).squaredNorm();
}

inline double frobenius_error(const NonNegMatrix& target, const Matrix& approx) {
    return frobenius_error(target.value(), approx);
}

inline double frobenius_error(const NonNegMatrix& target, const NonNegMatrix& approx) {
    return frobenius_error(target.value(), approx.value());
}

/// Split the rows of W into observed and missing blocks per `mask`.
/// Reassembling the blocks by their index lists reproduces W exactly.
MaskedPartition partition_rows(const NonNegMatrix& W, const AttributeMask& mask);

MaskedPartition partition_rows(const Matrix& W, const AttributeMask& mask);

/// Entrywise max(entry, 0); used to keep multi-stage residues factorizable.
template <typename Derived>
Matrix clamp_nonneg_matrix(const Eigen::MatrixBase<Derived>& m) {
    return m.cwiseMax(0.0);
}

NonNegMatrix clamp_nonneg(const Matrix& m);

} // namespace anmf
