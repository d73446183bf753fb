#include "anmf/imputation.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "anmf/rng.hpp"

namespace anmf {

namespace {

// Observed/missing row blocks of one dictionary plus the observed values,
// shaped for the multiplicative-update kernels (column vectors as m x 1).
struct ReducedSystem {
    Matrix Wb;                       // observed rows of W
    Matrix Wd;                       // missing rows of W (may be 0 x r)
    Matrix xb;                       // observed values, m x 1
    std::vector<Index> observed_idx;
    std::vector<Index> missing_idx;
};

void require_point_dim(const char* op, const MaskedVector& x, Index d) {
    if (x.size() != d) {
        throw DimensionError(std::string(op) + ": point has " +
                             std::to_string(x.size()) +
                             " attributes but the dictionary has " +
                             std::to_string(d) + " rows");
    }
}

ReducedSystem reduce(const char* op, const MaskedVector& x, const Matrix& W) {
    require_point_dim(op, x, W.rows());
    if (x.mask().none_observed()) {
        throw MaskError(std::string(op) +
                        ": every attribute is missing, the reduced system is empty");
    }
    MaskedPartition part = partition_rows(W, x.mask());
    ReducedSystem sys;
    sys.Wb = std::move(part.observed_rows);
    sys.Wd = std::move(part.missing_rows);
    sys.observed_idx = std::move(part.observed_index_list);
    sys.missing_idx = std::move(part.missing_index_list);
    sys.xb.resize(static_cast<Index>(sys.observed_idx.size()), 1);
    for (std::size_t i = 0; i < sys.observed_idx.size(); ++i) {
        sys.xb(static_cast<Index>(i), 0) = x.values()(sys.observed_idx[i]);
    }
    return sys;
}

Vector assemble_completed(const MaskedVector& x, const ReducedSystem& sys,
                          const Matrix& missing_fill) {
    Vector completed(x.size());
    for (Index i : sys.observed_idx) completed(i) = x.values()(i);
    for (std::size_t i = 0; i < sys.missing_idx.size(); ++i) {
        completed(sys.missing_idx[i]) = missing_fill(static_cast<Index>(i), 0);
    }
    return completed;
}

} // namespace

MaskedVector::MaskedVector(Vector values, AttributeMask mask)
    : values_(std::move(values)), mask_(std::move(mask)) {
    if (values_.size() < 1) {
        throw DimensionError("MaskedVector: needs at least one attribute");
    }
    if (values_.size() != mask_.size()) {
        throw DimensionError("MaskedVector: " + std::to_string(values_.size()) +
                             " values but mask has " + std::to_string(mask_.size()) +
                             " flags");
    }
    for (Index i = 0; i < values_.size(); ++i) {
        if (!mask_.observed(i)) continue; // placeholders are unconstrained
        const double v = values_(i);
        if (!std::isfinite(v) || v < 0.0) {
            throw NumericError("MaskedVector: observed entry " + std::to_string(i) +
                               " is " + std::to_string(v) +
                               ", must be finite and >= 0");
        }
    }
}

HFitResult fit_h_masked(const MaskedVector& x, const NonNegMatrix& W,
                        const SolverConfig& config) {
    config.validate();
    ReducedSystem sys = reduce("fit_h_masked", x, W.value());
    return fit_h_fixed_w(NonNegMatrix(std::move(sys.xb)), NonNegMatrix(std::move(sys.Wb)),
                         config);
}

ImputationResult impute_point(const MaskedVector& x, const NonNegMatrix& W,
                              const SolverConfig& config) {
    config.validate();
    ReducedSystem sys = reduce("impute_point", x, W.value());
    HFitResult fit = fit_h_fixed_w(NonNegMatrix(sys.xb), NonNegMatrix(sys.Wb), config);
    const Matrix fill = sys.Wd * fit.H.value();
    Vector completed = assemble_completed(x, sys, fill);
    std::vector<NonNegMatrix> codes;
    codes.push_back(fit.H);
    return {std::move(completed), std::move(codes), std::move(fit.trace)};
}

ImputationResult impute_point_additive(const MaskedVector& x,
                                       const AdditiveFactorization& F,
                                       const SolverConfig& config) {
    config.validate();
    const std::size_t k = static_cast<std::size_t>(F.term_count());
    const Index r = F.rank();
    std::vector<Matrix> Wb(k), Wd(k);
    Matrix xb;
    std::vector<Index> observed_idx, missing_idx;
    for (std::size_t j = 0; j < k; ++j) {
        ReducedSystem sys =
            reduce("impute_point_additive", x, F.term(static_cast<Index>(j)).W().value());
        Wb[j] = std::move(sys.Wb);
        Wd[j] = std::move(sys.Wd);
        if (j == 0) {
            xb = std::move(sys.xb);
            observed_idx = std::move(sys.observed_idx);
            missing_idx = std::move(sys.missing_idx);
        }
    }

    std::vector<Matrix> hs(k);
    for (std::size_t j = 0; j < k; ++j) {
        SeededRng rng(derive_seed(config.seed, j));
        hs[j].resize(r, 1);
        for (Index i = 0; i < r; ++i) hs[j](i, 0) = config.init_scale * rng.unit_positive();
    }

    const auto observed_sum = [&]() {
        Matrix s = Wb[0] * hs[0];
        for (std::size_t i = 1; i < k; ++i) s.noalias() += Wb[i] * hs[i];
        return s;
    };

    ConvergenceTrace trace;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
        for (std::size_t j = 0; j < k; ++j) {
            hs[j] = detail::mu_step_h(xb, Wb[j], hs[j], observed_sum(), config.epsilon);
        }
        const double obj = frobenius_error(xb, observed_sum());
        if (!std::isfinite(obj)) {
            throw NumericError(
                "impute_point_additive: objective became non-finite at iteration " +
                std::to_string(iter + 1));
        }
        trace.objective_values.push_back(obj);
        if (std::isfinite(prev) && detail::relative_change(prev, obj) < config.rel_tol) {
            trace.converged = true;
            break;
        }
        prev = obj;
    }

    Matrix fill = Wd[0] * hs[0];
    for (std::size_t i = 1; i < k; ++i) fill.noalias() += Wd[i] * hs[i];

    Vector completed(x.size());
    for (Index i : observed_idx) completed(i) = x.values()(i);
    for (std::size_t i = 0; i < missing_idx.size(); ++i) {
        completed(missing_idx[i]) = fill(static_cast<Index>(i), 0);
    }

    std::vector<NonNegMatrix> codes;
    codes.reserve(k);
    for (std::size_t j = 0; j < k; ++j) codes.emplace_back(std::move(hs[j]));
    return {std::move(completed), std::move(codes), std::move(trace)};
}

ImputeBatchResult impute_matrix(const std::vector<MaskedVector>& points,
                                const NonNegMatrix& W, const SolverConfig& config,
                                bool fail_fast) {
    config.validate();
    if (points.empty()) {
        throw DimensionError("impute_matrix: batch must contain at least one point");
    }
    const Index d = W.rows();
    Matrix completed(d, static_cast<Index>(points.size()));
    std::vector<ConvergenceTrace> traces(points.size());
    std::vector<BatchPointFailure> failures;

    for (std::size_t j = 0; j < points.size(); ++j) {
        SolverConfig point_cfg = config;
        point_cfg.seed = derive_seed(config.seed, j);
        try {
            ImputationResult res = impute_point(points[j], W, point_cfg);
            completed.col(static_cast<Index>(j)) = res.completed;
            traces[j] = std::move(res.trace);
        } catch (const Error& e) {
            if (fail_fast) throw;
            failures.push_back({static_cast<Index>(j), e.what()});
            Vector fallback = Vector::Zero(d);
            if (points[j].size() == d) {
                for (Index i = 0; i < d; ++i) {
                    if (points[j].mask().observed(i)) fallback(i) = points[j].values()(i);
                }
            }
            completed.col(static_cast<Index>(j)) = fallback;
        }
    }
    return {NonNegMatrix(std::move(completed)), std::move(traces), std::move(failures)};
}

double masked_objective(const MaskedVector& x, const NonNegMatrix& W,
                        const NonNegMatrix& h, const Vector& x_missing_estimate) {
    require_point_dim("masked_objective", x, W.rows());
    if (h.rows() != W.cols() || h.cols() != 1) {
        throw DimensionError("masked_objective: h is " +
                             detail::shape_string(h.rows(), h.cols()) + ", expected " +
                             detail::shape_string(W.cols(), 1));
    }
    MaskedPartition part = partition_rows(W.value(), x.mask());
    const Index m_missing = static_cast<Index>(part.missing_index_list.size());
    if (x_missing_estimate.size() != m_missing) {
        throw DimensionError("masked_objective: estimate has " +
                             std::to_string(x_missing_estimate.size()) +
                             " entries but " + std::to_string(m_missing) +
                             " attributes are missing");
    }
    Vector xb(static_cast<Index>(part.observed_index_list.size()));
    for (std::size_t i = 0; i < part.observed_index_list.size(); ++i) {
        xb(static_cast<Index>(i)) = x.values()(part.observed_index_list[i]);
    }
    const double missing_block =
        (x_missing_estimate - part.missing_rows * h.value()).squaredNorm();
    const double observed_block = (xb - part.observed_rows * h.value()).squaredNorm();
    return 0.5 * (missing_block + observed_block);
}

} // namespace anmf
