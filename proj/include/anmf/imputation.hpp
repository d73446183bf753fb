#pragma once

#include <string>
#include <vector>

#include "anmf/additive.hpp"
#include "anmf/nmf.hpp"

namespace anmf {

/// One data point with per-attribute observed/missing flags.
///
/// Values at missing positions are placeholders (conventionally 0); nothing
/// downstream ever reads them, so their content cannot influence any result.
/// Observed positions must be finite and >= 0.
class MaskedVector {
public:
    MaskedVector(Vector values, AttributeMask mask);

    const Vector& values() const { return values_; }
    const AttributeMask& mask() const { return mask_; }
    Index size() const { return values_.size(); }

private:
    Vector values_;
    AttributeMask mask_;
};

/// Completed point plus the fitted code(s) and the solver trace.
/// `completed` equals the input bit for bit at observed positions and holds
/// the dictionary projection at missing ones; it is entrywise >= 0.
struct ImputationResult {
    Vector completed;
    std::vector<NonNegMatrix> h; ///< one r x 1 code per dictionary term
    ConvergenceTrace trace;
};

struct BatchPointFailure {
    Index point;
    std::string message;
};

/// Batch completion: column j of `completed` is point j. Failed points (when
/// not failing fast) keep their observed entries, hold 0 at missing ones, and
/// contribute an empty trace plus a failure record.
struct ImputeBatchResult {
    NonNegMatrix completed;
    std::vector<ConvergenceTrace> traces;
    std::vector<BatchPointFailure> failures;
};

/// Fit the code h for one masked point against the observed rows of W:
/// h <- h .* (Wbar' xbar) ./ (Wbar' Wbar h + epsilon), where Wbar/xbar are the
/// observed-row blocks. Same stopping rule as factorize, objective
/// 0.5 * |xbar - Wbar h|^2. Rejects all-missing masks (the reduced system is
/// empty). With nothing masked this coincides with fit_h_fixed_w bit for bit.
HFitResult fit_h_masked(const MaskedVector& x, const NonNegMatrix& W,
                        const SolverConfig& config);

/// Complete one point: fit h on the observed rows, then fill each missing
/// entry from the missing-row block, completed[missing] = (W_missing h).
/// The trace records the full two-block objective with the missing block held
/// at its per-iteration minimizer W_missing h_n, where that block vanishes;
/// the recorded series is therefore the observed-block objective and is
/// non-increasing within slack.
ImputationResult impute_point(const MaskedVector& x, const NonNegMatrix& W,
                              const SolverConfig& config);

/// Additive variant: one code per term, swept in term order with the observed
/// term sum refreshed before each step,
/// h_j <- h_j .* (Wbar_j' xbar) ./ (Wbar_j' sum_i Wbar_i h_i + epsilon).
/// Missing entries are filled with sum_i (W_missing_i h_i). A single-term F
/// reproduces impute_point bit for bit under the same seed.
ImputationResult impute_point_additive(const MaskedVector& x,
                                       const AdditiveFactorization& F,
                                       const SolverConfig& config);

/// Complete a batch of independently masked points against one dictionary.
/// Point j runs impute_point with seed derive_seed(config.seed, j) (point 0
/// keeps config.seed), so the batch equals a pointwise loop bit for bit and
/// is independent of evaluation order. Per-point errors are collected into
/// `failures` unless fail_fast is set, in which case the first one propagates.
ImputeBatchResult impute_matrix(const std::vector<MaskedVector>& points,
                                const NonNegMatrix& W, const SolverConfig& config,
                                bool fail_fast = false);

/// Two-block squared error of a masked point:
/// 0.5 * (|x_missing_estimate - W_missing h|^2 + |xbar - Wbar h|^2).
/// With the estimate set to (W_missing h) the first block is exactly 0 and
/// the value collapses to the reduced observed-block objective.
double masked_objective(const MaskedVector& x, const NonNegMatrix& W,
                        const NonNegMatrix& h, const Vector& x_missing_estimate);

} // namespace anmf
