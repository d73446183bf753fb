#pragma once

#include <vector>

#include "anmf/nmf.hpp"

namespace anmf {

/// Which of the two additive schemes to run.
enum class SchemeKind {
    MultiStage, ///< factorize the running residue stage by stage
    Joint       ///< sweep multiplicative updates over all terms at once
};

/// Ordered sum of rank-r factorizations: X ~ sum_i W_i * H_i.
/// All terms share the data dimension, point count and rank; k = 1 is the
/// plain factorization again.
class AdditiveFactorization {
public:
    explicit AdditiveFactorization(std::vector<Factorization> terms);

    const std::vector<Factorization>& terms() const { return terms_; }
    const Factorization& term(Index j) const;
    Index term_count() const { return static_cast<Index>(terms_.size()); }
    Index dim() const { return terms_.front().dim(); }
    Index points() const { return terms_.front().points(); }
    Index rank() const { return terms_.front().rank(); }

private:
    std::vector<Factorization> terms_;
};

struct MultiStageResult {
    AdditiveFactorization factorization;
    std::vector<ConvergenceTrace> stage_traces;
};

struct JointFactorizeResult {
    AdditiveFactorization factorization;
    ConvergenceTrace trace;
};

/// Sum of the term reconstructions, accumulated in term order.
Matrix additive_reconstruct(const AdditiveFactorization& F);

/// Stage i factorizes the clamped residue max(X - sum of earlier terms, 0).
/// Stage seeds derive from (config.seed, stage index), stage 0 keeping the
/// seed itself so k = 1 reproduces factorize() bit for bit.
MultiStageResult multi_stage_factorize(const NonNegMatrix& X, Index r, Index k,
                                       const SolverConfig& config);

/// Multiplicative update of term j's H against the full term sum:
/// H_j' = H_j .* (W_j'X) ./ (W_j' sum_i W_i H_i + epsilon).
NonNegMatrix joint_update_term_h(const NonNegMatrix& X, const AdditiveFactorization& F,
                                 Index j, double epsilon);

/// Mirror update for term j's W: W_j' = W_j .* (XH_j') ./ ((sum_i W_i H_i)H_j' + epsilon).
NonNegMatrix joint_update_term_w(const NonNegMatrix& X, const AdditiveFactorization& F,
                                 Index j, double epsilon);

/// Sweep j = 0..k-1 (H then W per term) each iteration; objective recorded
/// once per sweep; stopping rule as factorize. Term seeds derive from
/// (config.seed, term index), term 0 keeping the seed itself.
JointFactorizeResult joint_factorize(const NonNegMatrix& X, Index r, Index k,
                                     const SolverConfig& config);

/// Exact gradient of the global objective with respect to H_j:
/// -W_j' (X - sum_i W_i H_i). A plain real matrix; entries may be negative.
Matrix gradient_term_h(const NonNegMatrix& X, const AdditiveFactorization& F, Index j);

} // namespace anmf
