#pragma once

#include <cstdint>
#include <vector>

#include "anmf/matrix.hpp"

namespace anmf {

/// Stopping and reproducibility knobs shared by every solver in the library.
struct SolverConfig {
    std::size_t max_iters = 50000;  ///< hard iteration cap
    double rel_tol = 1e-5;          ///< relative objective-change threshold
    double epsilon = 1e-12;         ///< additive denominator guard
    std::uint64_t seed = 0;         ///< root seed for all random draws
    double init_scale = 1.0;        ///< factors start uniform on (0, init_scale]

    void validate() const;
};

/// Objective value after each full iteration, plus how the run ended.
struct ConvergenceTrace {
    std::vector<double> objective_values;
    bool converged = false;

    std::size_t iterations_run() const { return objective_values.size(); }
    double final_objective() const { return objective_values.back(); }
};

/// One rank-r pair X ~ W * H with W (d x r) and H (r x N) nonnegative.
class Factorization {
public:
    Factorization(NonNegMatrix W, NonNegMatrix H);

    const NonNegMatrix& W() const { return W_; }
    const NonNegMatrix& H() const { return H_; }
    Index rank() const { return W_.cols(); }
    Index dim() const { return W_.rows(); }
    Index points() const { return H_.cols(); }

    Matrix reconstruct() const { return W_.value() * H_.value(); }

private:
    NonNegMatrix W_;
    NonNegMatrix H_;
};

struct FactorizeResult {
    Factorization factorization;
    ConvergenceTrace trace;
};

struct HFitResult {
    NonNegMatrix H;
    ConvergenceTrace trace;
};

namespace detail {

// Multiplicative update steps, factored out so the additive scheme can reuse
// the identical arithmetic with its own reconstruction matrix. `recon` must
// equal the current model estimate of X (W*H here, the term sum for ANMF).
Matrix mu_step_h(const Matrix& X, const Matrix& W, const Matrix& H,
                 const Matrix& recon, double epsilon);
Matrix mu_step_w(const Matrix& X, const Matrix& W, const Matrix& H,
                 const Matrix& recon, double epsilon);

// Relative objective change used by every stopping rule:
// |prev - curr| / max(1, prev).
double relative_change(double prev, double curr);

void require_factor_shapes(const char* op, const Matrix& X, const Matrix& W,
                           const Matrix& H);

} // namespace detail

/// Uniform-positive factors on (0, init_scale], filled W first then H, each
/// in row-major order from a single stream seeded with config.seed.
Factorization init_factors(Index d, Index r, Index N, const SolverConfig& config);

/// One multiplicative H step: H' = H .* (W'X) ./ (W'(WH) + epsilon).
NonNegMatrix update_h(const NonNegMatrix& X, const NonNegMatrix& W,
                      const NonNegMatrix& H, double epsilon);

/// One multiplicative W step: W' = W .* (XH') ./ ((WH)H' + epsilon).
NonNegMatrix update_w(const NonNegMatrix& X, const NonNegMatrix& W,
                      const NonNegMatrix& H, double epsilon);

/// Alternating multiplicative updates (H then W per iteration) until the
/// relative objective change drops below config.rel_tol or max_iters is hit.
FactorizeResult factorize(const NonNegMatrix& X, Index r, const SolverConfig& config);

/// Iterate only the H update with W frozen; same stopping rule as factorize.
/// H starts uniform-positive from config.seed.
HFitResult fit_h_fixed_w(const NonNegMatrix& X, const NonNegMatrix& W,
                         const SolverConfig& config);

} // namespace anmf
