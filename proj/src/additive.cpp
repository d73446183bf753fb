#include "anmf/additive.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "anmf/rng.hpp"

namespace anmf {

namespace {

// Term sum in index order; for a single term this is exactly W * H.
Matrix sum_products(const std::vector<Matrix>& Ws, const std::vector<Matrix>& Hs) {
    Matrix S = Ws[0] * Hs[0];
    for (std::size_t i = 1; i < Ws.size(); ++i) S.noalias() += Ws[i] * Hs[i];
    return S;
}

void require_term_index(const char* op, Index j, Index k) {
    if (j < 0 || j >= k) {
        throw IndexError(std::string(op) + ": term index " + std::to_string(j) +
                         " out of range for " + std::to_string(k) + " terms");
    }
}

void require_data_shape(const char* op, const NonNegMatrix& X,
                        const AdditiveFactorization& F) {
    if (X.rows() != F.dim() || X.cols() != F.points()) {
        throw DimensionError(std::string(op) + ": X is " +
                             detail::shape_string(X.rows(), X.cols()) +
                             " but the factorization reconstructs " +
                             detail::shape_string(F.dim(), F.points()));
    }
}

} // namespace

AdditiveFactorization::AdditiveFactorization(std::vector<Factorization> terms)
    : terms_(std::move(terms)) {
    if (terms_.empty()) {
        throw ConfigError("AdditiveFactorization: at least one term is required");
    }
    const Index d = terms_.front().dim();
    const Index N = terms_.front().points();
    const Index r = terms_.front().rank();
    for (std::size_t i = 1; i < terms_.size(); ++i) {
        const Factorization& t = terms_[i];
        if (t.dim() != d || t.points() != N || t.rank() != r) {
            throw DimensionError(
                "AdditiveFactorization: term " + std::to_string(i) + " is " +
                detail::shape_string(t.dim(), t.points()) + " rank " +
                std::to_string(t.rank()) + ", expected " +
                detail::shape_string(d, N) + " rank " + std::to_string(r));
        }
    }
}

const Factorization& AdditiveFactorization::term(Index j) const {
    require_term_index("AdditiveFactorization::term", j, term_count());
    return terms_[static_cast<std::size_t>(j)];
}

Matrix additive_reconstruct(const AdditiveFactorization& F) {
    Matrix S = F.terms().front().reconstruct();
    for (std::size_t i = 1; i < F.terms().size(); ++i) {
        S.noalias() += F.terms()[i].W().value() * F.terms()[i].H().value();
    }
    return S;
}

MultiStageResult multi_stage_factorize(const NonNegMatrix& X, Index r, Index k,
                                       const SolverConfig& config) {
    config.validate();
    if (k < 1) {
        throw ConfigError("multi_stage_factorize: k must be >= 1, got " +
                          std::to_string(k));
    }
    std::vector<Factorization> terms;
    std::vector<ConvergenceTrace> stage_traces;
    terms.reserve(static_cast<std::size_t>(k));
    stage_traces.reserve(static_cast<std::size_t>(k));

    Matrix approx = Matrix::Zero(X.rows(), X.cols());
    for (Index stage = 0; stage < k; ++stage) {
        SolverConfig stage_cfg = config;
        stage_cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(stage));
        // Stage 0 sees X itself; later stages see the clamped residue.
        const NonNegMatrix target =
            stage == 0 ? X : clamp_nonneg(X.value() - approx);
        try {
            FactorizeResult res = factorize(target, r, stage_cfg);
            approx += res.factorization.reconstruct();
            terms.push_back(std::move(res.factorization));
            stage_traces.push_back(std::move(res.trace));
        } catch (const NumericError& e) {
            throw NumericError("multi_stage_factorize: stage " +
                               std::to_string(stage) + ": " + e.what());
        }
    }
    return {AdditiveFactorization(std::move(terms)), std::move(stage_traces)};
}

NonNegMatrix joint_update_term_h(const NonNegMatrix& X, const AdditiveFactorization& F,
                                 Index j, double epsilon) {
    require_term_index("joint_update_term_h", j, F.term_count());
    require_data_shape("joint_update_term_h", X, F);
    const Matrix S = additive_reconstruct(F);
    const Factorization& t = F.term(j);
    return NonNegMatrix(
        detail::mu_step_h(X.value(), t.W().value(), t.H().value(), S, epsilon));
}

NonNegMatrix joint_update_term_w(const NonNegMatrix& X, const AdditiveFactorization& F,
                                 Index j, double epsilon) {
    require_term_index("joint_update_term_w", j, F.term_count());
    require_data_shape("joint_update_term_w", X, F);
    const Matrix S = additive_reconstruct(F);
    const Factorization& t = F.term(j);
    return NonNegMatrix(
        detail::mu_step_w(X.value(), t.W().value(), t.H().value(), S, epsilon));
}

JointFactorizeResult joint_factorize(const NonNegMatrix& X, Index r, Index k,
                                     const SolverConfig& config) {
    config.validate();
    if (k < 1) {
        throw ConfigError("joint_factorize: k must be >= 1, got " + std::to_string(k));
    }
    const Index d = X.rows();
    const Index N = X.cols();
    std::vector<Matrix> Ws(static_cast<std::size_t>(k));
    std::vector<Matrix> Hs(static_cast<std::size_t>(k));
    for (Index j = 0; j < k; ++j) {
        SolverConfig term_cfg = config;
        term_cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(j));
        Factorization init = init_factors(d, r, N, term_cfg);
        Ws[static_cast<std::size_t>(j)] = init.W().value();
        Hs[static_cast<std::size_t>(j)] = init.H().value();
    }

    ConvergenceTrace trace;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
        for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
            // The term sum is recomputed before each step so every update sees
            // the current model; this is what keeps the sweep monotone.
            Hs[j] = detail::mu_step_h(X.value(), Ws[j], Hs[j], sum_products(Ws, Hs),
                                      config.epsilon);
            Ws[j] = detail::mu_step_w(X.value(), Ws[j], Hs[j], sum_products(Ws, Hs),
                                      config.epsilon);
        }
        const double obj = frobenius_error(X.value(), sum_products(Ws, Hs));
        if (!std::isfinite(obj)) {
            throw NumericError("joint_factorize: objective became non-finite at iteration " +
                               std::to_string(iter + 1));
        }
        trace.objective_values.push_back(obj);
        if (std::isfinite(prev) && detail::relative_change(prev, obj) < config.rel_tol) {
            trace.converged = true;
            break;
        }
        prev = obj;
    }

    std::vector<Factorization> terms;
    terms.reserve(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
        terms.emplace_back(NonNegMatrix(std::move(Ws[j])), NonNegMatrix(std::move(Hs[j])));
    }
    return {AdditiveFactorization(std::move(terms)), std::move(trace)};
}

Matrix gradient_term_h(const NonNegMatrix& X, const AdditiveFactorization& F, Index j) {
    require_term_index("gradient_term_h", j, F.term_count());
    require_data_shape("gradient_term_h", X, F);
    const Matrix S = additive_reconstruct(F);
    return -(F.term(j).W().value().transpose() * (X.value() - S));
}

} // namespace anmf
