#include "anmf/nmf.hpp"

#include <cmath>
#include <limits>

#include "anmf/rng.hpp"

namespace anmf {

void SolverConfig::validate() const {
    if (max_iters < 1) throw ConfigError("SolverConfig: max_iters must be >= 1");
    if (!(rel_tol > 0.0)) throw ConfigError("SolverConfig: rel_tol must be > 0");
    if (!(epsilon > 0.0)) throw ConfigError("SolverConfig: epsilon must be > 0");
    if (!(init_scale > 0.0)) throw ConfigError("SolverConfig: init_scale must be > 0");
}

Factorization::Factorization(NonNegMatrix W, NonNegMatrix H)
    : W_(std::move(W)), H_(std::move(H)) {
    if (W_.cols() != H_.rows()) {
        throw DimensionError("Factorization: W is " +
                             detail::shape_string(W_.rows(), W_.cols()) +
                             " but H is " +
                             detail::shape_string(H_.rows(), H_.cols()));
    }
}

namespace detail {

Matrix mu_step_h(const Matrix& X, const Matrix& W, const Matrix& H,
                 const Matrix& recon, double epsilon) {
    const Matrix numer = W.transpose() * X;
    const Matrix denom = W.transpose() * recon;
    return H.array() * (numer.array() / (denom.array() + epsilon));
}

Matrix mu_step_w(const Matrix& X, const Matrix& W, const Matrix& H,
                 const Matrix& recon, double epsilon) {
    const Matrix numer = X * H.transpose();
    const Matrix denom = recon * H.transpose();
    return W.array() * (numer.array() / (denom.array() + epsilon));
}

double relative_change(double prev, double curr) {
    // Guarded denominator: behaves like an absolute tolerance once the
    // objective drops below 1, so runs that fit their data near-exactly can
    // still terminate instead of chasing the multiplicative updates'
    // sublinear tail forever.
    return std::abs(prev - curr) / std::max(1.0, prev);
}

void require_factor_shapes(const char* op, const Matrix& X, const Matrix& W,
                           const Matrix& H) {
    if (W.rows() != X.rows() || H.cols() != X.cols() || W.cols() != H.rows()) {
        throw DimensionError(std::string(op) + ": X " +
                             shape_string(X.rows(), X.cols()) + ", W " +
                             shape_string(W.rows(), W.cols()) + ", H " +
                             shape_string(H.rows(), H.cols()) + " do not conform");
    }
}

} // namespace detail

Factorization init_factors(Index d, Index r, Index N, const SolverConfig& config) {
    config.validate();
    if (d < 1 || r < 1 || N < 1) {
        throw DimensionError("init_factors: dimensions must be >= 1, got d=" +
                             std::to_string(d) + " r=" + std::to_string(r) +
                             " N=" + std::to_string(N));
    }
    SeededRng rng(config.seed);
    Matrix W(d, r);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < r; ++j) W(i, j) = config.init_scale * rng.unit_positive();
    Matrix H(r, N);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < N; ++j) H(i, j) = config.init_scale * rng.unit_positive();
    return {NonNegMatrix(std::move(W)), NonNegMatrix(std::move(H))};
}

NonNegMatrix update_h(const NonNegMatrix& X, const NonNegMatrix& W,
                      const NonNegMatrix& H, double epsilon) {
    detail::require_factor_shapes("update_h", X.value(), W.value(), H.value());
    const Matrix recon = W.value() * H.value();
    return NonNegMatrix(detail::mu_step_h(X.value(), W.value(), H.value(), recon, epsilon));
}

NonNegMatrix update_w(const NonNegMatrix& X, const NonNegMatrix& W,
                      const NonNegMatrix& H, double epsilon) {
    detail::require_factor_shapes("update_w", X.value(), W.value(), H.value());
    const Matrix recon = W.value() * H.value();
    return NonNegMatrix(detail::mu_step_w(X.value(), W.value(), H.value(), recon, epsilon));
}

FactorizeResult factorize(const NonNegMatrix& X, Index r, const SolverConfig& config) {
    config.validate();
    Factorization init = init_factors(X.rows(), r, X.cols(), config);
    Matrix W = init.W().value();
    Matrix H = init.H().value();

    ConvergenceTrace trace;
    trace.objective_values.reserve(std::min<std::size_t>(config.max_iters, 1 << 20));
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
        H = detail::mu_step_h(X.value(), W, H, W * H, config.epsilon);
        W = detail::mu_step_w(X.value(), W, H, W * H, config.epsilon);
        const double obj = frobenius_error(X.value(), W * H);
        if (!std::isfinite(obj)) {
            throw NumericError("factorize: objective became non-finite at iteration " +
                               std::to_string(iter + 1));
        }
        trace.objective_values.push_back(obj);
        if (std::isfinite(prev) && detail::relative_change(prev, obj) < config.rel_tol) {
            trace.converged = true;
            break;
        }
        prev = obj;
    }
    return {Factorization(NonNegMatrix(std::move(W)), NonNegMatrix(std::move(H))),
            std::move(trace)};
}

HFitResult fit_h_fixed_w(const NonNegMatrix& X, const NonNegMatrix& W,
                         const SolverConfig& config) {
    config.validate();
    if (W.rows() != X.rows()) {
        throw DimensionError("fit_h_fixed_w: X has " + std::to_string(X.rows()) +
                             " rows but W has " + std::to_string(W.rows()));
    }
    const Index r = W.cols();
    const Index N = X.cols();
    SeededRng rng(config.seed);
    Matrix H(r, N);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < N; ++j) H(i, j) = config.init_scale * rng.unit_positive();

    ConvergenceTrace trace;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
        H = detail::mu_step_h(X.value(), W.value(), H, W.value() * H, config.epsilon);
        const double obj = frobenius_error(X.value(), W.value() * H);
        if (!std::isfinite(obj)) {
            throw NumericError("fit_h_fixed_w: objective became non-finite at iteration " +
                               std::to_string(iter + 1));
        }
        trace.objective_values.push_back(obj);
        if (std::isfinite(prev) && detail::relative_change(prev, obj) < config.rel_tol) {
            trace.converged = true;
            break;
        }
        prev = obj;
    }
    return {NonNegMatrix(std::move(H)), std::move(trace)};
}

} // namespace anmf
