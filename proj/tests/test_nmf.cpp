#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "anmf/errors.hpp"
#include "anmf/nmf.hpp"
#include "anmf/rng.hpp"
#include "support/oracles.hpp"

using namespace anmf;

namespace {

NonNegMatrix random_nonneg(Index rows, Index cols, std::uint64_t seed,
                           double lo = 0.0, double hi = 1.0) {
    SeededRng rng(seed);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = lo + (hi - lo) * rng.unit_positive();
    return NonNegMatrix(std::move(m));
}

SolverConfig fixed_iterations(std::size_t iters, std::uint64_t seed = 0) {
    SolverConfig cfg;
    cfg.max_iters = iters;
    cfg.rel_tol = 1e-300; // never triggers; run the full budget
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("SolverConfig rejects out-of-range fields") {
    SolverConfig cfg;
    cfg.max_iters = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.epsilon = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.init_scale = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_NOTHROW(SolverConfig{}.validate());
}

TEST_CASE("init_factors is deterministic under a fixed seed") {
    SolverConfig cfg;
    cfg.seed = 7;
    const Factorization a = init_factors(3, 2, 4, cfg);
    const Factorization b = init_factors(3, 2, 4, cfg);
    CHECK(a.W().value() == b.W().value());
    CHECK(a.H().value() == b.H().value());
}

TEST_CASE("init_factors entries lie in (0, init_scale]") {
    SolverConfig cfg;
    cfg.seed = 3;
    cfg.init_scale = 0.25;
    const Factorization f = init_factors(5, 4, 6, cfg);
    CHECK(f.W().value().minCoeff() > 0.0);
    CHECK(f.H().value().minCoeff() > 0.0);
    CHECK(f.W().value().maxCoeff() <= 0.25);
    CHECK(f.H().value().maxCoeff() <= 0.25);
}

TEST_CASE("init_factors reproduces the documented generator sequence") {
    // Standalone re-derivation: top 53 bits of each mt19937_64 word, +1,
    // scaled by 2^-53; W filled row-major first, then H.
    std::mt19937_64 engine(1);
    auto draw = [&]() {
        return static_cast<double>((engine() >> 11) + 1) * 0x1.0p-53;
    };
    Matrix expectW(2, 2), expectH(2, 2);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) expectW(i, j) = draw();
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) expectH(i, j) = draw();

    SolverConfig cfg;
    cfg.seed = 1;
    const Factorization f = init_factors(2, 2, 2, cfg);
    CHECK(f.W().value() == expectW);
    CHECK(f.H().value() == expectH);
}

TEST_CASE("update_h holds an exact positive factorization fixed") {
    const NonNegMatrix X(Matrix::Constant(1, 1, 2.0));
    const NonNegMatrix W(Matrix::Constant(1, 1, 1.0));
    const NonNegMatrix H(Matrix::Constant(1, 1, 2.0));
    const NonNegMatrix out = update_h(X, W, H, 1e-12);
    CHECK(std::abs(out(0, 0) - 2.0) / 2.0 <= 1e-12);
}

TEST_CASE("update_w holds an exact positive factorization fixed") {
    const NonNegMatrix X(Matrix::Constant(1, 1, 2.0));
    const NonNegMatrix W(Matrix::Constant(1, 1, 1.0));
    const NonNegMatrix H(Matrix::Constant(1, 1, 2.0));
    const NonNegMatrix out = update_w(X, W, H, 1e-12);
    CHECK(std::abs(out(0, 0) - 1.0) <= 1e-12);
}

TEST_CASE("zero entries stay zero under both updates") {
    const NonNegMatrix X = random_nonneg(3, 4, 5);
    Matrix Wm = random_nonneg(3, 2, 6).value();
    Matrix Hm = random_nonneg(2, 4, 7).value();
    Hm(1, 2) = 0.0;
    Wm(0, 1) = 0.0;
    const NonNegMatrix W(Wm), H(Hm);
    CHECK(update_h(X, W, H, 1e-12)(1, 2) == 0.0);
    CHECK(update_w(X, W, H, 1e-12)(0, 1) == 0.0);
}

TEST_CASE("200 alternating updates match a straight-loop oracle") {
    const NonNegMatrix X = random_nonneg(4, 6, 42);
    const double eps = 1e-12;
    SolverConfig cfg = fixed_iterations(200, 8);
    const Factorization init = init_factors(4, 2, 6, cfg);

    // library side
    NonNegMatrix W = init.W();
    NonNegMatrix H = init.H();
    std::vector<double> lib;
    for (int n = 0; n < 200; ++n) {
        H = update_h(X, W, H, eps);
        W = update_w(X, W, H, eps);
        lib.push_back(frobenius_error(X.value(), W.value() * H.value()));
    }

    // oracle side, fully independent arithmetic
    Matrix Wo = init.W().value();
    Matrix Ho = init.H().value();
    for (int n = 0; n < 200; ++n) {
        Ho = oracle::loop_mu_h(X.value(), Wo, Ho, oracle::loop_reconstruct({Wo}, {Ho}),
                               eps);
        Wo = oracle::loop_mu_w(X.value(), Wo, Ho, oracle::loop_reconstruct({Wo}, {Ho}),
                               eps);
        const double obj =
            oracle::loop_objective(X.value(), oracle::loop_reconstruct({Wo}, {Ho}));
        CHECK(std::abs(obj - lib[static_cast<std::size_t>(n)]) <=
              1e-12 * std::max(1.0, obj));
    }
}

TEST_CASE("factorize drives a planted 4x2 * 2x8 product below 1e-6") {
    const NonNegMatrix Wstar = random_nonneg(4, 2, 100, 0.1, 1.0);
    const NonNegMatrix Hstar = random_nonneg(2, 8, 101, 0.1, 1.0);
    const NonNegMatrix X(Wstar.value() * Hstar.value());
    SolverConfig cfg = fixed_iterations(5000, 1);
    const FactorizeResult res = factorize(X, 2, cfg);
    CHECK(res.trace.final_objective() < 1e-6);
}

TEST_CASE("factorize solves the rank-1 outer-product case below 1e-8") {
    const NonNegMatrix u = random_nonneg(5, 1, 200, 0.2, 1.0);
    const NonNegMatrix v = random_nonneg(1, 7, 201, 0.2, 1.0);
    const NonNegMatrix X(u.value() * v.value());
    SolverConfig cfg = fixed_iterations(20000, 2);
    const FactorizeResult res = factorize(X, 1, cfg);
    CHECK(res.trace.final_objective() < 1e-8);
}

TEST_CASE("factorize with max_iters=1 runs exactly one iteration, not converged") {
    const NonNegMatrix X = random_nonneg(3, 5, 9);
    SolverConfig cfg;
    cfg.max_iters = 1;
    cfg.seed = 4;
    const FactorizeResult res = factorize(X, 2, cfg);
    CHECK(res.trace.iterations_run() == 1);
    CHECK_FALSE(res.trace.converged);
}

TEST_CASE("factorize objective is non-increasing within 1e-12 and factors stay nonnegative") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const NonNegMatrix X = random_nonneg(6, 10, 300 + seed);
        SolverConfig cfg = fixed_iterations(300, seed);
        const FactorizeResult res = factorize(X, 3, cfg);
        const auto& obj = res.trace.objective_values;
        for (std::size_t n = 1; n < obj.size(); ++n) CHECK(obj[n] <= obj[n - 1] + 1e-12);
        CHECK(res.factorization.W().value().minCoeff() >= 0.0);
        CHECK(res.factorization.H().value().minCoeff() >= 0.0);
    }
}

TEST_CASE("factorize is bit-deterministic for identical inputs") {
    const NonNegMatrix X = random_nonneg(5, 9, 77);
    SolverConfig cfg = fixed_iterations(50, 13);
    const FactorizeResult a = factorize(X, 3, cfg);
    const FactorizeResult b = factorize(X, 3, cfg);
    CHECK(a.factorization.W().value() == b.factorization.W().value());
    CHECK(a.factorization.H().value() == b.factorization.H().value());
    CHECK(a.trace.objective_values == b.trace.objective_values);
}

TEST_CASE("fit_h_fixed_w recovers codes under an invertible-like dictionary") {
    // Scaled permutation: trivially full rank, so W H can match X exactly.
    Matrix Wm = Matrix::Zero(3, 3);
    Wm(0, 2) = 2.0;
    Wm(1, 0) = 0.5;
    Wm(2, 1) = 1.5;
    const NonNegMatrix W(Wm);
    const NonNegMatrix X = random_nonneg(3, 4, 55, 0.1, 1.0);
    SolverConfig cfg = fixed_iterations(20000, 6);
    const HFitResult res = fit_h_fixed_w(X, W, cfg);
    CHECK(frobenius_error(X.value(), W.value() * res.H.value()) < 1e-8);
}

TEST_CASE("fit_h_fixed_w reproduces a planted W H* to objective below 1e-6") {
    const NonNegMatrix W = random_nonneg(6, 3, 60, 0.1, 1.0);
    const NonNegMatrix Hstar = random_nonneg(3, 5, 61, 0.1, 1.0);
    const NonNegMatrix X(W.value() * Hstar.value());
    SolverConfig cfg = fixed_iterations(20000, 3);
    const HFitResult res = fit_h_fixed_w(X, W, cfg);
    CHECK(frobenius_error(X.value(), W.value() * res.H.value()) < 1e-6);
}

TEST_CASE("fit_h_fixed_w rejects max_iters=0 before touching data") {
    const NonNegMatrix X = random_nonneg(3, 3, 1);
    const NonNegMatrix W = random_nonneg(3, 2, 2);
    SolverConfig cfg;
    cfg.max_iters = 0;
    CHECK_THROWS_AS((void)fit_h_fixed_w(X, W, cfg), ConfigError);
}

TEST_CASE("the H-gradient -W'(X - WH) matches central finite differences") {
    const NonNegMatrix X = random_nonneg(5, 6, 500);
    const Matrix W = random_nonneg(5, 3, 501).value();
    const Matrix H = random_nonneg(3, 6, 502).value();
    const Matrix analytic = -W.transpose() * (X.value() - W * H);
    const Matrix numeric = oracle::central_diff(
        [&](const Matrix& Hc) { return oracle::loop_objective(X.value(), W * Hc); }, H,
        1e-6);
    for (Index i = 0; i < analytic.rows(); ++i)
        for (Index j = 0; j < analytic.cols(); ++j)
            CHECK(std::abs(analytic(i, j) - numeric(i, j)) <=
                  1e-6 * std::max(1.0, std::abs(analytic(i, j))));
}

TEST_CASE("shape mismatches are rejected at entry") {
    const NonNegMatrix X = random_nonneg(4, 5, 1);
    const NonNegMatrix W = random_nonneg(3, 2, 2); // wrong row count
    const NonNegMatrix H = random_nonneg(2, 5, 3);
    CHECK_THROWS_AS((void)update_h(X, W, H, 1e-12), DimensionError);
    CHECK_THROWS_AS((void)fit_h_fixed_w(X, W, SolverConfig{}), DimensionError);
}
