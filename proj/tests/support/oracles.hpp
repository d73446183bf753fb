// Independent reference implementations for the derived test values.
//
// Everything here is deliberately written with plain index loops (no Eigen
// products) and, where an algorithm is being cross-checked, with a different
// algorithm than the library uses (projected gradient vs multiplicative
// updates). Slow is fine; these run on tiny instances.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "anmf/matrix.hpp"

namespace oracle {

using anmf::Index;
using anmf::Matrix;
using anmf::Vector;

// 0.5 * sum over entries of (target - approx)^2, by explicit summation.
inline double loop_objective(const Matrix& target, const Matrix& approx) {
    double acc = 0.0;
    for (Index i = 0; i < target.rows(); ++i) {
        for (Index j = 0; j < target.cols(); ++j) {
            const double diff = target(i, j) - approx(i, j);
            acc += diff * diff;
        }
    }
    return 0.5 * acc;
}

// sum_t W_t * H_t accumulated entry by entry in term order.
inline Matrix loop_reconstruct(const std::vector<Matrix>& Ws,
                               const std::vector<Matrix>& Hs) {
    const Index d = Ws.front().rows();
    const Index n = Hs.front().cols();
    const Index r = Ws.front().cols();
    Matrix S = Matrix::Zero(d, n);
    for (std::size_t t = 0; t < Ws.size(); ++t) {
        for (Index i = 0; i < d; ++i) {
            for (Index j = 0; j < n; ++j) {
                double acc = 0.0;
                for (Index a = 0; a < r; ++a) acc += Ws[t](i, a) * Hs[t](a, j);
                S(i, j) += acc;
            }
        }
    }
    return S;
}

// Multiplicative update of term `t`'s H against the term sum `S`:
// H'(a,j) = H(a,j) * (W_t^T X)(a,j) / ((W_t^T S)(a,j) + eps).
inline Matrix loop_mu_h(const Matrix& X, const Matrix& Wt, const Matrix& Ht,
                        const Matrix& S, double eps) {
    Matrix out(Ht.rows(), Ht.cols());
    for (Index a = 0; a < Ht.rows(); ++a) {
        for (Index j = 0; j < Ht.cols(); ++j) {
            double num = 0.0;
            double den = 0.0;
            for (Index i = 0; i < X.rows(); ++i) {
                num += Wt(i, a) * X(i, j);
                den += Wt(i, a) * S(i, j);
            }
            out(a, j) = Ht(a, j) * num / (den + eps);
        }
    }
    return out;
}

// Mirror update for W: W'(i,a) = W(i,a) * (X H_t^T)(i,a) / ((S H_t^T)(i,a) + eps).
inline Matrix loop_mu_w(const Matrix& X, const Matrix& Wt, const Matrix& Ht,
                        const Matrix& S, double eps) {
    Matrix out(Wt.rows(), Wt.cols());
    for (Index i = 0; i < Wt.rows(); ++i) {
        for (Index a = 0; a < Wt.cols(); ++a) {
            double num = 0.0;
            double den = 0.0;
            for (Index j = 0; j < X.cols(); ++j) {
                num += X(i, j) * Ht(a, j);
                den += S(i, j) * Ht(a, j);
            }
            out(i, a) = Wt(i, a) * num / (den + eps);
        }
    }
    return out;
}

// Central finite differences of a scalar function of a matrix.
template <typename F>
Matrix central_diff(F&& f, const Matrix& at, double step) {
    Matrix grad(at.rows(), at.cols());
    for (Index i = 0; i < at.rows(); ++i) {
        for (Index j = 0; j < at.cols(); ++j) {
            Matrix hi = at;
            Matrix lo = at;
            hi(i, j) += step;
            lo(i, j) -= step;
            grad(i, j) = (f(hi) - f(lo)) / (2.0 * step);
        }
    }
    return grad;
}

// Nonnegative least squares min_{h>=0} 0.5*|x - W h|^2 by projected gradient
// with a fixed safe step 1/|W^T W|_F. A different algorithm from the
// library's multiplicative updates on purpose. Returns the final iterate.
inline Vector pg_nnls(const Matrix& W, const Vector& x, std::size_t iters) {
    const Index r = W.cols();
    const Index d = W.rows();
    Matrix G(r, r); // W^T W
    Vector b(r);    // W^T x
    for (Index a = 0; a < r; ++a) {
        for (Index c = 0; c < r; ++c) {
            double acc = 0.0;
            for (Index i = 0; i < d; ++i) acc += W(i, a) * W(i, c);
            G(a, c) = acc;
        }
        double acc = 0.0;
        for (Index i = 0; i < d; ++i) acc += W(i, a) * x(i);
        b(a) = acc;
    }
    double gnorm = 0.0;
    for (Index a = 0; a < r; ++a)
        for (Index c = 0; c < r; ++c) gnorm += G(a, c) * G(a, c);
    const double step = 1.0 / std::sqrt(gnorm);
    Vector h = Vector::Constant(r, 0.5);
    for (std::size_t n = 0; n < iters; ++n) {
        for (Index a = 0; a < r; ++a) {
            double grad = -b(a);
            for (Index c = 0; c < r; ++c) grad += G(a, c) * h(c);
            h(a) = std::max(0.0, h(a) - step * grad);
        }
    }
    return h;
}

inline double nnls_objective(const Matrix& W, const Vector& x, const Vector& h) {
    double acc = 0.0;
    for (Index i = 0; i < W.rows(); ++i) {
        double ri = x(i);
        for (Index a = 0; a < W.cols(); ++a) ri -= W(i, a) * h(a);
        acc += ri * ri;
    }
    return 0.5 * acc;
}

// Exhaustive k-nearest-neighbor vote: all pairwise distances, stable sort on
// (distance, index), majority with ties to the nearest tied label.
inline std::string brute_knn(const Matrix& train, // N x d
                             const std::vector<std::string>& labels, Index k,
                             const Vector& query) {
    std::vector<std::pair<double, Index>> dist;
    for (Index i = 0; i < train.rows(); ++i) {
        double d2 = 0.0;
        for (Index j = 0; j < train.cols(); ++j) {
            const double diff = train(i, j) - query(j);
            d2 += diff * diff;
        }
        dist.emplace_back(d2, i);
    }
    std::sort(dist.begin(), dist.end());
    std::map<std::string, Index> votes;
    for (Index n = 0; n < k; ++n) votes[labels[static_cast<std::size_t>(dist[n].second)]]++;
    Index best = 0;
    for (const auto& kv : votes) best = std::max(best, kv.second);
    for (Index n = 0; n < k; ++n) { // nearest member of the tied set wins
        const std::string& lab = labels[static_cast<std::size_t>(dist[n].second)];
        if (votes[lab] == best) return lab;
    }
    return {};
}

} // namespace oracle
