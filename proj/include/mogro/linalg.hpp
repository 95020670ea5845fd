#pragma once

// Dense small-matrix linear algebra: symmetric eigensolver (cyclic Jacobi),
// Gram updates, minimum-norm least squares. Everything here assumes small
// dimensions (d <= 256); no attempt is made at cache blocking or sparsity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "mogro/errors.hpp"

namespace mogro {

using Vector = std::vector<double>;

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;  // row-major

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline double dot(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw invalid_input("dot: dimension mismatch");
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

inline double norm2(const Vector& x) { return std::sqrt(std::max(0.0, dot(x, x))); }

inline Vector scaled(const Vector& x, double s) {
    Vector y = x;
    for (double& v : y) v *= s;
    return y;
}

inline Vector matvec(const Matrix& A, const Vector& x) {
    if (static_cast<int>(x.size()) != A.cols) throw invalid_input("matvec: dimension mismatch");
    Vector y(A.rows, 0.0);
    for (int i = 0; i < A.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < A.cols; ++j) s += A(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline bool has_nan(const Matrix& A) {
    return std::any_of(A.a.begin(), A.a.end(), [](double v) { return std::isnan(v); });
}

inline void require_symmetric(const Matrix& A, const char* who) {
    if (A.rows != A.cols) throw invalid_input(std::string(who) + ": matrix not square");
    if (has_nan(A)) throw invalid_input(std::string(who) + ": NaN entries");
    for (int i = 0; i < A.rows; ++i)
        for (int j = i + 1; j < A.cols; ++j)
            if (std::abs(A(i, j) - A(j, i)) > 1e-9)
                throw invalid_input(std::string(who) + ": matrix not symmetric");
}

struct EigenDecomposition {
    Vector values;   // ascending
    Matrix vectors;  // column k is the eigenvector of values[k]
};

// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
// Plenty accurate (well below 1e-10 relative) for the d <= 256 sizes used here.
inline EigenDecomposition jacobi_eigen(Matrix A) {
    require_symmetric(A, "jacobi_eigen");
    const int n = A.rows;
    if (n > 256) throw invalid_input("jacobi_eigen: dimension > 256");
    Matrix V = Matrix::identity(n);
    if (n == 1) return {{A(0, 0)}, V};

    auto off_diag = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += A(i, j) * A(i, j);
        return s;
    };

    double scale = 0.0;
    for (double v : A.a) scale = std::max(scale, std::abs(v));
    const double tol = std::max(1e-300, 1e-26 * scale * scale);

    for (int sweep = 0; sweep < 100 && off_diag() > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return A(i, i) < A(j, j); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = A(order[k], order[k]);
        for (int i = 0; i < n; ++i) out.vectors(i, k) = V(i, order[k]);
    }
    return out;
}

inline double min_eigenvalue(const Matrix& A) {
    require_symmetric(A, "min_eigenvalue");
    return jacobi_eigen(A).values.front();
}

inline double max_eigenvalue(const Matrix& A) {
    require_symmetric(A, "max_eigenvalue");
    return jacobi_eigen(A).values.back();
}

// Modified Gram-Schmidt. Returns an orthonormal basis of span(vs); vectors
// whose residual falls below tol are dropped.
inline std::vector<Vector> orthonormalize(const std::vector<Vector>& vs, double tol = 1e-10) {
    std::vector<Vector> basis;
    for (const Vector& v : vs) {
        Vector r = v;
        for (const Vector& b : basis) {
            const double c = dot(r, b);
            for (size_t i = 0; i < r.size(); ++i) r[i] -= c * b[i];
        }
        // second pass for numerical orthogonality
        for (const Vector& b : basis) {
            const double c = dot(r, b);
            for (size_t i = 0; i < r.size(); ++i) r[i] -= c * b[i];
        }
        const double nr = norm2(r);
        if (nr > tol) basis.push_back(scaled(r, 1.0 / nr));
    }
    return basis;
}

inline int rank_of(const std::vector<Vector>& vs, double tol = 1e-10) {
    return static_cast<int>(orthonormalize(vs, tol).size());
}

// min over unit beta in span(basis) of beta^T A beta, i.e. the smallest
// eigenvalue of the projected operator B^T A B with B an orthonormal basis.
inline double restricted_min_eigenvalue(const Matrix& A, const std::vector<Vector>& basis) {
    require_symmetric(A, "restricted_min_eigenvalue");
    if (basis.empty()) throw invalid_input("restricted_min_eigenvalue: empty basis");
    for (const Vector& b : basis)
        if (static_cast<int>(b.size()) != A.rows)
            throw invalid_input("restricted_min_eigenvalue: basis dimension mismatch");
    std::vector<Vector> on = orthonormalize(basis);
    if (on.size() != basis.size())
        throw invalid_input("restricted_min_eigenvalue: rank-deficient basis");
    const int r = static_cast<int>(on.size());
    Matrix P(r, r);
    for (int i = 0; i < r; ++i) {
        const Vector Abi = matvec(A, on[i]);
        for (int j = 0; j < r; ++j) P(i, j) = dot(on[j], Abi);
    }
    // symmetrize rounding noise before the eigensolve
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            const double m = 0.5 * (P(i, j) + P(j, i));
            P(i, j) = P(j, i) = m;
        }
    return jacobi_eigen(P).values.front();
}

inline Matrix gram_update(const Matrix& V, const Vector& x) {
    require_symmetric(V, "gram_update");
    if (static_cast<int>(x.size()) != V.rows) throw invalid_input("gram_update: dimension mismatch");
    Matrix W = V;
    for (int i = 0; i < V.rows; ++i)
        for (int j = 0; j < V.cols; ++j) W(i, j) += x[i] * x[j];
    return W;
}

// Minimum-norm solution of V theta = b for symmetric PSD V, with spectral
// cutoff 1e-10 * lambda_max. Throws inconsistent_system when b has mass
// outside the retained column space beyond 1e-7 * (1 + ||b||).
inline Vector least_squares_solve(const Matrix& V, const Vector& b) {
    require_symmetric(V, "least_squares_solve");
    if (static_cast<int>(b.size()) != V.rows)
        throw invalid_input("least_squares_solve: dimension mismatch");
    const EigenDecomposition ed = jacobi_eigen(V);
    const int n = V.rows;
    const double lam_max = std::max(0.0, ed.values.back());
    const double cutoff = 1e-10 * std::max(lam_max, 1e-300);
    Vector theta(n, 0.0);
    for (int k = 0; k < n; ++k) {
        if (ed.values[k] <= cutoff) continue;
        double qk_b = 0.0;
        for (int i = 0; i < n; ++i) qk_b += ed.vectors(i, k) * b[i];
        const double coef = qk_b / ed.values[k];
        for (int i = 0; i < n; ++i) theta[i] += coef * ed.vectors(i, k);
    }
    Vector resid = matvec(V, theta);
    for (int i = 0; i < n; ++i) resid[i] -= b[i];
    if (norm2(resid) > 1e-7 * (1.0 + norm2(b)))
        throw inconsistent_system("least_squares_solve: rhs outside column space");
    return theta;
}

inline Matrix gram_of(const std::vector<Vector>& xs, int d) {
    Matrix V(d, d);
    for (const Vector& x : xs) {
        if (static_cast<int>(x.size()) != d) throw invalid_input("gram_of: dimension mismatch");
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) V(i, j) += x[i] * x[j];
    }
    return V;
}

}  // namespace mogro
