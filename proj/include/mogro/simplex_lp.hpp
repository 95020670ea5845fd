#pragma once

// Self-contained dense two-phase primal simplex for the tiny LPs that the
// effective-gap computation needs (a handful of rows, up to a few hundred
// columns). Bland's rule keeps it cycle-free, and the tableau is
// refactorized from the original data between optimization passes so pivot
// round-off cannot accumulate into the reported optimum.

#include <cmath>
#include <vector>

#include "mogro/errors.hpp"

namespace mogro {

struct LpSolution {
    bool feasible = false;
    double value = 0.0;
    std::vector<double> x;
};

namespace detail {

class SimplexTableau {
public:
    // maximize c.x  s.t.  A x = b, x >= 0   (b made nonnegative by row flips)
    SimplexTableau(std::vector<std::vector<double>> A, std::vector<double> b,
                   std::vector<double> c)
        : m_(static_cast<int>(A.size())), n_(static_cast<int>(c.size())), c_(std::move(c)) {
        for (int i = 0; i < m_; ++i) {
            if (b[i] < 0.0) {
                b[i] = -b[i];
                for (double& v : A[i]) v = -v;
            }
        }
        // extended column matrix [A | I] (artificials at n_..n_+m_-1)
        ext_.assign(m_, std::vector<double>(n_ + m_, 0.0));
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) ext_[i][j] = A[i][j];
            ext_[i][n_ + i] = 1.0;
        }
        b_ = std::move(b);
        double scale = 1.0;
        for (const auto& row : ext_)
            for (double v : row) scale = std::max(scale, std::abs(v));
        tol_ = 1e-12 * scale;
    }

    LpSolution solve() {
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
        refactor();

        std::vector<double> phase1_cost(n_ + m_, 0.0);
        for (int i = 0; i < m_; ++i) phase1_cost[n_ + i] = -1.0;
        if (!optimize_refactored(phase1_cost, /*allow_artificials=*/true)) return {};
        double art = 0.0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= n_) art += rhs_[i];
        if (art > 1e-7) return {};  // infeasible

        // Drive leftover zero-level artificials out of the basis.
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            int piv = -1;
            for (int j = 0; j < n_; ++j)
                if (std::abs(tab_[i][j]) > 1e-9) { piv = j; break; }
            if (piv >= 0) pivot(i, piv);
        }

        std::vector<double> phase2_cost(n_ + m_, 0.0);
        for (int j = 0; j < n_; ++j) phase2_cost[j] = c_[j];
        if (!optimize_refactored(phase2_cost, /*allow_artificials=*/false)) return {};

        LpSolution sol;
        sol.feasible = true;
        sol.x.assign(n_, 0.0);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_) sol.x[basis_[i]] = std::max(0.0, rhs_[i]);
        sol.value = 0.0;
        for (int j = 0; j < n_; ++j) sol.value += c_[j] * sol.x[j];
        return sol;
    }

private:
    // Rebuild tab_ = B^{-1} ext_ and rhs_ = B^{-1} b from the original data
    // for the current basis, via Gauss-Jordan with partial pivoting.
    void refactor() {
        std::vector<std::vector<double>> aug(m_, std::vector<double>(n_ + m_ + 1, 0.0));
        // permute rows so that row i carries basis column i; start from the
        // basis columns as the left block to invert
        std::vector<std::vector<double>> B(m_, std::vector<double>(m_));
        for (int i = 0; i < m_; ++i)
            for (int k = 0; k < m_; ++k) B[i][k] = ext_[i][basis_[k]];
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_ + m_; ++j) aug[i][j] = ext_[i][j];
            aug[i][n_ + m_] = b_[i];
        }
        // eliminate: reduce B to identity applying the same ops to aug
        for (int col = 0; col < m_; ++col) {
            int piv = col;
            for (int r = col + 1; r < m_; ++r)
                if (std::abs(B[r][col]) > std::abs(B[piv][col])) piv = r;
            if (std::abs(B[piv][col]) < 1e-300) continue;  // singular basis; keep going
            std::swap(B[piv], B[col]);
            std::swap(aug[piv], aug[col]);
            const double p = B[col][col];
            for (double& v : B[col]) v /= p;
            for (double& v : aug[col]) v /= p;
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                const double f = B[r][col];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) B[r][k] -= f * B[col][k];
                for (size_t k = 0; k < aug[r].size(); ++k) aug[r][k] -= f * aug[col][k];
            }
        }
        tab_.assign(m_, std::vector<double>(n_ + m_, 0.0));
        rhs_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_ + m_; ++j) tab_[i][j] = aug[i][j];
            rhs_[i] = aug[i][n_ + m_];
        }
    }

    void pivot(int row, int col) {
        const double p = tab_[row][col];
        for (double& v : tab_[row]) v /= p;
        rhs_[row] /= p;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double f = tab_[i][col];
            if (f == 0.0) continue;
            for (size_t j = 0; j < tab_[i].size(); ++j) tab_[i][j] -= f * tab_[row][j];
            rhs_[i] -= f * rhs_[row];
        }
        basis_[row] = col;
    }

    // One sweep of Bland-rule pivots on the current tableau. Returns +1 when
    // it stopped at (apparent) optimality, -1 on unboundedness, 0 when the
    // iteration budget ran out.
    int optimize(const std::vector<double>& cost, bool allow_artificials) {
        const int ncols = allow_artificials ? n_ + m_ : n_;
        const long max_iters = 2000L + 50L * static_cast<long>(ncols);
        for (long iter = 0; iter < max_iters; ++iter) {
            std::vector<double> y(m_);
            for (int i = 0; i < m_; ++i) y[i] = cost[basis_[i]];
            int enter = -1;
            for (int j = 0; j < ncols; ++j) {
                double r = cost[j];
                for (int i = 0; i < m_; ++i) r -= y[i] * tab_[i][j];
                if (r > tol_ + 1e-11) { enter = j; break; }  // Bland: lowest index
            }
            if (enter < 0) return 1;
            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m_; ++i) {
                if (tab_[i][enter] > tol_) {
                    const double ratio = std::max(0.0, rhs_[i]) / tab_[i][enter];
                    if (leave < 0 || ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 && basis_[i] < basis_[leave])) {
                        leave = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave < 0) return -1;
            pivot(leave, enter);
        }
        return 0;
    }

    // Optimize, refactorize from the original data, and re-check; repeat
    // until a freshly refactorized tableau declares optimality.
    bool optimize_refactored(const std::vector<double>& cost, bool allow_artificials) {
        for (int round = 0; round < 8; ++round) {
            const int status = optimize(cost, allow_artificials);
            if (status < 0) return false;  // unbounded
            std::vector<int> before = basis_;
            refactor();
            if (status > 0) {
                // confirm on the clean tableau: any remaining improving column?
                std::vector<double> y(m_);
                for (int i = 0; i < m_; ++i) y[i] = cost[basis_[i]];
                bool improving = false;
                const int ncols = allow_artificials ? n_ + m_ : n_;
                for (int j = 0; j < ncols && !improving; ++j) {
                    double r = cost[j];
                    for (int i = 0; i < m_; ++i) r -= y[i] * tab_[i][j];
                    if (r > tol_ + 1e-11) improving = true;
                }
                if (!improving) return true;
            }
        }
        return true;  // best effort after the refactorization budget
    }

    int m_, n_;
    std::vector<std::vector<double>> ext_;
    std::vector<double> b_, c_;
    std::vector<std::vector<double>> tab_;
    std::vector<double> rhs_;
    std::vector<int> basis_;
    double tol_ = 1e-12;
};

}  // namespace detail

inline LpSolution solve_lp_max(const std::vector<std::vector<double>>& A,
                               const std::vector<double>& b, const std::vector<double>& c) {
    if (A.size() != b.size()) throw invalid_input("solve_lp_max: row count mismatch");
    for (const auto& row : A)
        if (row.size() != c.size()) throw invalid_input("solve_lp_max: column count mismatch");
    detail::SimplexTableau t(A, b, c);
    return t.solve();
}

}  // namespace mogro
