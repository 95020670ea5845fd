#pragma once

// Pareto and effective-Pareto optimality over a K x M table of expected
// reward vectors. The effective gap of arm i is the value of the max-min
// linear program over arm mixtures w on the (K-1)-simplex:
//
//   maximize t   s.t.   sum_j w_j mu_{j,m} - mu_{i,m} >= t  (m in [M]),
//                       sum_j w_j = 1,  w >= 0.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "mogro/errors.hpp"
#include "mogro/linalg.hpp"
#include "mogro/simplex_lp.hpp"

namespace mogro {

constexpr double kFrontTol = 1e-9;

struct RewardTable {
    int K = 0;
    int M = 0;
    std::vector<double> mu;  // row-major K x M

    RewardTable() = default;
    RewardTable(int k, int m) : K(k), M(m), mu(static_cast<size_t>(k) * m, 0.0) {}

    double& at(int i, int m) { return mu[static_cast<size_t>(i) * M + m]; }
    double at(int i, int m) const { return mu[static_cast<size_t>(i) * M + m]; }

    void check(int i) const {
        if (i < 0 || i >= K) throw invalid_input("RewardTable: arm index out of range");
    }
};

// Expected rewards of every arm under linear means: mu_{i,m} = x_i . theta_m.
inline RewardTable reward_table_of(const std::vector<Vector>& features,
                                   const std::vector<Vector>& objectives) {
    RewardTable t(static_cast<int>(features.size()), static_cast<int>(objectives.size()));
    for (int i = 0; i < t.K; ++i)
        for (int m = 0; m < t.M; ++m) t.at(i, m) = dot(features[i], objectives[m]);
    return t;
}

// u dominates v: componentwise >= with at least one strict.
inline bool dominates(const RewardTable& t, int u, int v) {
    bool strict = false;
    for (int m = 0; m < t.M; ++m) {
        if (t.at(u, m) < t.at(v, m)) return false;
        if (t.at(u, m) > t.at(v, m)) strict = true;
    }
    return strict;
}

inline std::vector<int> pareto_front(const RewardTable& t) {
    std::vector<int> front;
    for (int i = 0; i < t.K; ++i) {
        bool dominated = false;
        for (int j = 0; j < t.K && !dominated; ++j)
            if (j != i && dominates(t, j, i)) dominated = true;
        if (!dominated) front.push_back(i);
    }
    return front;
}

// max(0, max_{j != i} min_m (mu_{j,m} - mu_{i,m}))
inline double pareto_gap(const RewardTable& t, int i) {
    t.check(i);
    double best = 0.0;
    for (int j = 0; j < t.K; ++j) {
        if (j == i) continue;
        double margin = t.at(j, 0) - t.at(i, 0);
        for (int m = 1; m < t.M; ++m) margin = std::min(margin, t.at(j, m) - t.at(i, m));
        best = std::max(best, margin);
    }
    return best;
}

struct GapResult {
    double pareto_gap = 0.0;
    double effective_gap = 0.0;
    std::optional<Vector> witness_weight;  // arm mixture achieving the gap
};

inline GapResult effective_pareto_gap(const RewardTable& t, int i) {
    t.check(i);
    const int K = t.K, M = t.M;
    // variables: w_1..w_K, t+, t-, s_1..s_M. The margin rows are posed in
    // difference form (mu_j - mu_i, rhs 0) so the tableau works at the scale
    // of the gaps instead of the raw rewards.
    const int n = K + 2 + M;
    std::vector<std::vector<double>> A(M + 1, std::vector<double>(n, 0.0));
    std::vector<double> b(M + 1, 0.0);
    std::vector<double> c(n, 0.0);
    for (int m = 0; m < M; ++m) {
        for (int j = 0; j < K; ++j) A[m][j] = t.at(j, m) - t.at(i, m);
        A[m][K] = -1.0;
        A[m][K + 1] = 1.0;
        A[m][K + 2 + m] = -1.0;
        b[m] = 0.0;
    }
    for (int j = 0; j < K; ++j) A[M][j] = 1.0;
    b[M] = 1.0;
    c[K] = 1.0;
    c[K + 1] = -1.0;

    const LpSolution sol = solve_lp_max(A, b, c);
    if (!sol.feasible)
        throw invalid_input("effective_pareto_gap: LP infeasible (corrupt table?)");

    GapResult out;
    out.pareto_gap = pareto_gap(t, i);
    out.effective_gap = std::max(0.0, sol.value);
    if (out.effective_gap > kFrontTol) {
        Vector w(sol.x.begin(), sol.x.begin() + K);
        double s = 0.0;
        for (double& v : w) {
            v = std::max(0.0, v);
            s += v;
        }
        if (s > 0.0)
            for (double& v : w) v /= s;
        out.witness_weight = std::move(w);
    }
    return out;
}

inline std::vector<int> effective_pareto_front(const RewardTable& t) {
    std::vector<int> front;
    for (int i = 0; i < t.K; ++i)
        if (effective_pareto_gap(t, i).effective_gap <= kFrontTol) front.push_back(i);
    return front;
}

// Lowest-index maximizer of sum_m w_m mu_{i,m}; w lives on the objective simplex.
inline int weighted_optimum(const RewardTable& t, const Vector& w) {
    if (static_cast<int>(w.size()) != t.M)
        throw invalid_input("weighted_optimum: weight dimension mismatch");
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < t.K; ++i) {
        double s = 0.0;
        for (int m = 0; m < t.M; ++m) s += w[m] * t.at(i, m);
        if (s > best_score) {
            best_score = s;
            best = i;
        }
    }
    return best;
}

}  // namespace mogro
