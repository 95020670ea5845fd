#pragma once

// Test-only brute-force oracles, independent of the simplex-LP implementation
// path they check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mogro/pareto.hpp"

namespace oracles {

// Literal dense arm-weight grid over the (K-1)-simplex with the given step
// denominator: w_j = n_j / steps. Feasible for K <= 3.
inline double effective_gap_arm_grid(const mogro::RewardTable& t, int arm, int steps) {
    const int K = t.K, M = t.M;
    double best = 0.0;
    auto margin_of = [&](const std::vector<double>& w) {
        double worst = std::numeric_limits<double>::infinity();
        for (int m = 0; m < M; ++m) {
            double s = 0.0;
            for (int j = 0; j < K; ++j) s += w[j] * t.at(j, m);
            worst = std::min(worst, s - t.at(arm, m));
        }
        return worst;
    };
    if (K == 1) return 0.0;
    if (K == 2) {
        std::vector<double> w(2);
        for (int i = 0; i <= steps; ++i) {
            w[0] = static_cast<double>(i) / steps;
            w[1] = 1.0 - w[0];
            best = std::max(best, margin_of(w));
        }
        return best;
    }
    if (K == 3) {
        std::vector<double> w(3);
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j <= steps - i; ++j) {
                w[0] = static_cast<double>(i) / steps;
                w[1] = static_cast<double>(j) / steps;
                w[2] = 1.0 - w[0] - w[1];
                best = std::max(best, margin_of(w));
            }
        return best;
    }
    throw std::runtime_error("effective_gap_arm_grid: K > 3 not supported");
}

// Dense objective-weight grid. By LP duality (von Neumann minimax on the
// bilinear form q^T (A w - mu_i)), the same optimum as the arm-weight search:
//   max_{w in simplex_K} min_m ((A w)_m - mu_{i,m})
//     = min_{q in simplex_M} max_j q . (mu_j - mu_i).
// Feasible for M <= 3 at step 1e-3 regardless of K.
inline double effective_gap_dual_grid(const mogro::RewardTable& t, int arm, int steps) {
    const int K = t.K, M = t.M;
    auto value_of = [&](const std::vector<double>& q) {
        double best = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < K; ++j) {
            double s = 0.0;
            for (int m = 0; m < M; ++m) s += q[m] * (t.at(j, m) - t.at(arm, m));
            best = std::max(best, s);
        }
        return best;
    };
    double worst = std::numeric_limits<double>::infinity();
    if (M == 1) {
        worst = value_of({1.0});
    } else if (M == 2) {
        std::vector<double> q(2);
        for (int i = 0; i <= steps; ++i) {
            q[0] = static_cast<double>(i) / steps;
            q[1] = 1.0 - q[0];
            worst = std::min(worst, value_of(q));
        }
    } else if (M == 3) {
        std::vector<double> q(3);
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j <= steps - i; ++j) {
                q[0] = static_cast<double>(i) / steps;
                q[1] = static_cast<double>(j) / steps;
                q[2] = 1.0 - q[0] - q[1];
                worst = std::min(worst, value_of(q));
            }
    } else {
        throw std::runtime_error("effective_gap_dual_grid: M > 3 not supported");
    }
    return std::max(0.0, worst);
}

// Exhaustive pairwise-domination front, written independently of the library.
inline std::vector<int> pareto_front_pairwise(const mogro::RewardTable& t) {
    std::vector<int> front;
    for (int i = 0; i < t.K; ++i) {
        bool dominated = false;
        for (int j = 0; j < t.K; ++j) {
            if (i == j) continue;
            bool all_ge = true, one_gt = false;
            for (int m = 0; m < t.M; ++m) {
                if (t.at(j, m) < t.at(i, m)) all_ge = false;
                if (t.at(j, m) > t.at(i, m)) one_gt = true;
            }
            if (all_ge && one_gt) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(i);
    }
    return front;
}

}  // namespace oracles
