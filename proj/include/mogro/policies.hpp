#pragma once

// Arm-selection rules behind one step interface: the MOGRO family (random
// weight, round-robin, and the general subspace-gated version) plus the three
// baselines (epsilon-greedy on the empirical Pareto front, multi-objective
// linear UCB, and optimistic weighted Thompson sampling). All policies share
// the same initial-exploration gate: play the exploration set round-robin
// until the (restricted) minimum eigenvalue of the Gram matrix reaches B.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mogro/errors.hpp"
#include "mogro/goodness.hpp"
#include "mogro/linalg.hpp"
#include "mogro/pareto.hpp"
#include "mogro/rng.hpp"

namespace mogro {

enum class PolicyKind { MogroRW, MogroRR, MogroGeneral, EpsilonGreedy, Ucb, Thompson };

inline std::string policy_kind_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::MogroRW: return "mogro_rw";
        case PolicyKind::MogroRR: return "mogro_rr";
        case PolicyKind::MogroGeneral: return "mogro_general";
        case PolicyKind::EpsilonGreedy: return "epsilon_greedy";
        case PolicyKind::Ucb: return "ucb";
        case PolicyKind::Thompson: return "thompson";
    }
    throw invalid_config("unknown policy kind");
}

inline PolicyKind policy_kind_from_string(const std::string& s) {
    if (s == "mogro_rw") return PolicyKind::MogroRW;
    if (s == "mogro_rr") return PolicyKind::MogroRR;
    if (s == "mogro_general") return PolicyKind::MogroGeneral;
    if (s == "epsilon_greedy") return PolicyKind::EpsilonGreedy;
    if (s == "ucb") return PolicyKind::Ucb;
    if (s == "thompson") return PolicyKind::Thompson;
    throw invalid_config("unknown policy kind: " + s);
}

struct PolicyConfig {
    PolicyKind kind = PolicyKind::MogroRW;
    std::optional<double> b_numeric;  // empty = "theoretical" (resolved by the harness)
    Vector dirichlet_alpha;           // defaults to 1_M when empty
    double epsilon = 0.1;
    double ucb_beta_scale = 1.0;
    double ts_scale = 1.0;
    int ts_samples = 10;
    double alpha = 0.1;  // goodness ball radius for the theoretical B
    double gamma = 0.5;  // goodness level for the theoretical B
    std::string label;   // defaults to the kind name

    std::string name() const { return label.empty() ? policy_kind_name(kind) : label; }
    Vector weight_alpha(int M) const {
        if (dirichlet_alpha.empty()) return Vector(M, 1.0);
        if (static_cast<int>(dirichlet_alpha.size()) != M)
            throw invalid_config("dirichlet_alpha dimension != M");
        return dirichlet_alpha;
    }
};

enum class Phase { Exploring, Greedy };

struct EstimatorState {
    int d = 0;
    int M = 0;
    double B = 0.0;
    Matrix V;
    std::vector<Vector> b;          // per objective, sum of y_m x
    std::vector<Vector> theta_hat;  // refreshed from the greedy transition onward
    long t = 0;                     // rounds completed
    std::vector<int> explore_set;
    int explore_cursor = 0;
    Phase phase = Phase::Exploring;
    bool restricted_gate = false;        // general variant
    std::vector<Vector> span_basis;      // orthonormal basis of the feature span

    double gate_eigenvalue() const {
        return restricted_gate ? restricted_min_eigenvalue(V, span_basis) : min_eigenvalue(V);
    }
};

inline EstimatorState make_estimator(const std::vector<Vector>& features, int M, double B,
                                     bool general = false) {
    if (features.empty()) throw invalid_config("make_estimator: no features");
    EstimatorState st;
    st.d = static_cast<int>(features[0].size());
    st.M = M;
    st.B = B;
    st.V = Matrix(st.d, st.d);
    st.b.assign(M, Vector(st.d, 0.0));
    st.theta_hat.assign(M, Vector(st.d, 0.0));
    st.explore_set = select_exploration_set(features);
    st.span_basis = orthonormalize(features);
    st.restricted_gate = general;
    if (!general && static_cast<int>(st.span_basis.size()) < st.d)
        throw invalid_config(
            "features do not span R^d; use the general (subspace-gated) variant");
    return st;
}

inline void refresh_estimates(EstimatorState& st) {
    for (int m = 0; m < st.M; ++m) st.theta_hat[m] = least_squares_solve(st.V, st.b[m]);
}

inline void observe(EstimatorState& st, const Vector& x, const Vector& y) {
    if (static_cast<int>(x.size()) != st.d) throw invalid_input("observe: feature dim mismatch");
    if (static_cast<int>(y.size()) != st.M) throw invalid_input("observe: reward dim mismatch");
    st.V = gram_update(st.V, x);
    for (int m = 0; m < st.M; ++m)
        for (int i = 0; i < st.d; ++i) st.b[m][i] += y[m] * x[i];
    st.t += 1;
    if (st.phase == Phase::Greedy) refresh_estimates(st);
}

struct StepDiag {
    Phase phase = Phase::Exploring;
    std::optional<Vector> weight;  // sampled scalarization weight, if any
    Vector scores;                 // greedy scores over arms, if any
    double min_eig = 0.0;          // gate eigenvalue at selection time
    int target_objective = -1;     // round-robin target, if any
};

struct StepResult {
    int arm = 0;
    StepDiag diag;
};

namespace detail {

inline int lowest_index_argmax(const Vector& scores) {
    int best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(scores.size()); ++i)
        if (scores[i] > best_v) {
            best_v = scores[i];
            best = i;
        }
    return best;
}

inline int uniform_index(RngStream& rng, int n) {
    const int i = static_cast<int>(rng.uniform01() * n);
    return std::min(i, n - 1);
}

inline Vector weighted_scores(const std::vector<Vector>& contexts,
                              const std::vector<Vector>& thetas, const Vector& w) {
    Vector scores(contexts.size(), 0.0);
    for (size_t i = 0; i < contexts.size(); ++i) {
        double s = 0.0;
        for (size_t m = 0; m < thetas.size(); ++m) s += w[m] * dot(contexts[i], thetas[m]);
        scores[i] = s;
    }
    return scores;
}

inline RewardTable empirical_table(const std::vector<Vector>& contexts,
                                   const std::vector<Vector>& thetas) {
    RewardTable t(static_cast<int>(contexts.size()), static_cast<int>(thetas.size()));
    for (int i = 0; i < t.K; ++i)
        for (int m = 0; m < t.M; ++m) t.at(i, m) = dot(contexts[i], thetas[m]);
    return t;
}

// V^{-p} factor through the eigendecomposition (V is PSD and nonsingular
// after exploration).
inline Matrix inverse_power(const Matrix& V, double power) {
    const EigenDecomposition ed = jacobi_eigen(V);
    const int n = V.rows;
    Matrix out(n, n);
    for (int k = 0; k < n; ++k) {
        const double lam = std::max(ed.values[k], 1e-300);
        const double f = std::pow(lam, -power);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out(i, j) += f * ed.vectors(i, k) * ed.vectors(j, k);
    }
    return out;
}

}  // namespace detail

// Per-objective optimistic indices u_{i,m} = x_i . theta_hat_m +
// scale sqrt(log(1+t)) ||x_i||_{V^-1}, evaluated at the upcoming round t+1.
inline RewardTable ucb_index_table(const EstimatorState& st, const PolicyConfig& cfg,
                                   const std::vector<Vector>& contexts) {
    const Matrix Vinv = detail::inverse_power(st.V, 1.0);
    const double bonus_scale =
        cfg.ucb_beta_scale * std::sqrt(std::log(1.0 + static_cast<double>(st.t + 1)));
    RewardTable t(static_cast<int>(contexts.size()), st.M);
    for (int i = 0; i < t.K; ++i) {
        const Vector vx = matvec(Vinv, contexts[i]);
        const double wnorm = std::sqrt(std::max(0.0, dot(contexts[i], vx)));
        for (int m = 0; m < st.M; ++m)
            t.at(i, m) = dot(contexts[i], st.theta_hat[m]) + bonus_scale * wnorm;
    }
    return t;
}

inline StepResult policy_step(EstimatorState& st, const PolicyConfig& cfg,
                              const std::vector<Vector>& contexts, RngStream& rng) {
    if (contexts.empty()) throw invalid_input("policy_step: no contexts");
    for (const Vector& x : contexts)
        if (static_cast<int>(x.size()) != st.d)
            throw invalid_input("policy_step: context dimension mismatch");

    StepResult res;
    res.diag.min_eig = st.gate_eigenvalue();

    if (st.phase == Phase::Exploring && res.diag.min_eig >= st.B) {
        st.phase = Phase::Greedy;
        refresh_estimates(st);
    }
    res.diag.phase = st.phase;

    if (st.phase == Phase::Exploring) {
        res.arm = st.explore_set[st.explore_cursor];
        st.explore_cursor = (st.explore_cursor + 1) % static_cast<int>(st.explore_set.size());
        return res;
    }

    const int K = static_cast<int>(contexts.size());
    switch (cfg.kind) {
        case PolicyKind::MogroRW:
        case PolicyKind::MogroGeneral: {
            const Vector w = rng.dirichlet(cfg.weight_alpha(st.M));
            res.diag.weight = w;
            res.diag.scores = detail::weighted_scores(contexts, st.theta_hat, w);
            res.arm = detail::lowest_index_argmax(res.diag.scores);
            return res;
        }
        case PolicyKind::MogroRR: {
            const long round = st.t + 1;
            int m = static_cast<int>(round % st.M);
            if (m == 0) m = st.M;
            res.diag.target_objective = m - 1;
            Vector scores(K, 0.0);
            for (int i = 0; i < K; ++i) scores[i] = dot(contexts[i], st.theta_hat[m - 1]);
            res.diag.scores = std::move(scores);
            res.arm = detail::lowest_index_argmax(res.diag.scores);
            return res;
        }
        case PolicyKind::EpsilonGreedy: {
            if (rng.uniform01() < cfg.epsilon) {
                res.arm = detail::uniform_index(rng, K);
                return res;
            }
            const RewardTable t = detail::empirical_table(contexts, st.theta_hat);
            const std::vector<int> front = pareto_front(t);
            res.arm = front[detail::uniform_index(rng, static_cast<int>(front.size()))];
            return res;
        }
        case PolicyKind::Ucb: {
            const RewardTable t = ucb_index_table(st, cfg, contexts);
            const std::vector<int> front = pareto_front(t);
            res.arm = front[detail::uniform_index(rng, static_cast<int>(front.size()))];
            return res;
        }
        case PolicyKind::Thompson: {
            const Vector w = rng.dirichlet(cfg.weight_alpha(st.M));
            res.diag.weight = w;
            const Matrix root = detail::inverse_power(st.V, 0.5);
            const int S = std::max(1, cfg.ts_samples);
            Vector scores(K, 0.0);
            std::vector<Vector> tilde(S, Vector(st.d, 0.0));
            for (int m = 0; m < st.M; ++m) {
                for (int s = 0; s < S; ++s) {
                    Vector z(st.d);
                    for (int i = 0; i < st.d; ++i) z[i] = rng.standard_normal();
                    const Vector noise = matvec(root, z);
                    for (int i = 0; i < st.d; ++i)
                        tilde[s][i] = st.theta_hat[m][i] + cfg.ts_scale * noise[i];
                }
                for (int i = 0; i < K; ++i) {
                    double best = -std::numeric_limits<double>::infinity();
                    for (int s = 0; s < S; ++s) best = std::max(best, dot(contexts[i], tilde[s]));
                    scores[i] += w[m] * best;
                }
            }
            res.diag.scores = std::move(scores);
            res.arm = detail::lowest_index_argmax(res.diag.scores);
            return res;
        }
    }
    throw invalid_config("policy_step: unknown policy kind");
}

}  // namespace mogro
