#pragma once

// Structural-assumption verification and every analysis constant:
//
//   lambda        = lambda_min((1/M) sum theta theta^T), restricted to the
//                   feature span when the features do not span R^d
//   psi(l, g)     = sqrt(l^2/9 - l^4/324) g - (1 - l^2/18) sqrt(1 - g^2),
//                   the cap on the goodness ball radius alpha
//   lambda_inc    = per-round lower bound on the expected growth of the Gram
//                   matrix's minimum eigenvalue, in all its variants
//   B             = eigenvalue threshold ending initial exploration
//   T0 bound      = ceil(B / lambda_S) * |S| round-robin rounds
//   q_gamma       = stochastic-context goodness level, estimated empirically

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mogro/errors.hpp"
#include "mogro/generators.hpp"
#include "mogro/instance.hpp"
#include "mogro/linalg.hpp"
#include "mogro/metrics.hpp"
#include "mogro/rng.hpp"

namespace mogro {

inline double lambda_of(const std::vector<Vector>& objectives,
                        const std::vector<Vector>* span_basis = nullptr) {
    if (objectives.empty()) throw invalid_input("lambda_of: no objectives");
    const int d = static_cast<int>(objectives[0].size());
    Matrix A = gram_of(objectives, d);
    const double inv_m = 1.0 / static_cast<double>(objectives.size());
    for (double& v : A.a) v *= inv_m;
    if (span_basis) return restricted_min_eigenvalue(A, *span_basis);
    return min_eigenvalue(A);
}

inline double psi_cap(double lambda, double gamma) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw invalid_input("psi_cap: lambda outside (0,1]");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw invalid_input("psi_cap: gamma outside (0,1]");
    const double l2 = lambda * lambda;
    return std::sqrt(l2 / 9.0 - l2 * l2 / 324.0) * gamma -
           (1.0 - l2 / 18.0) * std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
}

enum class LambdaIncVariant { Base, XMax, LowerUpper, Projection, Stochastic };

struct LambdaIncExtras {
    double x_max = 1.0;
    double l = 1.0;
    double L = 1.0;
    double q_gamma = 1.0;
};

inline LambdaIncVariant lambda_inc_variant_from_string(const std::string& s) {
    if (s == "base") return LambdaIncVariant::Base;
    if (s == "x_max") return LambdaIncVariant::XMax;
    if (s == "lL") return LambdaIncVariant::LowerUpper;
    if (s == "projection") return LambdaIncVariant::Projection;
    if (s == "stochastic") return LambdaIncVariant::Stochastic;
    throw invalid_config("unknown lambda_inc variant: " + s);
}

// Distance bound of a gamma-good arm from the objective it serves.
inline double good_arm_distance_bound(double alpha, double gamma) {
    const double inner = 2.0 + 2.0 * alpha * std::sqrt(std::max(0.0, 1.0 - gamma * gamma)) -
                         2.0 * gamma * std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
    return std::sqrt(std::max(0.0, inner));
}

// Variant of the distance bound under ||x|| <= x_max: bound on ||theta - x/gamma||.
inline double good_arm_distance_bound_xmax(double alpha, double gamma, double x_max) {
    const double r = x_max / gamma;
    const double inner = 1.0 + r * r + 2.0 * alpha * std::sqrt(std::max(0.0, r * r - 1.0)) -
                         2.0 * std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
    return std::sqrt(std::max(0.0, inner));
}

inline double lambda_inc(double lambda, double alpha, double gamma, double phi, int M,
                         LambdaIncVariant variant, const LambdaIncExtras& extras = {}) {
    if (M < 1) throw invalid_input("lambda_inc: M < 1");
    const double dm = static_cast<double>(M);
    switch (variant) {
        case LambdaIncVariant::Base:
        case LambdaIncVariant::Projection:
            // projection: caller passes lambda_1 over the feature span as lambda
            return (lambda - 2.0 * good_arm_distance_bound(alpha, gamma)) * phi * dm;
        case LambdaIncVariant::Stochastic:
            return (lambda - 2.0 * good_arm_distance_bound(alpha, gamma)) * extras.q_gamma *
                   phi * dm;
        case LambdaIncVariant::XMax: {
            const double x = extras.x_max;
            const double inner = gamma * gamma + x * x +
                                 2.0 * alpha * std::sqrt(std::max(0.0, x * x - gamma * gamma)) -
                                 2.0 * gamma * gamma *
                                     std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
            return (lambda * gamma * gamma - 2.0 * x * std::sqrt(std::max(0.0, inner))) * phi *
                   dm;
        }
        case LambdaIncVariant::LowerUpper: {
            const double a_over_l = alpha / extras.l;
            const double inner =
                2.0 + 2.0 * a_over_l * std::sqrt(std::max(0.0, 1.0 - gamma * gamma)) -
                2.0 * gamma * std::sqrt(std::max(0.0, 1.0 - a_over_l * a_over_l));
            return (lambda / (extras.L * extras.L) - 2.0 * std::sqrt(std::max(0.0, inner))) *
                   phi * dm;
        }
    }
    throw invalid_config("lambda_inc: unknown variant");
}

// General form: guarantees ||theta_hat - theta|| <= a for all m and t > T0
// with probability >= 1 - 2 M delta.
inline double compute_B_general(double sigma, double a, int d, long T, double delta) {
    if (!(sigma > 0.0)) throw invalid_input("compute_B: sigma must be > 0");
    if (!(a > 0.0)) throw invalid_input("compute_B: a must be > 0");
    if (d < 1 || T < 2) throw invalid_input("compute_B: need d >= 1, T >= 2");
    if (!(delta > 0.0)) throw invalid_input("compute_B: delta must be > 0");
    const double dT = static_cast<double>(d) * static_cast<double>(T);
    const double branch1 = (sigma / a) * std::sqrt(2.0 * dT * std::log(dT / delta));
    const double branch2 = (4.0 * sigma * sigma / (a * a)) *
                           (0.5 * d * std::log(1.0 + 2.0 * static_cast<double>(T) / d) +
                            std::log(1.0 / delta));
    return std::min(branch1, branch2);
}

// Theorem form: a = alpha/2 and delta = 1/T.
inline double compute_B(double sigma, double alpha, int d, long T) {
    return compute_B_general(sigma, alpha / 2.0, d, T, 1.0 / static_cast<double>(T));
}

// ceil(B / lambda_S) * |S| rounds of round-robin exploration suffice.
// span_rank is the dimension the exploration set must cover (the feature-span
// rank); a set of lower rank is rejected.
inline long t0_bound(double B, const std::vector<Vector>& exploration_features, int span_rank) {
    if (!(B > 0.0)) throw invalid_input("t0_bound: B must be > 0");
    if (exploration_features.empty()) throw invalid_config("t0_bound: empty exploration set");
    const std::vector<Vector> basis = orthonormalize(exploration_features);
    if (static_cast<int>(basis.size()) < span_rank)
        throw invalid_config("t0_bound: exploration set does not span the feature span");
    const int d = static_cast<int>(exploration_features[0].size());
    const Matrix G = gram_of(exploration_features, d);
    const double lam_s = static_cast<int>(basis.size()) == d
                             ? min_eigenvalue(G)
                             : restricted_min_eigenvalue(G, basis);
    if (!(lam_s > 0.0)) throw invalid_config("t0_bound: exploration Gram is singular on its span");
    const double sweeps = std::ceil(B / lam_s - 1e-12);
    return static_cast<long>(sweeps) * static_cast<long>(exploration_features.size());
}

// Greedy pivoted selection: among rank-increasing arms, take the one that
// maximizes the restricted minimum eigenvalue of the running Gram matrix,
// until the set spans the feature span.
inline std::vector<int> select_exploration_set(const std::vector<Vector>& features) {
    if (features.empty()) throw invalid_config("select_exploration_set: no features");
    const int d = static_cast<int>(features[0].size());
    const int target_rank = rank_of(features);
    if (target_rank == 0) throw invalid_config("select_exploration_set: all features are zero");

    std::vector<int> chosen;
    std::vector<Vector> chosen_vecs;
    while (static_cast<int>(chosen.size()) < target_rank) {
        int best = -1;
        double best_eig = -1.0;
        for (int i = 0; i < static_cast<int>(features.size()); ++i) {
            std::vector<Vector> cand = chosen_vecs;
            cand.push_back(features[i]);
            const std::vector<Vector> basis = orthonormalize(cand);
            if (static_cast<int>(basis.size()) != static_cast<int>(cand.size()))
                continue;  // does not increase rank
            const Matrix G = gram_of(cand, d);
            const double eig = restricted_min_eigenvalue(G, basis);
            if (eig > best_eig + 1e-15) {
                best_eig = eig;
                best = i;
            }
        }
        if (best < 0) break;  // cannot happen when target_rank is reachable
        chosen.push_back(best);
        chosen_vecs.push_back(features[best]);
    }
    return chosen;
}

struct GoodnessReport {
    double lambda = 0.0;
    double gamma = 0.0;
    double alpha = 0.0;  // after capping
    double alpha_requested = 0.0;
    bool alpha_capped = false;
    double psi_cap_value = 0.0;
    bool verified = false;
    long n_directions_tested = 0;
    double worst_margin = 0.0;
    std::optional<double> q_gamma_hat;
    double phi_hat = 0.0;
    double lambda_inc = 0.0;
    double B = 0.0;
    long T0_bound = 0;
    bool subspace_variant = false;
    int span_rank = 0;
};

inline nlohmann::json goodness_report_to_json(const GoodnessReport& r) {
    nlohmann::json j{{"lambda", r.lambda},
                     {"gamma", r.gamma},
                     {"alpha", r.alpha},
                     {"alpha_requested", r.alpha_requested},
                     {"alpha_capped", r.alpha_capped},
                     {"psi_cap", r.psi_cap_value},
                     {"verified", r.verified},
                     {"n_directions_tested", r.n_directions_tested},
                     {"worst_margin", r.worst_margin},
                     {"phi_hat", r.phi_hat},
                     {"lambda_inc", r.lambda_inc},
                     {"B", r.B},
                     {"T0_bound", r.T0_bound},
                     {"subspace_variant", r.subspace_variant},
                     {"span_rank", r.span_rank}};
    if (r.q_gamma_hat)
        j["q_gamma_hat"] = *r.q_gamma_hat;
    else
        j["q_gamma_hat"] = nullptr;
    return j;
}

// Minimum, over sampled unit directions, of the empirical frequency that a
// sampled context set contains an arm with margin >= gamma. One pool of
// context sets is shared across directions. context_fn(rng) must return one
// context set.
template <class ContextFn>
double estimate_q_gamma_with(ContextFn&& context_fn, int d, double gamma, int n_rounds,
                             int n_directions, RngStream& rng) {
    if (n_rounds < 1 || n_directions < 1)
        throw invalid_input("estimate_q_gamma: need positive sample counts");
    std::vector<std::vector<Vector>> pool;
    pool.reserve(n_rounds);
    for (int r = 0; r < n_rounds; ++r) pool.push_back(context_fn(rng));
    double worst = 1.0;
    for (int k = 0; k < n_directions; ++k) {
        const Vector beta = rng.uniform_sphere(d);
        long hits = 0;
        for (const auto& ctx : pool) {
            for (const Vector& x : ctx) {
                if (dot(x, beta) >= gamma) {
                    ++hits;
                    break;
                }
            }
        }
        worst = std::min(worst, static_cast<double>(hits) / static_cast<double>(n_rounds));
    }
    return worst;
}

inline double estimate_q_gamma(const ContextSampler& sampler, const Instance& inst, double gamma,
                               int n_rounds, int n_directions, RngStream& rng) {
    return estimate_q_gamma_with(
        [&](RngStream& r) { return sample_context_set(sampler, inst, r); }, inst.d, gamma,
        n_rounds, n_directions, rng);
}

// Monte-Carlo check of the goodness condition: every direction sampled from
// the alpha-balls around the (projected) objectives must admit an arm with
// margin >= gamma. alpha is capped at psi(lambda, gamma) when that cap is
// positive; a nonpositive cap means the Assumption-3 threshold is not met and
// verification proceeds with the raw alpha. A stochastic context sampler adds
// the q_gamma estimate and switches lambda_inc to the stochastic variant.
inline GoodnessReport verify_goodness(const Instance& inst, double gamma, double alpha,
                                      long n_directions, RngStream& rng, long T_for_B = 1000,
                                      const WeightDistribution* weight_dist = nullptr,
                                      const ContextSampler* sampler = nullptr) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw invalid_config("verify_goodness: gamma outside (0,1]");
    if (!(alpha > 0.0)) throw invalid_config("verify_goodness: alpha <= 0");
    if (n_directions < 1) throw invalid_config("verify_goodness: n_directions < 1");

    GoodnessReport rep;
    rep.gamma = gamma;
    rep.alpha_requested = alpha;

    const std::vector<Vector> span_basis = orthonormalize(inst.features);
    rep.span_rank = static_cast<int>(span_basis.size());
    rep.subspace_variant = rep.span_rank < inst.d;

    std::vector<Vector> centers;  // objectives, projected onto the span if needed
    if (rep.subspace_variant) {
        rep.lambda = lambda_of(inst.objectives, &span_basis);
        for (const Vector& th : inst.objectives) {
            Vector p(inst.d, 0.0);
            for (const Vector& b : span_basis) {
                const double c = dot(th, b);
                for (int i = 0; i < inst.d; ++i) p[i] += c * b[i];
            }
            centers.push_back(std::move(p));
        }
    } else {
        rep.lambda = lambda_of(inst.objectives);
        centers = inst.objectives;
    }

    rep.psi_cap_value = rep.lambda > 0.0 ? psi_cap(std::min(rep.lambda, 1.0), gamma) : 0.0;
    rep.alpha = alpha;
    if (rep.psi_cap_value > 0.0 && alpha > rep.psi_cap_value) {
        rep.alpha = rep.psi_cap_value;
        rep.alpha_capped = true;
    }

    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (const Vector& center : centers) {
        for (long s = 0; s < n_directions; ++s) {
            Vector beta = rng.uniform_ball(inst.d);
            for (int i = 0; i < inst.d; ++i) beta[i] = center[i] + rep.alpha * beta[i];
            const double nb = norm2(beta);
            if (nb == 0.0) continue;
            double best = -std::numeric_limits<double>::infinity();
            for (const Vector& x : inst.features) best = std::max(best, dot(x, beta) / nb);
            rep.worst_margin = std::min(rep.worst_margin, best);
        }
    }
    rep.n_directions_tested = n_directions * static_cast<long>(centers.size());
    rep.verified = rep.worst_margin >= gamma - 1e-12;

    const WeightDistribution dist = weight_dist
                                        ? *weight_dist
                                        : WeightDistribution::dirichlet(Vector(inst.M, 1.0));
    const std::vector<Vector>& reg_objectives = rep.subspace_variant ? centers : inst.objectives;
    rep.phi_hat =
        regularity_indices(dist, reg_objectives, rep.alpha / 2.0, 10000, rng).phi;
    if (sampler && sampler->stochastic()) {
        rep.q_gamma_hat = estimate_q_gamma(*sampler, inst, gamma, 2000, 64, rng);
        LambdaIncExtras extras;
        extras.q_gamma = *rep.q_gamma_hat;
        rep.lambda_inc = lambda_inc(rep.lambda, rep.alpha, gamma, rep.phi_hat, inst.M,
                                    LambdaIncVariant::Stochastic, extras);
    } else {
        rep.lambda_inc = lambda_inc(rep.lambda, rep.alpha, gamma, rep.phi_hat, inst.M,
                                    rep.subspace_variant ? LambdaIncVariant::Projection
                                                         : LambdaIncVariant::Base);
    }

    if (inst.sigma > 0.0 && T_for_B >= 2) {
        rep.B = compute_B(inst.sigma, rep.alpha, inst.d, T_for_B);
        const std::vector<int> s_idx = select_exploration_set(inst.features);
        std::vector<Vector> s_feats;
        for (int i : s_idx) s_feats.push_back(inst.features[i]);
        rep.T0_bound = t0_bound(rep.B, s_feats, rep.span_rank);
    }
    return rep;
}

}  // namespace mogro
