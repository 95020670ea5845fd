#pragma once

// Trajectory-level metrics: cumulative regret curves, the effective Pareto
// fairness index (exact grid estimate and the stricter eps-ball proxy), the
// variance-based Pareto fairness number, and the regularity indices of a
// weight distribution.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "mogro/errors.hpp"
#include "mogro/linalg.hpp"
#include "mogro/pareto.hpp"
#include "mogro/rng.hpp"

namespace mogro {

struct RegretCurves {
    Vector pr;   // cumulative Pareto regret, index t-1
    Vector epr;  // cumulative effective Pareto regret
};

inline RegretCurves accumulate_regret(const std::vector<GapResult>& gaps) {
    RegretCurves c;
    c.pr.reserve(gaps.size());
    c.epr.reserve(gaps.size());
    double pr = 0.0, epr = 0.0;
    for (const GapResult& g : gaps) {
        pr += g.pareto_gap;
        epr += g.effective_gap;
        c.pr.push_back(pr);
        c.epr.push_back(epr);
    }
    return c;
}

// All weight vectors with components i/resolution summing to 1 (M <= 3 only;
// the count grows too fast beyond that).
inline std::vector<Vector> weight_grid(int M, int resolution) {
    if (M < 1 || resolution < 1) throw invalid_input("weight_grid: bad arguments");
    std::vector<Vector> grid;
    if (M == 1) {
        grid.push_back({1.0});
    } else if (M == 2) {
        for (int i = 0; i <= resolution; ++i) {
            const double w = static_cast<double>(i) / resolution;
            grid.push_back({w, 1.0 - w});
        }
    } else if (M == 3) {
        for (int i = 0; i <= resolution; ++i)
            for (int j = 0; j <= resolution - i; ++j) {
                const double a = static_cast<double>(i) / resolution;
                const double b = static_cast<double>(j) / resolution;
                grid.push_back({a, b, 1.0 - a - b});
            }
    } else {
        throw invalid_input("weight_grid: use sampled weights for M > 3");
    }
    return grid;
}

// Grid for M <= 3, Dirichlet(1_M) sample otherwise.
inline std::vector<Vector> weight_probe_set(int M, int resolution, int n_samples,
                                            RngStream& rng) {
    if (M <= 3) return weight_grid(M, resolution);
    std::vector<Vector> ws;
    ws.reserve(n_samples);
    const Vector alpha(M, 1.0);
    for (int i = 0; i < n_samples; ++i) ws.push_back(rng.dirichlet(alpha));
    return ws;
}

struct EpfiEstimate {
    double value = 0.0;
    int n_weights = 0;       // resolution metadata: probe weights scanned
    Vector argmin_weight;    // weight attaining the minimum
};

// EPFI_{eps,T} = min over probe weights w of (1/T) #{t : mu_w^*(t) - mu_{a(t),w}(t) < eps}.
// `tables` holds either one table (fixed features) or one per round. The
// fixed-table case collapses the time loop into an arm-pull histogram.
inline EpfiEstimate epfi_exact_estimate(const std::vector<int>& arms,
                                        const std::vector<RewardTable>& tables, double epsilon,
                                        const std::vector<Vector>& probe_weights) {
    if (epsilon <= 0.0) throw invalid_input("epfi_exact_estimate: epsilon <= 0");
    if (tables.empty() || (tables.size() != 1 && tables.size() != arms.size()))
        throw invalid_input("epfi_exact_estimate: table count must be 1 or T");
    const size_t T = arms.size();
    EpfiEstimate est;
    est.n_weights = static_cast<int>(probe_weights.size());
    est.value = 1.0;
    if (tables.size() == 1) {
        const RewardTable& tab = tables[0];
        std::vector<size_t> pulls(tab.K, 0);
        for (int a : arms) pulls[a]++;
        Vector score(tab.K);
        for (const Vector& w : probe_weights) {
            double best = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < tab.K; ++i) {
                double s = 0.0;
                for (int m = 0; m < tab.M; ++m) s += w[m] * tab.at(i, m);
                score[i] = s;
                best = std::max(best, s);
            }
            size_t hits = 0;
            for (int i = 0; i < tab.K; ++i)
                if (best - score[i] < epsilon) hits += pulls[i];
            const double frac =
                T == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(T);
            if (frac < est.value) {
                est.value = frac;
                est.argmin_weight = w;
            }
        }
        return est;
    }
    for (const Vector& w : probe_weights) {
        size_t hits = 0;
        for (size_t t = 0; t < T; ++t) {
            const RewardTable& tab = tables[t];
            double best = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < tab.K; ++i) {
                double s = 0.0;
                for (int m = 0; m < tab.M; ++m) s += w[m] * tab.at(i, m);
                best = std::max(best, s);
            }
            double chosen = 0.0;
            for (int m = 0; m < tab.M; ++m) chosen += w[m] * tab.at(arms[t], m);
            if (best - chosen < epsilon) ++hits;
        }
        const double frac = T == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(T);
        if (frac < est.value) {
            est.value = frac;
            est.argmin_weight = w;
        }
    }
    return est;
}

// Stricter proxy from reward-space sup-norm balls around the effective front:
// min over front arms a* of (1/T) #{t : ||mu_{a(t)} - mu_{a*}||_inf < eps}.
// Counting a round toward a* requires a* to be effective-optimal that round.
inline double epfi_ball_proxy(const std::vector<int>& arms,
                              const std::vector<RewardTable>& tables, double epsilon) {
    if (epsilon <= 0.0) throw invalid_input("epfi_ball_proxy: epsilon <= 0");
    if (tables.empty() || (tables.size() != 1 && tables.size() != arms.size()))
        throw invalid_input("epfi_ball_proxy: table count must be 1 or T");
    const size_t T = arms.size();
    if (tables.size() == 1) {
        const RewardTable& tab = tables[0];
        std::vector<size_t> pulls(tab.K, 0);
        for (int a : arms) pulls[a]++;
        double worst = 1.0;
        for (int a : effective_pareto_front(tab)) {
            size_t hits = 0;
            for (int i = 0; i < tab.K; ++i) {
                double dist = 0.0;
                for (int m = 0; m < tab.M; ++m)
                    dist = std::max(dist, std::abs(tab.at(i, m) - tab.at(a, m)));
                if (dist < epsilon) hits += pulls[i];
            }
            const double frac =
                T == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(T);
            worst = std::min(worst, frac);
        }
        return worst;
    }
    std::map<int, size_t> hits;
    std::map<int, bool> seen;
    for (size_t t = 0; t < T; ++t) {
        const RewardTable& tab = tables[t];
        for (int a : effective_pareto_front(tab)) {
            seen[a] = true;
            double dist = 0.0;
            for (int m = 0; m < tab.M; ++m)
                dist = std::max(dist, std::abs(tab.at(arms[t], m) - tab.at(a, m)));
            if (dist < epsilon) ++hits[a];
        }
    }
    double worst = 1.0;
    for (const auto& [arm, was_seen] : seen) {
        (void)was_seen;
        const double frac = T == 0 ? 0.0 : static_cast<double>(hits[arm]) / static_cast<double>(T);
        worst = std::min(worst, frac);
    }
    return seen.empty() ? 0.0 : worst;
}

// Variance of pull counts across the (true) Pareto front, Drugan-style.
inline double pareto_fairness_variance(const std::vector<int>& arms,
                                       const std::vector<int>& front) {
    if (front.empty()) return 0.0;
    std::vector<double> counts(front.size(), 0.0);
    for (int a : arms)
        for (size_t k = 0; k < front.size(); ++k)
            if (front[k] == a) counts[k] += 1.0;
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= static_cast<double>(front.size());
    double var = 0.0;
    for (double c : counts) var += (c - mean) * (c - mean);
    return var / static_cast<double>(front.size());
}

// The Dirichlet family plus a point mass, which covers every built-in policy.
struct WeightDistribution {
    enum class Kind { Dirichlet, PointMass };
    Kind kind = Kind::Dirichlet;
    Vector alpha;  // Dirichlet parameters
    Vector point;  // point-mass location

    static WeightDistribution dirichlet(Vector a) {
        WeightDistribution w;
        w.kind = Kind::Dirichlet;
        w.alpha = std::move(a);
        return w;
    }
    static WeightDistribution point_mass(Vector p) {
        WeightDistribution w;
        w.kind = Kind::PointMass;
        w.point = std::move(p);
        return w;
    }
    int dim() const {
        return static_cast<int>(kind == Kind::Dirichlet ? alpha.size() : point.size());
    }
    Vector sample(RngStream& rng) const {
        return kind == Kind::Dirichlet ? rng.dirichlet(alpha) : point;
    }
};

struct RegularityIndices {
    double phi = 0.0;  // min_m P(||theta_w - theta_m|| < eps)
    double psi = 0.0;  // inf_{w'} P(||theta_w - theta_{w'}|| < eps), grid-approximated
    int n_samples = 0;
    int n_anchors = 0;
};

// Monte-Carlo estimates of the regularity indices phi_{eps,W}, psi_{eps,W}.
// psi's inner infimum is taken over a finite anchor set, so the estimate is
// biased upward relative to the true infimum.
inline RegularityIndices regularity_indices(const WeightDistribution& dist,
                                            const std::vector<Vector>& objectives, double epsilon,
                                            int n_samples, RngStream& rng, int n_anchors = 200) {
    if (epsilon <= 0.0) throw invalid_input("regularity_indices: epsilon <= 0");
    if (objectives.empty()) throw invalid_input("regularity_indices: no objectives");
    const int M = static_cast<int>(objectives.size());
    const int d = static_cast<int>(objectives[0].size());
    if (dist.dim() != M) throw invalid_input("regularity_indices: weight dimension mismatch");

    auto weighted_objective = [&](const Vector& w) {
        Vector th(d, 0.0);
        for (int m = 0; m < M; ++m)
            for (int i = 0; i < d; ++i) th[i] += w[m] * objectives[m][i];
        return th;
    };

    std::vector<Vector> anchors;
    if (M <= 3) {
        int res = 1;
        while (static_cast<int>(weight_grid(M, res).size()) < n_anchors && res < 4096) res *= 2;
        anchors = weight_grid(M, res);
    } else {
        const Vector ones(M, 1.0);
        for (int i = 0; i < n_anchors; ++i) anchors.push_back(rng.dirichlet(ones));
    }
    std::vector<Vector> anchor_thetas;
    anchor_thetas.reserve(anchors.size());
    for (const Vector& w : anchors) anchor_thetas.push_back(weighted_objective(w));

    std::vector<long> hit_obj(M, 0);
    std::vector<long> hit_anchor(anchors.size(), 0);
    for (int s = 0; s < n_samples; ++s) {
        const Vector th = weighted_objective(dist.sample(rng));
        for (int m = 0; m < M; ++m) {
            double d2 = 0.0;
            for (int i = 0; i < d; ++i) {
                const double diff = th[i] - objectives[m][i];
                d2 += diff * diff;
            }
            if (d2 < epsilon * epsilon) ++hit_obj[m];
        }
        for (size_t a = 0; a < anchor_thetas.size(); ++a) {
            double d2 = 0.0;
            for (int i = 0; i < d; ++i) {
                const double diff = th[i] - anchor_thetas[a][i];
                d2 += diff * diff;
            }
            if (d2 < epsilon * epsilon) ++hit_anchor[a];
        }
    }

    RegularityIndices out;
    out.n_samples = n_samples;
    out.n_anchors = static_cast<int>(anchors.size());
    out.phi = 1.0;
    for (int m = 0; m < M; ++m)
        out.phi = std::min(out.phi, static_cast<double>(hit_obj[m]) / n_samples);
    out.psi = 1.0;
    for (long h : hit_anchor)
        out.psi = std::min(out.psi, static_cast<double>(h) / n_samples);
    return out;
}

}  // namespace mogro
