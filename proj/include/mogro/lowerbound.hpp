#pragma once

// Worst-case instance families behind the Omega(sqrt(dT)) lower bound: d
// problem instances sharing one feature set, built so that the arms aligned
// with the first objective always beat the rest by a controlled margin.
//
//   d = 2:  theta_1^(j) = k 1 + eps e_j with 2k^2 + 2k eps + eps^2 = 1,
//           theta_2^(j) = k' 1 + eps' e_j with 2k'^2 + 2k' eps' + eps'^2 = 1.
//   d >= 3: theta_1^(j) = k 1 + eps e_j with d k^2 + 2k eps + eps^2 = 1,
//           theta_m^(j) = k' 1 + 2 eps e_j - eps e_p, p = (j + m - 2) mod d,
//           with d k'^2 + 2k' eps + 5 eps^2 = 1.
//
// Features are the parameter vectors themselves: x_{(m-1)d+j} = theta_m^(j).

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mogro/errors.hpp"
#include "mogro/instance.hpp"
#include "mogro/linalg.hpp"
#include "mogro/pareto.hpp"

namespace mogro {

// eps = sqrt(1 - 1/(1 + sqrt(d/T)/2)), the horizon-tuned separation.
inline double lowerbound_epsilon(int d, long T) {
    if (d < 2) throw invalid_config("lowerbound_epsilon: d < 2");
    if (T < 1) throw invalid_config("lowerbound_epsilon: T < 1");
    const double h = 0.5 * std::sqrt(static_cast<double>(d) / static_cast<double>(T));
    return std::sqrt(1.0 - 1.0 / (1.0 + h));
}

namespace detail {

// positive root of a x^2 + b x + c = 0
inline double positive_root(double a, double b, double c) {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) throw invalid_config("lower-bound scale equation has no real root");
    const double r = (-b + std::sqrt(disc)) / (2.0 * a);
    if (r <= 0.0) throw invalid_config("lower-bound scale equation has no positive root");
    return r;
}

}  // namespace detail

struct LbInstanceFamily {
    int d = 0;
    double epsilon = 0.0;
    double epsilon_prime = 0.0;  // d = 2 only; offset of the second objective
    double k = 0.0;
    double k_prime = 0.0;
    // d = 2: the k' scale equation is sometimes written with eps in place of
    // eps', which does not normalize theta_2; both roots are recorded.
    double k_prime_eps_reading = 0.0;
    std::vector<Vector> features;             // K = d^2 (4 when d = 2)
    std::vector<std::vector<Vector>> thetas;  // thetas[j][m] = theta_{m+1}^{(j+1)}

    int K() const { return static_cast<int>(features.size()); }
    int M() const { return d; }

    // The j-th problem instance (0-based) with the shared feature set.
    Instance instance(int j, double sigma = 0.0) const {
        Instance inst;
        inst.d = d;
        inst.M = d;
        inst.K = K();
        inst.sigma = sigma;
        inst.features = features;
        inst.objectives = thetas.at(j);
        return inst;
    }
};

inline LbInstanceFamily build_lowerbound_family(int d, double epsilon) {
    if (d < 2) throw invalid_config("build_lowerbound_family: d < 2");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw invalid_config("build_lowerbound_family: epsilon outside (0,1)");

    LbInstanceFamily fam;
    fam.d = d;
    fam.epsilon = epsilon;

    if (d == 2) {
        const double eps = epsilon;
        const double eps_p = std::min(2.0 * eps, 0.5 * (1.0 + eps));
        fam.epsilon_prime = eps_p;
        fam.k = detail::positive_root(2.0, 2.0 * eps, eps * eps - 1.0);
        fam.k_prime = detail::positive_root(2.0, 2.0 * eps_p, eps_p * eps_p - 1.0);
        fam.k_prime_eps_reading = detail::positive_root(2.0, 2.0 * eps, eps * eps - 1.0);
        fam.thetas.assign(2, std::vector<Vector>(2));
        fam.thetas[0][0] = {fam.k + eps, fam.k};
        fam.thetas[1][0] = {fam.k, fam.k + eps};
        fam.thetas[0][1] = {fam.k_prime + eps_p, fam.k_prime};
        fam.thetas[1][1] = {fam.k_prime, fam.k_prime + eps_p};
    } else {
        const double eps = epsilon;
        fam.k = detail::positive_root(static_cast<double>(d), 2.0 * eps, eps * eps - 1.0);
        fam.k_prime =
            detail::positive_root(static_cast<double>(d), 2.0 * eps, 5.0 * eps * eps - 1.0);
        fam.k_prime_eps_reading = fam.k_prime;
        fam.epsilon_prime = eps;
        fam.thetas.assign(d, std::vector<Vector>(d));
        for (int j = 0; j < d; ++j) {
            Vector first(d, fam.k);
            first[j] += eps;
            fam.thetas[j][0] = std::move(first);
            for (int m = 1; m < d; ++m) {
                Vector th(d, fam.k_prime);
                th[j] += 2.0 * eps;
                th[(j + m) % d] -= eps;
                fam.thetas[j][m] = std::move(th);
            }
        }
    }

    // x_{(m-1)d + j} = theta_m^{(j)}; 0-based: features[m*d + j] = thetas[j][m]
    const int M = fam.M();
    fam.features.resize(static_cast<size_t>(M) * d);
    for (int m = 0; m < M; ++m)
        for (int j = 0; j < d; ++j) fam.features[static_cast<size_t>(m) * d + j] = fam.thetas[j][m];
    return fam;
}

struct LbCheck {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct LbVerification {
    std::vector<LbCheck> checks;
    bool all_pass = true;

    void add(std::string name, double measured, double bound, bool pass) {
        checks.push_back({std::move(name), measured, bound, pass});
        all_pass = all_pass && pass;
    }
};

// Numerical verification of the construction identities and the gap claims.
inline LbVerification verify_lowerbound_family(const LbInstanceFamily& fam, double tol = 1e-9) {
    LbVerification rep;
    const int d = fam.d;
    const double e2 = fam.epsilon * fam.epsilon;

    double worst_norm_dev = 0.0;
    for (const auto& inst_thetas : fam.thetas)
        for (const Vector& th : inst_thetas)
            worst_norm_dev = std::max(worst_norm_dev, std::abs(norm2(th) - 1.0));
    rep.add("max |norm(theta) - 1|", worst_norm_dev, tol, worst_norm_dev <= tol);

    double worst_first_dev = 0.0;
    for (int j = 0; j < d; ++j)
        for (int jp = 0; jp < d; ++jp) {
            if (j == jp) continue;
            const double ip = dot(fam.thetas[j][0], fam.thetas[jp][0]);
            worst_first_dev = std::max(worst_first_dev, std::abs(ip - (1.0 - e2)));
        }
    rep.add("max |<theta_1^(j), theta_1^(j')> - (1 - eps^2)|", worst_first_dev, tol,
            worst_first_dev <= tol);

    if (d >= 3) {
        double worst_cross = -2.0;
        for (int j = 0; j < d; ++j)
            for (int js = 0; js < d; ++js) {
                if (j == js) continue;
                for (int mp = 1; mp < d; ++mp)
                    worst_cross = std::max(worst_cross, dot(fam.thetas[j][0], fam.thetas[js][mp]));
            }
        rep.add("max <theta_1^(j), theta_m'^(j*)>, m' != 1, j* != j", worst_cross,
                1.0 - 3.0 * e2 + tol, worst_cross <= 1.0 - 3.0 * e2 + tol);

        double worst_tail = -2.0;
        for (int j = 0; j < d; ++j)
            for (int js = 0; js < d; ++js) {
                if (j == js) continue;
                for (int m = 1; m < d; ++m)
                    for (int mp = 1; mp < d; ++mp)
                        worst_tail =
                            std::max(worst_tail, dot(fam.thetas[j][m], fam.thetas[js][mp]));
            }
        rep.add("max <theta_m^(j), theta_m'^(j*)>, m, m' != 1, j* != j", worst_tail,
                1.0 - 4.0 * e2, std::abs(worst_tail - (1.0 - 4.0 * e2)) <= tol);
    }

    // Effective-gap claims, per instance, through the gap LP. Arms belonging
    // to the instance's own parameter tuple (j = j*) are optimal there and are
    // excluded, as in the proof.
    double worst_good_gap_dev = 0.0;
    double worst_tail_gap = std::numeric_limits<double>::infinity();
    for (int js = 0; js < d; ++js) {
        const Instance inst = fam.instance(js);
        const RewardTable table = reward_table_of(inst.features, inst.objectives);
        for (int j = 0; j < d; ++j) {
            if (j == js) continue;
            const double g = effective_pareto_gap(table, j).effective_gap;
            worst_good_gap_dev = std::max(worst_good_gap_dev, std::abs(g - e2));
        }
        for (int i = d; i < table.K; ++i) {
            if (i % d == js) continue;
            worst_tail_gap =
                std::min(worst_tail_gap, effective_pareto_gap(table, i).effective_gap);
        }
    }
    rep.add("max |gap(theta_1^(j), j != j*) - eps^2|", worst_good_gap_dev, 1e-6,
            worst_good_gap_dev <= 1e-6);
    if (d >= 3) {
        rep.add("min gap of arms with index > d", worst_tail_gap, 3.0 * e2 - 1e-6,
                worst_tail_gap >= 3.0 * e2 - 1e-6);
    } else {
        rep.add("min gap of arms with index > d", worst_tail_gap, e2,
                worst_tail_gap > e2);
    }
    return rep;
}

}  // namespace mogro
