#pragma once

// Synthetic instance generation and per-round context/reward sampling.
//
// The synthetic layout: M objectives uniform on the positive part of the unit
// sphere; M "anchored" arms drawn around the objectives (Gaussian, sd 0.1 per
// coordinate) and rescaled into magnitude band (3/4, 1); M uniform-ball arms
// rescaled into the same band; the remaining K - 2M arms rescaled below 3/4.

#include <vector>

#include "mogro/errors.hpp"
#include "mogro/instance.hpp"
#include "mogro/linalg.hpp"
#include "mogro/rng.hpp"

namespace mogro {

constexpr double kAnchorSd = 0.1;
constexpr double kMagnitudeSplit = 0.75;

namespace detail {

inline Vector rescaled_to(Vector x, double target_norm) {
    const double n = norm2(x);
    if (n == 0.0) return x;  // caller redraws
    return scaled(x, target_norm / n);
}

inline Vector anchored_arm(const Vector& anchor, RngStream& rng) {
    Vector x(anchor.size());
    for (size_t i = 0; i < x.size(); ++i) x[i] = anchor[i] + rng.gaussian(0.0, kAnchorSd);
    return rescaled_to(std::move(x), rng.uniform(kMagnitudeSplit, 1.0));
}

inline Vector band_ball_arm(int d, RngStream& rng, bool upper_band) {
    Vector x = rng.uniform_ball(d);
    const double target =
        upper_band ? rng.uniform(kMagnitudeSplit, 1.0) : rng.uniform(0.0, kMagnitudeSplit);
    return rescaled_to(std::move(x), target);
}

}  // namespace detail

inline Instance generate_synthetic(RngStream& rng, int d, int K, int M, double sigma) {
    if (d < 1 || M < 1) throw invalid_config("generate_synthetic: d, M must be >= 1");
    if (K <= 2 * M) throw invalid_config("generate_synthetic: requires K > 2M");
    if (sigma < 0.0) throw invalid_config("generate_synthetic: sigma < 0");
    Instance inst;
    inst.d = d;
    inst.M = M;
    inst.K = K;
    inst.sigma = sigma;
    inst.objectives.reserve(M);
    for (int m = 0; m < M; ++m) inst.objectives.push_back(rng.uniform_sphere(d, true));
    inst.features.reserve(K);
    for (int m = 0; m < M; ++m)
        inst.features.push_back(detail::anchored_arm(inst.objectives[m], rng));
    for (int i = 0; i < M; ++i) inst.features.push_back(detail::band_ball_arm(d, rng, true));
    for (int i = 0; i < K - 2 * M; ++i)
        inst.features.push_back(detail::band_ball_arm(d, rng, false));
    return inst;
}

struct ContextSampler {
    enum class Kind { Fixed, UniformBall, AnchoredGaussian };
    Kind kind = Kind::Fixed;

    static ContextSampler fixed() { return {Kind::Fixed}; }
    static ContextSampler uniform_ball() { return {Kind::UniformBall}; }
    static ContextSampler anchored_gaussian() { return {Kind::AnchoredGaussian}; }

    bool stochastic() const { return kind != Kind::Fixed; }
};

inline std::vector<Vector> sample_context_set(const ContextSampler& sampler,
                                              const Instance& inst, RngStream& rng) {
    switch (sampler.kind) {
        case ContextSampler::Kind::Fixed:
            return inst.features;
        case ContextSampler::Kind::UniformBall: {
            std::vector<Vector> xs;
            xs.reserve(inst.K);
            for (int i = 0; i < inst.K; ++i) xs.push_back(rng.uniform_ball(inst.d));
            return xs;
        }
        case ContextSampler::Kind::AnchoredGaussian: {
            if (inst.K <= 2 * inst.M)
                throw invalid_config("anchored-gaussian sampler requires K > 2M");
            std::vector<Vector> xs;
            xs.reserve(inst.K);
            for (int m = 0; m < inst.M; ++m)
                xs.push_back(detail::anchored_arm(inst.objectives[m], rng));
            for (int i = 0; i < inst.M; ++i) xs.push_back(detail::band_ball_arm(inst.d, rng, true));
            for (int i = 0; i < inst.K - 2 * inst.M; ++i)
                xs.push_back(detail::band_ball_arm(inst.d, rng, false));
            return xs;
        }
    }
    throw invalid_config("sample_context_set: unknown sampler kind");
}

// y_m = x . theta_m + N(0, sigma^2), independent across objectives.
inline Vector sample_reward(const Instance& inst, const Vector& x, RngStream& rng) {
    if (static_cast<int>(x.size()) != inst.d)
        throw invalid_input("sample_reward: feature dimension mismatch");
    Vector y(inst.M);
    for (int m = 0; m < inst.M; ++m) y[m] = dot(x, inst.objectives[m]) + rng.gaussian(0.0, inst.sigma);
    return y;
}

}  // namespace mogro
