#pragma once

// Seeded randomness. A (seed, stream-id) pair fully determines the draw
// sequence, bit-identically across runs and platforms: the engine is the
// standardized mt19937_64 and every distribution below is hand-rolled on top
// of it (libstdc++/libc++ distribution objects are not portable).

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "mogro/errors.hpp"
#include "mogro/linalg.hpp"

namespace mogro {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
    return splitmix64(a ^ (splitmix64(b) + 0x632BE59BD9B4E019ULL));
}

class RngStream {
public:
    RngStream(uint64_t seed, uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id),
          eng_(splitmix64(splitmix64(seed) ^ splitmix64(stream_id ^ 0xA3EC4E93D0B4FB51ULL))) {}

    uint64_t seed() const { return seed_; }
    uint64_t stream_id() const { return stream_id_; }

    uint64_t next_u64() { return eng_(); }

    // uniform on [0, 1)
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Marsaglia polar method; the spare deviate is cached in the stream state.
    double standard_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    double gaussian(double mean, double sd) {
        if (sd < 0.0) throw invalid_input("gaussian: sd < 0");
        return mean + sd * standard_normal();
    }

    // Marsaglia-Tsang; shape < 1 boosted through the alpha+1 identity.
    double gamma(double shape) {
        if (shape <= 0.0) throw invalid_input("gamma: shape <= 0");
        if (shape < 1.0) {
            const double u = 1.0 - uniform01();  // (0, 1]
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = standard_normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = 1.0 - uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    Vector dirichlet(const Vector& alpha) {
        if (alpha.empty()) throw invalid_input("dirichlet: empty alpha");
        for (double a : alpha)
            if (!(a > 0.0)) throw invalid_input("dirichlet: nonpositive alpha");
        Vector w(alpha.size());
        double total = 0.0;
        for (size_t i = 0; i < alpha.size(); ++i) {
            w[i] = gamma(alpha[i]);
            total += w[i];
        }
        if (total <= 0.0) {  // astronomically unlikely underflow; retry
            return dirichlet(alpha);
        }
        for (double& v : w) v /= total;
        return w;
    }

    Vector uniform_sphere(int d, bool positive_orthant = false) {
        if (d < 1) throw invalid_input("uniform_sphere: d < 1");
        Vector x(d);
        double n;
        do {
            for (int i = 0; i < d; ++i) x[i] = standard_normal();
            n = norm2(x);
        } while (n == 0.0);
        for (double& v : x) v /= n;
        if (positive_orthant)
            for (double& v : x) v = std::abs(v);
        return x;
    }

    Vector uniform_ball(int d) {
        Vector x = uniform_sphere(d);
        const double r = std::pow(uniform01(), 1.0 / d);
        for (double& v : x) v *= r;
        return x;
    }

private:
    uint64_t seed_;
    uint64_t stream_id_;
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace mogro
