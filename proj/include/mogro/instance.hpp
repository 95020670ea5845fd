#pragma once

// Problem instance: K feature vectors, M objective parameter vectors, noise
// scale, and the norm bounds they are supposed to respect. JSON round-trips
// are bit-faithful (numbers are written with 17 significant digits).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mogro/errors.hpp"
#include "mogro/linalg.hpp"

namespace mogro {

struct Instance {
    int d = 0;      // feature dimension
    int M = 0;      // objectives
    int K = 0;      // arms
    double sigma = 0.0;
    double x_max = 1.0;
    double l = 1.0;  // lower bound on ||theta_m||
    double L = 1.0;  // upper bound on ||theta_m||
    std::vector<Vector> features;    // K of dim d
    std::vector<Vector> objectives;  // M of dim d
};

struct Violation {
    std::string field;
    double measured = 0.0;
    std::string message;
};

inline std::vector<Violation> validate_instance(const Instance& inst) {
    std::vector<Violation> v;
    const double tol = 1e-9;
    auto fail = [&](const std::string& field, double measured, const std::string& msg) {
        v.push_back({field, measured, msg});
    };
    if (inst.d < 1) fail("d", inst.d, "d must be >= 1");
    if (inst.M < 1) fail("M", inst.M, "M must be >= 1");
    if (inst.K < 1) fail("K", inst.K, "K must be >= 1");
    if (inst.sigma < 0) fail("sigma", inst.sigma, "sigma must be >= 0");
    if (static_cast<int>(inst.features.size()) != inst.K)
        fail("features", static_cast<double>(inst.features.size()), "feature count != K");
    if (static_cast<int>(inst.objectives.size()) != inst.M)
        fail("objectives", static_cast<double>(inst.objectives.size()), "objective count != M");
    for (size_t i = 0; i < inst.features.size(); ++i) {
        if (static_cast<int>(inst.features[i].size()) != inst.d) {
            fail("features[" + std::to_string(i) + "]",
                 static_cast<double>(inst.features[i].size()), "dimension != d");
            continue;
        }
        const double n = norm2(inst.features[i]);
        if (n > inst.x_max + tol)
            fail("features[" + std::to_string(i) + "]", n, "norm exceeds x_max");
    }
    for (size_t m = 0; m < inst.objectives.size(); ++m) {
        if (static_cast<int>(inst.objectives[m].size()) != inst.d) {
            fail("objectives[" + std::to_string(m) + "]",
                 static_cast<double>(inst.objectives[m].size()), "dimension != d");
            continue;
        }
        const double n = norm2(inst.objectives[m]);
        if (n < inst.l - tol || n > inst.L + tol)
            fail("objectives[" + std::to_string(m) + "]", n, "norm outside [l, L]");
    }
    return v;
}

namespace detail {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_vector_rows(std::ostream& os, const std::vector<Vector>& rows,
                              const char* indent) {
    for (size_t i = 0; i < rows.size(); ++i) {
        os << indent << "[";
        for (size_t j = 0; j < rows[i].size(); ++j) {
            if (j) os << ", ";
            os << fmt17(rows[i][j]);
        }
        os << "]" << (i + 1 < rows.size() ? "," : "") << "\n";
    }
}

}  // namespace detail

inline std::string instance_to_json(const Instance& inst) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"d\": " << inst.d << ",\n";
    os << "  \"M\": " << inst.M << ",\n";
    os << "  \"K\": " << inst.K << ",\n";
    os << "  \"sigma\": " << detail::fmt17(inst.sigma) << ",\n";
    os << "  \"x_max\": " << detail::fmt17(inst.x_max) << ",\n";
    os << "  \"l\": " << detail::fmt17(inst.l) << ",\n";
    os << "  \"L\": " << detail::fmt17(inst.L) << ",\n";
    os << "  \"features\": [\n";
    detail::write_vector_rows(os, inst.features, "    ");
    os << "  ],\n";
    os << "  \"objectives\": [\n";
    detail::write_vector_rows(os, inst.objectives, "    ");
    os << "  ]\n";
    os << "}\n";
    return os.str();
}

inline Instance instance_from_json(const nlohmann::json& j) {
    Instance inst;
    try {
        inst.d = j.at("d").get<int>();
        inst.M = j.at("M").get<int>();
        inst.K = j.at("K").get<int>();
        inst.sigma = j.at("sigma").get<double>();
        inst.x_max = j.value("x_max", 1.0);
        inst.l = j.value("l", 1.0);
        inst.L = j.value("L", 1.0);
        inst.features = j.at("features").get<std::vector<Vector>>();
        inst.objectives = j.at("objectives").get<std::vector<Vector>>();
    } catch (const nlohmann::json::exception& e) {
        throw schema_error(std::string("instance json: ") + e.what());
    }
    return inst;
}

inline void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for write: " + path);
    f << instance_to_json(inst);
    if (!f) throw io_error("write failed: " + path);
}

inline Instance load_instance(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for read: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("instance json parse: ") + e.what());
    }
    return instance_from_json(j);
}

}  // namespace mogro
