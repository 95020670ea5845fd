#pragma once

// Run configuration parsing and result persistence. Numbers in CSV output are
// written with %.17g so identical runs produce byte-identical files; the
// manifest records an FNV-1a 64-bit content hash per file.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mogro/errors.hpp"
#include "mogro/harness.hpp"
#include "mogro/instance.hpp"
#include "mogro/rng.hpp"

namespace mogro {

inline PolicyConfig policy_config_from_json(const nlohmann::json& j) {
    PolicyConfig pc;
    pc.kind = policy_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("b")) {
        if (j["b"].is_string()) {
            if (j["b"].get<std::string>() != "theoretical")
                throw invalid_config("policy 'b' must be a number or \"theoretical\"");
        } else {
            pc.b_numeric = j["b"].get<double>();
        }
    } else {
        pc.b_numeric = 1.0;
    }
    if (j.contains("dirichlet_alpha")) pc.dirichlet_alpha = j["dirichlet_alpha"].get<Vector>();
    pc.epsilon = j.value("epsilon", 0.1);
    pc.ucb_beta_scale = j.value("ucb_beta_scale", 1.0);
    pc.ts_scale = j.value("ts_scale", 1.0);
    pc.ts_samples = j.value("ts_samples", 10);
    pc.alpha = j.value("alpha", 0.1);
    pc.gamma = j.value("gamma", 0.5);
    pc.label = j.value("label", std::string{});
    if (pc.epsilon < 0.0 || pc.epsilon > 1.0) throw invalid_config("policy epsilon outside [0,1]");
    if (pc.ts_samples < 1) throw invalid_config("policy ts_samples < 1");
    return pc;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    try {
        cfg.T = j.at("T").get<long>();
        cfg.n_instances = j.value("n_instances", 1);
        cfg.n_repeats = j.value("n_repeats", 1);
        cfg.master_seed = j.value("master_seed", 0ULL);
        cfg.workers = j.value("workers", 1);
        cfg.save_trajectories = j.value("save_trajectories", false);

        const nlohmann::json& ji = j.at("instance");
        const std::string ikind = ji.at("kind").get<std::string>();
        if (ikind == "synthetic") {
            cfg.instance.kind = InstanceSpec::Kind::Synthetic;
            cfg.instance.d = ji.at("d").get<int>();
            cfg.instance.k = ji.at("k").get<int>();
            cfg.instance.m = ji.at("m").get<int>();
            cfg.instance.sigma = ji.at("sigma").get<double>();
        } else if (ikind == "file") {
            cfg.instance.kind = InstanceSpec::Kind::File;
            cfg.instance.path = ji.at("path").get<std::string>();
        } else if (ikind == "lowerbound") {
            cfg.instance.kind = InstanceSpec::Kind::Lowerbound;
            cfg.instance.d = ji.at("d").get<int>();
            cfg.instance.epsilon = ji.at("epsilon").get<double>();
            cfg.instance.sigma = ji.value("sigma", 0.1);
            cfg.instance.lb_instance = ji.value("lb_instance", 0);
        } else {
            throw invalid_config("unknown instance kind: " + ikind);
        }

        if (j.contains("context")) {
            const std::string ckind = j["context"].value("kind", std::string("fixed"));
            if (ckind == "fixed")
                cfg.context = ContextSampler::fixed();
            else if (ckind == "uniform-ball")
                cfg.context = ContextSampler::uniform_ball();
            else if (ckind == "anchored-gaussian")
                cfg.context = ContextSampler::anchored_gaussian();
            else
                throw invalid_config("unknown context kind: " + ckind);
        }

        for (const nlohmann::json& jp : j.at("policies"))
            cfg.policies.push_back(policy_config_from_json(jp));

        if (j.contains("metrics")) {
            cfg.metrics.epfi_epsilon = j["metrics"].value("epfi_epsilon", 0.1);
            cfg.metrics.weight_grid_resolution =
                j["metrics"].value("weight_grid_resolution", 100);
            cfg.metrics.epfi_samples = j["metrics"].value("epfi_samples", 10000);
        }
    } catch (const nlohmann::json::exception& e) {
        throw invalid_config(std::string("run config: ") + e.what());
    }
    if (cfg.policies.empty()) throw invalid_config("run config: no policies");
    return cfg;
}

inline nlohmann::json run_config_echo(const RunConfig& cfg) {
    nlohmann::json j;
    j["T"] = cfg.T;
    j["n_instances"] = cfg.n_instances;
    j["n_repeats"] = cfg.n_repeats;
    j["master_seed"] = cfg.master_seed;
    j["workers"] = cfg.workers;
    j["save_trajectories"] = cfg.save_trajectories;
    switch (cfg.instance.kind) {
        case InstanceSpec::Kind::Synthetic:
            j["instance"] = {{"kind", "synthetic"},
                             {"d", cfg.instance.d},
                             {"k", cfg.instance.k},
                             {"m", cfg.instance.m},
                             {"sigma", cfg.instance.sigma}};
            break;
        case InstanceSpec::Kind::File:
            j["instance"] = {{"kind", "file"}, {"path", cfg.instance.path}};
            break;
        case InstanceSpec::Kind::Lowerbound:
            j["instance"] = {{"kind", "lowerbound"},
                             {"d", cfg.instance.d},
                             {"epsilon", cfg.instance.epsilon},
                             {"sigma", cfg.instance.sigma},
                             {"lb_instance", cfg.instance.lb_instance}};
            break;
    }
    switch (cfg.context.kind) {
        case ContextSampler::Kind::Fixed: j["context"] = {{"kind", "fixed"}}; break;
        case ContextSampler::Kind::UniformBall: j["context"] = {{"kind", "uniform-ball"}}; break;
        case ContextSampler::Kind::AnchoredGaussian:
            j["context"] = {{"kind", "anchored-gaussian"}};
            break;
    }
    j["policies"] = nlohmann::json::array();
    for (const PolicyConfig& pc : cfg.policies) {
        nlohmann::json jp;
        jp["kind"] = policy_kind_name(pc.kind);
        if (pc.b_numeric)
            jp["b"] = *pc.b_numeric;
        else
            jp["b"] = "theoretical";
        if (!pc.dirichlet_alpha.empty()) jp["dirichlet_alpha"] = pc.dirichlet_alpha;
        jp["epsilon"] = pc.epsilon;
        jp["ucb_beta_scale"] = pc.ucb_beta_scale;
        jp["ts_scale"] = pc.ts_scale;
        jp["ts_samples"] = pc.ts_samples;
        jp["alpha"] = pc.alpha;
        jp["gamma"] = pc.gamma;
        if (!pc.label.empty()) jp["label"] = pc.label;
        j["policies"].push_back(jp);
    }
    j["metrics"] = {{"epfi_epsilon", cfg.metrics.epfi_epsilon},
                    {"weight_grid_resolution", cfg.metrics.weight_grid_resolution},
                    {"epfi_samples", cfg.metrics.epfi_samples},
                    {"epfi_proxy_norm", "linf-reward-space"},
                    {"psi_estimator", "anchor-grid, biased upward"}};
    return j;
}

namespace detail {

inline std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline uint64_t fnv1a64_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw io_error("cannot hash: " + p.string());
    uint64_t h = 0xCBF29CE484222325ULL;
    char c;
    while (f.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw io_error("cannot open for write: " + p.string());
    f << text;
    if (!f) throw io_error("write failed: " + p.string());
}

}  // namespace detail

inline std::string trajectory_to_csv(const Trajectory& traj, int M) {
    std::ostringstream os;
    os << "t,arm,phase,pareto_gap,effective_gap,min_eig";
    for (int m = 0; m < M; ++m) os << ",weight_" << m;
    os << ",nanos\n";
    for (size_t t = 0; t < traj.rows.size(); ++t) {
        const TrajectoryRow& r = traj.rows[t];
        os << (t + 1) << "," << r.arm << ","
           << (r.phase == Phase::Exploring ? "exploring" : "greedy") << ","
           << detail::csv_num(r.pareto_gap) << "," << detail::csv_num(r.effective_gap) << ","
           << detail::csv_num(r.min_eig);
        for (int m = 0; m < M; ++m) {
            os << ",";
            if (r.weight && m < static_cast<int>(r.weight->size()))
                os << detail::csv_num((*r.weight)[m]);
        }
        os << "," << r.nanos << "\n";
    }
    return os.str();
}

inline Trajectory trajectory_from_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open for read: " + path);
    std::string line;
    if (!std::getline(f, line)) throw parse_error("trajectory csv: empty");
    std::istringstream hs(line);
    std::vector<std::string> header;
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
    int weight_cols = 0;
    for (const std::string& h : header)
        if (h.rfind("weight_", 0) == 0) ++weight_cols;

    Trajectory traj;
    size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        while (cells.size() < header.size()) cells.push_back("");
        if (cells.size() != header.size())
            throw parse_error("trajectory csv: ragged line " + std::to_string(lineno));
        TrajectoryRow r;
        r.arm = std::stoi(cells[1]);
        r.phase = cells[2] == "exploring" ? Phase::Exploring : Phase::Greedy;
        r.pareto_gap = std::stod(cells[3]);
        r.effective_gap = std::stod(cells[4]);
        r.min_eig = std::stod(cells[5]);
        bool any_weight = false;
        Vector w(weight_cols, 0.0);
        for (int m = 0; m < weight_cols; ++m) {
            if (!cells[6 + m].empty()) {
                w[m] = std::stod(cells[6 + m]);
                any_weight = true;
            }
        }
        if (any_weight) r.weight = std::move(w);
        r.nanos = std::stoll(cells[6 + weight_cols]);
        if (r.phase == Phase::Exploring) ++traj.t0_realized;
        traj.rows.push_back(std::move(r));
    }
    return traj;
}

inline std::string curves_to_csv(const AggregateResult& agg) {
    std::ostringstream os;
    os << "policy,t,mean_pr,sd_pr,mean_epr,sd_epr\n";
    for (const PolicyAggregate& p : agg.policies)
        for (long t = 0; t < agg.T; ++t)
            os << p.name << "," << (t + 1) << "," << detail::csv_num(p.mean_pr[t]) << ","
               << detail::csv_num(p.sd_pr[t]) << "," << detail::csv_num(p.mean_epr[t]) << ","
               << detail::csv_num(p.sd_epr[t]) << "\n";
    return os.str();
}

struct CurveRow {
    std::string policy;
    long t = 0;
    double mean_pr = 0.0, sd_pr = 0.0, mean_epr = 0.0, sd_epr = 0.0;
};

inline std::vector<CurveRow> load_curves_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open for read: " + path);
    std::string line;
    if (!std::getline(f, line)) throw parse_error("curves.csv: empty");
    std::vector<CurveRow> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        CurveRow r;
        std::string cell;
        std::getline(ls, r.policy, ',');
        std::getline(ls, cell, ',');
        r.t = std::stol(cell);
        std::getline(ls, cell, ',');
        r.mean_pr = std::stod(cell);
        std::getline(ls, cell, ',');
        r.sd_pr = std::stod(cell);
        std::getline(ls, cell, ',');
        r.mean_epr = std::stod(cell);
        std::getline(ls, cell, ',');
        r.sd_epr = std::stod(cell);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline nlohmann::json summary_to_json(const AggregateResult& agg, const nlohmann::json& echo) {
    nlohmann::json j;
    j["policies"] = nlohmann::json::object();
    for (const PolicyAggregate& p : agg.policies) {
        nlohmann::json jp;
        jp["total_runtime_ns"] = p.total_runtime_ns;
        jp["epfi_exact"] = p.epfi_exact;
        jp["epfi_proxy"] = p.epfi_proxy;
        jp["epfi_epsilon"] = p.epfi_epsilon;
        jp["epfi_n_weights"] = p.epfi_n_weights;
        jp["pf_variance"] = p.pf_variance;
        jp["t0_realized"] = p.t0_realized;
        jp["resolved_b"] = p.resolved_b;
        jp["final_mean_pr"] = p.mean_pr.empty() ? 0.0 : p.mean_pr.back();
        jp["final_mean_epr"] = p.mean_epr.empty() ? 0.0 : p.mean_epr.back();
        j["policies"][p.name] = jp;
    }
    j["config"] = echo;
    return j;
}

struct ManifestEntry {
    std::string path;
    uintmax_t bytes = 0;
    std::string fnv1a64_hex;
};

// Writes curves.csv, summary.json, config.echo.json, optional trajectory CSVs
// and manifest.json into `dir`. Returns the manifest entries.
inline std::vector<ManifestEntry> persist(const ExperimentOutput& out, const RunConfig& cfg,
                                          const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory: " + dir);

    std::vector<std::string> files;
    detail::write_text(fs::path(dir) / "curves.csv", curves_to_csv(out.aggregate));
    files.push_back("curves.csv");

    const nlohmann::json echo = run_config_echo(cfg);
    detail::write_text(fs::path(dir) / "config.echo.json", echo.dump(2) + "\n");
    files.push_back("config.echo.json");

    detail::write_text(fs::path(dir) / "summary.json",
                       summary_to_json(out.aggregate, echo).dump(2) + "\n");
    files.push_back("summary.json");

    if (cfg.save_trajectories && !out.instances.empty()) {
        fs::create_directories(fs::path(dir) / "instances", ec);
        if (ec) throw io_error("cannot create instances directory under " + dir);
        for (size_t i = 0; i < out.instances.size(); ++i) {
            const std::string name = "instances/instance_" + std::to_string(i) + ".json";
            save_instance(out.instances[i], (fs::path(dir) / name).string());
            files.push_back(name);
        }
    }

    if (cfg.save_trajectories && !out.trajectories.empty()) {
        fs::create_directories(fs::path(dir) / "trajectories", ec);
        if (ec) throw io_error("cannot create trajectories directory under " + dir);
        const int M = cfg.instance.kind == InstanceSpec::Kind::Lowerbound
                          ? cfg.instance.d
                          : (cfg.instance.kind == InstanceSpec::Kind::Synthetic ? cfg.instance.m
                                                                                : 0);
        for (size_t i = 0; i < out.trajectories.size(); ++i) {
            const EpisodeKey key = out.trajectory_keys[i];
            const int m_cols =
                M > 0 ? M
                      : (out.trajectories[i].rows.empty()
                             ? 0
                             : static_cast<int>(out.trajectories[i].rows[0].reward.size()));
            const std::string name = "trajectories/" +
                                     cfg.policies[key.policy].name() + "_i" +
                                     std::to_string(key.instance) + "_r" +
                                     std::to_string(key.repeat) + ".csv";
            detail::write_text(fs::path(dir) / name,
                               trajectory_to_csv(out.trajectories[i], m_cols));
            files.push_back(name);
        }
    }

    std::vector<ManifestEntry> manifest;
    nlohmann::json jm;
    jm["files"] = nlohmann::json::array();
    for (const std::string& f : files) {
        ManifestEntry e;
        e.path = f;
        e.bytes = fs::file_size(fs::path(dir) / f);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(detail::fnv1a64_file(fs::path(dir) / f)));
        e.fnv1a64_hex = buf;
        jm["files"].push_back({{"path", e.path}, {"bytes", e.bytes}, {"fnv1a64", e.fnv1a64_hex}});
        manifest.push_back(std::move(e));
    }
    detail::write_text(fs::path(dir) / "manifest.json", jm.dump(2) + "\n");
    return manifest;
}

}  // namespace mogro
