// Command-line front end: batch experiments, instance tools, and verifiers.
//
// Exit codes: 0 success, 1 usage/config/IO error, 2 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mogro/generators.hpp"
#include "mogro/goodness.hpp"
#include "mogro/harness.hpp"
#include "mogro/instance.hpp"
#include "mogro/lowerbound.hpp"
#include "mogro/persist.hpp"
#include "mogro/tabular.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitVerifyFailed = 2;

int cmd_run(const std::string& config_path, const std::string& out_dir, int workers,
            bool save_trajectories) {
    std::ifstream f(config_path);
    if (!f) {
        std::cerr << "error: cannot open config: " << config_path << "\n";
        return kExitError;
    }
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config parse: " << e.what() << "\n";
        return kExitError;
    }
    mogro::RunConfig cfg = mogro::run_config_from_json(j);
    if (workers > 0) cfg.workers = workers;
    if (save_trajectories) cfg.save_trajectories = true;
    const mogro::ExperimentOutput out = mogro::run_experiment(cfg);
    mogro::persist(out, cfg, out_dir);
    for (const mogro::PolicyAggregate& p : out.aggregate.policies) {
        std::cout << p.name << ": EPR(" << out.aggregate.T << ")=" << p.mean_epr.back()
                  << " PR(" << out.aggregate.T << ")=" << p.mean_pr.back()
                  << " runtime_ms=" << p.total_runtime_ns / 1000000 << "\n";
    }
    return kExitOk;
}

int cmd_gen_instance(int d, int k, int m, double sigma, uint64_t seed,
                     const std::string& out_path) {
    mogro::RngStream rng(seed, mogro::fnv1a64("gen-instance"));
    const mogro::Instance inst = mogro::generate_synthetic(rng, d, k, m, sigma);
    mogro::save_instance(inst, out_path);
    std::cout << "wrote " << out_path << " (d=" << d << " K=" << k << " M=" << m << ")\n";
    return kExitOk;
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_ingest(const std::string& csv_path, const std::string& features,
               const std::string& objectives, double noise_sd, int k, uint64_t seed,
               const std::string& out_path) {
    mogro::RngStream rng(seed, mogro::fnv1a64("ingest"));
    const mogro::Instance inst =
        mogro::ingest_tabular_file(csv_path, split_csv_list(features),
                                   split_csv_list(objectives), noise_sd, k, &rng);
    mogro::save_instance(inst, out_path);
    std::cout << "wrote " << out_path << " (d=" << inst.d << " K=" << inst.K
              << " M=" << inst.M << ")\n";
    return kExitOk;
}

int cmd_gen_lowerbound(int d, long t, double epsilon, const std::string& out_path) {
    double eps = epsilon;
    if (eps <= 0.0) {
        if (t < 1) throw mogro::invalid_config("gen-lowerbound: provide --t or --epsilon");
        eps = mogro::lowerbound_epsilon(d, t);
    }
    const mogro::LbInstanceFamily fam = mogro::build_lowerbound_family(d, eps);
    const mogro::LbVerification rep = mogro::verify_lowerbound_family(fam);

    nlohmann::json j;
    j["d"] = fam.d;
    j["epsilon"] = fam.epsilon;
    j["epsilon_prime"] = fam.epsilon_prime;
    j["k"] = fam.k;
    j["k_prime"] = fam.k_prime;
    j["k_prime_eps_reading"] = fam.k_prime_eps_reading;
    j["features"] = fam.features;
    j["instances"] = nlohmann::json::array();
    for (int i = 0; i < fam.d; ++i) j["instances"].push_back({{"objectives", fam.thetas[i]}});
    j["verification"] = nlohmann::json::array();
    for (const mogro::LbCheck& c : rep.checks)
        j["verification"].push_back(
            {{"name", c.name}, {"measured", c.measured}, {"bound", c.bound}, {"pass", c.pass}});
    j["verification_pass"] = rep.all_pass;

    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw mogro::io_error("cannot open for write: " + out_path);
    f << j.dump(2) << "\n";
    std::cout << "wrote " << out_path << " (epsilon=" << fam.epsilon
              << ", verification " << (rep.all_pass ? "pass" : "FAIL") << ")\n";
    return rep.all_pass ? kExitOk : kExitVerifyFailed;
}

int cmd_verify_goodness(const std::string& instance_path, double gamma, double alpha, long n,
                        uint64_t seed, long t_horizon) {
    const mogro::Instance inst = mogro::load_instance(instance_path);
    mogro::RngStream rng(seed, mogro::fnv1a64("verify-goodness"));
    const mogro::GoodnessReport rep =
        mogro::verify_goodness(inst, gamma, alpha, n, rng, t_horizon);
    std::cout << mogro::goodness_report_to_json(rep).dump(2) << "\n";
    return rep.verified ? kExitOk : kExitVerifyFailed;
}

int cmd_metrics(const std::string& traj_path, const std::string& instance_path) {
    const mogro::Instance inst = mogro::load_instance(instance_path);
    const mogro::Trajectory traj = mogro::trajectory_from_csv(traj_path);
    const mogro::RewardTable table = mogro::reward_table_of(inst.features, inst.objectives);
    std::vector<mogro::GapResult> per_arm;
    per_arm.reserve(inst.K);
    for (int i = 0; i < inst.K; ++i) per_arm.push_back(mogro::effective_pareto_gap(table, i));

    bool match = true;
    double pr = 0.0, epr = 0.0;
    std::cout << "t,pr,epr\n";
    for (size_t t = 0; t < traj.rows.size(); ++t) {
        const mogro::TrajectoryRow& row = traj.rows[t];
        if (row.arm < 0 || row.arm >= inst.K) {
            std::cerr << "error: arm index out of range at t=" << (t + 1) << "\n";
            return kExitError;
        }
        const mogro::GapResult& g = per_arm[row.arm];
        pr += g.pareto_gap;
        epr += g.effective_gap;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", t + 1, pr, epr);
        std::cout << buf;
        if (g.pareto_gap != row.pareto_gap || g.effective_gap != row.effective_gap) match = false;
    }
    std::cout << "replay-match: " << (match ? "true" : "false") << "\n";
    return match ? kExitOk : kExitVerifyFailed;
}

int cmd_summarize(const std::string& in_dir) {
    std::ifstream f(in_dir + "/summary.json");
    if (!f) {
        std::cerr << "error: cannot open " << in_dir << "/summary.json\n";
        return kExitError;
    }
    nlohmann::json j;
    f >> j;
    std::printf("%-16s %12s %12s %10s %10s %12s %12s\n", "policy", "final_epr", "final_pr",
                "epfi", "epfi_ball", "pf_variance", "runtime_ms");
    for (const auto& [name, p] : j.at("policies").items()) {
        std::printf("%-16s %12.4f %12.4f %10.4f %10.4f %12.4f %12lld\n", name.c_str(),
                    p.value("final_mean_epr", 0.0), p.value("final_mean_pr", 0.0),
                    p.value("epfi_exact", 0.0), p.value("epfi_proxy", 0.0),
                    p.value("pf_variance", 0.0),
                    static_cast<long long>(p.value("total_runtime_ns", 0LL) / 1000000));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-objective linear bandit experiments (MOGRO family)"};
    app.require_subcommand(1);

    std::string config_path, out_path, instance_path, traj_path, in_dir;
    int d = 5, k = 50, m = 5;
    double sigma = 0.1, gamma = 0.5, alpha = 0.1, epsilon = 0.0;
    long n_dirs = 10000, t_horizon = 1000;
    uint64_t seed = 0;
    int workers = 0;
    bool save_traj = false;
    long lb_t = 0;

    CLI::App* run = app.add_subcommand("run", "run a batch experiment from a config file");
    run->add_option("--config", config_path, "run config JSON")->required();
    run->add_option("--out", out_path, "output directory")->required();
    run->add_option("--workers", workers, "worker threads");
    run->add_flag("--save-trajectories", save_traj, "persist per-episode trajectory CSVs");

    CLI::App* gen = app.add_subcommand("gen-instance", "generate a synthetic instance");
    gen->add_option("--d", d, "feature dimension")->required();
    gen->add_option("--k", k, "arm count")->required();
    gen->add_option("--m", m, "objective count")->required();
    gen->add_option("--sigma", sigma, "reward noise sd")->required();
    gen->add_option("--seed", seed, "rng seed");
    gen->add_option("--out", out_path, "output instance JSON")->required();

    std::string csv_path, feature_cols, objective_cols;
    double noise_sd = 1.0;
    int sub_k = 0;
    CLI::App* ing = app.add_subcommand("ingest", "build an instance from a CSV table");
    ing->add_option("--csv", csv_path, "input CSV with header row")->required();
    ing->add_option("--features", feature_cols, "comma-separated feature columns")->required();
    ing->add_option("--objectives", objective_cols, "comma-separated objective columns")
        ->required();
    ing->add_option("--noise-sd", noise_sd, "reward noise sd (default 1.0)");
    ing->add_option("--k", sub_k, "subsample to K rows (0 = keep all)");
    ing->add_option("--seed", seed, "subsampling seed");
    ing->add_option("--out", out_path, "output instance JSON")->required();

    CLI::App* lb = app.add_subcommand("gen-lowerbound", "generate a lower-bound family");
    lb->add_option("--d", d, "dimension (>= 2)")->required();
    lb->add_option("--t", lb_t, "horizon used to set epsilon");
    lb->add_option("--epsilon", epsilon, "explicit epsilon in (0,1)");
    lb->add_option("--out", out_path, "output JSON")->required();

    CLI::App* vg = app.add_subcommand("verify-goodness", "verify the goodness condition");
    vg->add_option("--instance", instance_path, "instance JSON")->required();
    vg->add_option("--gamma", gamma, "goodness level in (0,1]")->required();
    vg->add_option("--alpha", alpha, "ball radius")->required();
    vg->add_option("--n", n_dirs, "directions per objective ball");
    vg->add_option("--seed", seed, "rng seed");
    vg->add_option("--t", t_horizon, "horizon for the B calculation");

    CLI::App* me = app.add_subcommand("metrics", "recompute gap curves from a trajectory");
    me->add_option("--trajectory", traj_path, "trajectory CSV")->required();
    me->add_option("--instance", instance_path, "instance JSON")->required();

    CLI::App* su = app.add_subcommand("summarize", "print the summary table of a run directory");
    su->add_option("--in", in_dir, "run output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitError;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_path, workers, save_traj);
        if (gen->parsed()) return cmd_gen_instance(d, k, m, sigma, seed, out_path);
        if (ing->parsed())
            return cmd_ingest(csv_path, feature_cols, objective_cols, noise_sd, sub_k, seed,
                              out_path);
        if (lb->parsed()) return cmd_gen_lowerbound(d, lb_t, epsilon, out_path);
        if (vg->parsed())
            return cmd_verify_goodness(instance_path, gamma, alpha, n_dirs, seed, t_horizon);
        if (me->parsed()) return cmd_metrics(traj_path, instance_path);
        if (su->parsed()) return cmd_summarize(in_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
