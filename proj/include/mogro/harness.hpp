#pragma once

// Episode execution and experiment orchestration. Every (instance, repeat,
// policy) cell owns RngStreams derived from the master seed and a stable hash
// of its coordinates, so results do not depend on execution order, worker
// count, or which other policies are configured.

#include <atomic>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "mogro/errors.hpp"
#include "mogro/generators.hpp"
#include "mogro/goodness.hpp"
#include "mogro/instance.hpp"
#include "mogro/lowerbound.hpp"
#include "mogro/metrics.hpp"
#include "mogro/pareto.hpp"
#include "mogro/policies.hpp"
#include "mogro/rng.hpp"

namespace mogro {

struct TrajectoryRow {
    int arm = 0;
    int context_id = 0;  // 0 for fixed features, the round index otherwise
    Vector reward;
    double pareto_gap = 0.0;
    double effective_gap = 0.0;
    double min_eig = 0.0;
    Phase phase = Phase::Exploring;
    std::optional<Vector> weight;
    long long nanos = 0;
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    long t0_realized = 0;

    RegretCurves curves() const {
        std::vector<GapResult> gaps;
        gaps.reserve(rows.size());
        for (const TrajectoryRow& r : rows) gaps.push_back({r.pareto_gap, r.effective_gap, {}});
        return accumulate_regret(gaps);
    }
};

struct EpisodeStreams {
    RngStream policy;
    RngStream reward;
    RngStream context;
};

// One T-round bandit interaction. Gaps are computed against the true
// parameters; for fixed features the per-arm gap results are computed once.
// When tables_out is non-null the per-round reward tables are exported for
// fairness metrics (a single entry for fixed features).
inline Trajectory run_episode(const Instance& inst, const ContextSampler& sampler,
                              const PolicyConfig& cfg, double B, long T, EpisodeStreams& streams,
                              std::vector<RewardTable>* tables_out = nullptr) {
    EstimatorState st =
        make_estimator(inst.features, inst.M, B, cfg.kind == PolicyKind::MogroGeneral);
    Trajectory traj;
    traj.rows.reserve(T);

    std::vector<GapResult> fixed_gaps;
    RewardTable fixed_table;
    if (!sampler.stochastic()) {
        fixed_table = reward_table_of(inst.features, inst.objectives);
        fixed_gaps.reserve(inst.K);
        for (int i = 0; i < inst.K; ++i) fixed_gaps.push_back(effective_pareto_gap(fixed_table, i));
        if (tables_out) tables_out->push_back(fixed_table);
    }

    for (long t = 0; t < T; ++t) {
        try {
            std::vector<Vector> ctx;
            const std::vector<Vector>& contexts =
                sampler.stochastic()
                    ? (ctx = sample_context_set(sampler, inst, streams.context), ctx)
                    : inst.features;

            const auto tic = std::chrono::steady_clock::now();
            StepResult step = policy_step(st, cfg, contexts, streams.policy);
            const Vector& x = contexts[step.arm];
            const Vector y = sample_reward(inst, x, streams.reward);
            observe(st, x, y);
            const auto toc = std::chrono::steady_clock::now();

            TrajectoryRow row;
            row.arm = step.arm;
            row.context_id = sampler.stochastic() ? static_cast<int>(t + 1) : 0;
            row.reward = y;
            row.min_eig = step.diag.min_eig;
            row.phase = step.diag.phase;
            row.weight = step.diag.weight;
            row.nanos =
                std::chrono::duration_cast<std::chrono::nanoseconds>(toc - tic).count();
            if (sampler.stochastic()) {
                const RewardTable table = reward_table_of(contexts, inst.objectives);
                const GapResult g = effective_pareto_gap(table, step.arm);
                row.pareto_gap = g.pareto_gap;
                row.effective_gap = g.effective_gap;
                if (tables_out) tables_out->push_back(table);
            } else {
                row.pareto_gap = fixed_gaps[step.arm].pareto_gap;
                row.effective_gap = fixed_gaps[step.arm].effective_gap;
            }
            if (row.phase == Phase::Exploring) ++traj.t0_realized;
            traj.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            throw std::runtime_error("round " + std::to_string(t + 1) + ": " + e.what());
        }
    }
    return traj;
}

struct InstanceSpec {
    enum class Kind { Synthetic, File, Lowerbound };
    Kind kind = Kind::Synthetic;
    int d = 5, k = 50, m = 5;
    double sigma = 0.1;
    std::string path;        // file kind
    double epsilon = 0.1;    // lowerbound kind
    int lb_instance = 0;     // which member of the lower-bound family
};

struct MetricSpec {
    double epfi_epsilon = 0.1;
    int weight_grid_resolution = 100;
    int epfi_samples = 10000;  // used instead of the grid when M > 3
};

struct RunConfig {
    long T = 1000;
    int n_instances = 1;
    int n_repeats = 1;
    uint64_t master_seed = 0;
    int workers = 1;
    bool save_trajectories = false;
    InstanceSpec instance;
    ContextSampler context;
    std::vector<PolicyConfig> policies;
    MetricSpec metrics;
};

struct PolicyAggregate {
    std::string name;
    Vector mean_pr, sd_pr, mean_epr, sd_epr;  // indexed by t-1
    long long total_runtime_ns = 0;
    double epfi_exact = 0.0;
    double epfi_proxy = 0.0;
    double epfi_epsilon = 0.0;
    int epfi_n_weights = 0;
    double pf_variance = 0.0;
    std::vector<long> t0_realized;
    std::vector<double> resolved_b;  // per instance
};

struct AggregateResult {
    std::vector<PolicyAggregate> policies;
    long T = 0;
};

struct EpisodeKey {
    int instance = 0;
    int repeat = 0;
    int policy = 0;
};

struct ExperimentOutput {
    AggregateResult aggregate;
    std::vector<Instance> instances;
    // present only when save_trajectories is set; indexed as flattened
    // (policy, instance, repeat)
    std::vector<Trajectory> trajectories;
    std::vector<EpisodeKey> trajectory_keys;
};

namespace detail {

inline uint64_t episode_stream_id(int instance, int repeat, const std::string& policy,
                                  const char* purpose) {
    uint64_t h = fnv1a64(policy);
    h = hash_combine(h, fnv1a64(purpose));
    h = hash_combine(h, static_cast<uint64_t>(instance) + 1);
    h = hash_combine(h, static_cast<uint64_t>(repeat) + 1);
    return h;
}

inline Instance build_instance(const InstanceSpec& spec, uint64_t master_seed, int index) {
    switch (spec.kind) {
        case InstanceSpec::Kind::Synthetic: {
            RngStream rng(master_seed, hash_combine(fnv1a64("instance"),
                                                    static_cast<uint64_t>(index) + 1));
            return generate_synthetic(rng, spec.d, spec.k, spec.m, spec.sigma);
        }
        case InstanceSpec::Kind::File:
            return load_instance(spec.path);
        case InstanceSpec::Kind::Lowerbound: {
            const LbInstanceFamily fam = build_lowerbound_family(spec.d, spec.epsilon);
            return fam.instance(spec.lb_instance, spec.sigma);
        }
    }
    throw invalid_config("build_instance: unknown instance kind");
}

}  // namespace detail

inline ExperimentOutput run_experiment(const RunConfig& cfg) {
    if (cfg.T < 1) throw invalid_config("run_experiment: T < 1");
    if (cfg.n_instances < 1 || cfg.n_repeats < 1)
        throw invalid_config("run_experiment: need n_instances, n_repeats >= 1");
    if (cfg.policies.empty()) throw invalid_config("run_experiment: no policies");
    for (size_t p = 0; p < cfg.policies.size(); ++p)
        for (size_t q = p + 1; q < cfg.policies.size(); ++q)
            if (cfg.policies[p].name() == cfg.policies[q].name())
                throw invalid_config("duplicate policy name '" + cfg.policies[p].name() +
                                     "'; set distinct labels");

    std::vector<Instance> instances;
    instances.reserve(cfg.n_instances);
    for (int i = 0; i < cfg.n_instances; ++i) {
        Instance inst = detail::build_instance(cfg.instance, cfg.master_seed, i);
        const std::vector<Violation> bad = validate_instance(inst);
        if (!bad.empty())
            throw invalid_config("instance " + std::to_string(i) +
                                 " invalid: " + bad.front().field + " (" + bad.front().message +
                                 ")");
        instances.push_back(std::move(inst));
    }
    const int M = instances.front().M;

    // Resolve B per (policy, instance); "theoretical" goes through the
    // goodness report so alpha gets the psi cap.
    std::vector<std::vector<double>> resolved_b(cfg.policies.size(),
                                                std::vector<double>(cfg.n_instances, 0.0));
    for (size_t p = 0; p < cfg.policies.size(); ++p) {
        for (int i = 0; i < cfg.n_instances; ++i) {
            if (cfg.policies[p].b_numeric) {
                resolved_b[p][i] = *cfg.policies[p].b_numeric;
            } else {
                RngStream rng(cfg.master_seed,
                              detail::episode_stream_id(i, 0, cfg.policies[p].name(), "goodness"));
                const GoodnessReport rep = verify_goodness(
                    instances[i], cfg.policies[p].gamma, cfg.policies[p].alpha, 10000, rng, cfg.T);
                resolved_b[p][i] = rep.B;
            }
        }
    }

    // Shared EPFI probe weights.
    RngStream probe_rng(cfg.master_seed, fnv1a64("epfi-probes"));
    const std::vector<Vector> probes = weight_probe_set(
        M, cfg.metrics.weight_grid_resolution, cfg.metrics.epfi_samples, probe_rng);

    struct EpisodeOutcome {
        RegretCurves curves;
        long long runtime_ns = 0;
        double epfi_exact = 0.0;
        double epfi_proxy = 0.0;
        double pf_variance = 0.0;
        long t0 = 0;
        Trajectory traj;  // rows kept only when save_trajectories
    };

    const size_t n_cells =
        cfg.policies.size() * static_cast<size_t>(cfg.n_instances) * cfg.n_repeats;
    std::vector<EpisodeOutcome> outcomes(n_cells);
    std::vector<EpisodeKey> keys(n_cells);
    {
        size_t idx = 0;
        for (size_t p = 0; p < cfg.policies.size(); ++p)
            for (int i = 0; i < cfg.n_instances; ++i)
                for (int r = 0; r < cfg.n_repeats; ++r) keys[idx++] = {i, r, static_cast<int>(p)};
    }

    std::vector<std::string> errors(n_cells);
    auto run_cell = [&](size_t idx) {
        const EpisodeKey key = keys[idx];
        const PolicyConfig& pc = cfg.policies[key.policy];
        const Instance& inst = instances[key.instance];
        try {
            EpisodeStreams streams{
                RngStream(cfg.master_seed,
                          detail::episode_stream_id(key.instance, key.repeat, pc.name(), "policy")),
                RngStream(cfg.master_seed,
                          detail::episode_stream_id(key.instance, key.repeat, pc.name(), "reward")),
                RngStream(cfg.master_seed, detail::episode_stream_id(key.instance, key.repeat,
                                                                     pc.name(), "context"))};
            std::vector<RewardTable> tables;
            Trajectory traj = run_episode(inst, cfg.context, pc, resolved_b[key.policy][key.instance],
                                          cfg.T, streams, &tables);
            EpisodeOutcome& out = outcomes[idx];
            out.curves = traj.curves();
            out.t0 = traj.t0_realized;
            for (const TrajectoryRow& row : traj.rows) out.runtime_ns += row.nanos;
            std::vector<int> arms;
            arms.reserve(traj.rows.size());
            for (const TrajectoryRow& row : traj.rows) arms.push_back(row.arm);
            out.epfi_exact =
                epfi_exact_estimate(arms, tables, cfg.metrics.epfi_epsilon, probes).value;
            out.epfi_proxy = epfi_ball_proxy(arms, tables, cfg.metrics.epfi_epsilon);
            out.pf_variance = pareto_fairness_variance(
                arms, pareto_front(reward_table_of(inst.features, inst.objectives)));
            if (cfg.save_trajectories) out.traj = std::move(traj);
        } catch (const std::exception& e) {
            errors[idx] = "episode failed (instance " + std::to_string(key.instance) +
                          ", repeat " + std::to_string(key.repeat) + ", policy " + pc.name() +
                          "): " + e.what();
        }
    };

    const int workers = std::max(1, cfg.workers);
    if (workers == 1) {
        for (size_t idx = 0; idx < n_cells; ++idx) run_cell(idx);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (;;) {
                    const size_t idx = next.fetch_add(1);
                    if (idx >= n_cells) return;
                    run_cell(idx);
                }
            });
        for (std::thread& th : pool) th.join();
    }
    for (const std::string& err : errors)
        if (!err.empty()) throw std::runtime_error(err);

    ExperimentOutput output;
    output.aggregate.T = cfg.T;
    output.instances = instances;
    const int per_policy = cfg.n_instances * cfg.n_repeats;
    for (size_t p = 0; p < cfg.policies.size(); ++p) {
        PolicyAggregate agg;
        agg.name = cfg.policies[p].name();
        agg.epfi_epsilon = cfg.metrics.epfi_epsilon;
        agg.epfi_n_weights = static_cast<int>(probes.size());
        agg.resolved_b = resolved_b[p];
        agg.mean_pr.assign(cfg.T, 0.0);
        agg.sd_pr.assign(cfg.T, 0.0);
        agg.mean_epr.assign(cfg.T, 0.0);
        agg.sd_epr.assign(cfg.T, 0.0);
        for (int i = 0; i < cfg.n_instances; ++i)
            for (int r = 0; r < cfg.n_repeats; ++r) {
                const size_t idx = (p * cfg.n_instances + i) * cfg.n_repeats + r;
                const EpisodeOutcome& out = outcomes[idx];
                for (long t = 0; t < cfg.T; ++t) {
                    agg.mean_pr[t] += out.curves.pr[t];
                    agg.mean_epr[t] += out.curves.epr[t];
                }
                agg.total_runtime_ns += out.runtime_ns;
                agg.epfi_exact += out.epfi_exact;
                agg.epfi_proxy += out.epfi_proxy;
                agg.pf_variance += out.pf_variance;
                agg.t0_realized.push_back(out.t0);
                if (cfg.save_trajectories) {
                    output.trajectories.push_back(outcomes[idx].traj);
                    output.trajectory_keys.push_back(keys[idx]);
                }
            }
        const double n = static_cast<double>(per_policy);
        for (long t = 0; t < cfg.T; ++t) {
            agg.mean_pr[t] /= n;
            agg.mean_epr[t] /= n;
        }
        agg.epfi_exact /= n;
        agg.epfi_proxy /= n;
        agg.pf_variance /= n;
        if (per_policy > 1) {
            for (int i = 0; i < cfg.n_instances; ++i)
                for (int r = 0; r < cfg.n_repeats; ++r) {
                    const size_t idx = (p * cfg.n_instances + i) * cfg.n_repeats + r;
                    for (long t = 0; t < cfg.T; ++t) {
                        const double dp = outcomes[idx].curves.pr[t] - agg.mean_pr[t];
                        const double de = outcomes[idx].curves.epr[t] - agg.mean_epr[t];
                        agg.sd_pr[t] += dp * dp;
                        agg.sd_epr[t] += de * de;
                    }
                }
            for (long t = 0; t < cfg.T; ++t) {
                agg.sd_pr[t] = std::sqrt(agg.sd_pr[t] / (n - 1.0));
                agg.sd_epr[t] = std::sqrt(agg.sd_epr[t] / (n - 1.0));
            }
        }
        output.aggregate.policies.push_back(std::move(agg));
    }
    return output;
}

}  // namespace mogro
