#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "somrl/clustering.hpp"
#include "somrl/config.hpp"
#include "somrl/env.hpp"
#include "somrl/features.hpp"
#include "somrl/gsom.hpp"
#include "somrl/metrics.hpp"
#include "somrl/qlearn.hpp"
#include "somrl/som_io.hpp"
#include "somrl/transfer.hpp"

namespace somrl {

namespace harness_detail {

// SplitMix64; used to derive independent evaluation seeds per episode.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t eval_seed(std::uint64_t run_seed, std::size_t task, std::size_t episode) {
    return mix64(run_seed ^ mix64(std::uint64_t(task) << 32 ^ std::uint64_t(episode)));
}

// Runs jobs [0, n) on up to `threads` workers.  Each job writes only its own
// output slot, so results are deterministic regardless of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace harness_detail

struct CurriculumResult {
    RunMetrics metrics;
    SomMap map;
    std::vector<WeightVector> task_weights;
};

// Learns the configured tasks in order with one strategy.  After each task
// the learned weights are folded into the SOM; from the second task on, the
// som_guided strategy spends its exploration steps acting greedily per the
// most similar stored weight vector, while epsilon_greedy explores uniformly
// at random.  Returns are evaluated after every episode by greedy rollouts.
inline CurriculumResult run_curriculum(const ExperimentConfig& cfg, Strategy strategy,
                                       std::size_t run_id, std::uint64_t seed) {
    cfg.validate();
    if (cfg.tasks.empty()) throw ConfigError("run_curriculum: no tasks configured");

    std::mt19937_64 rng(seed);
    const RadialBasisCoder coder(cfg.arena, cfg.run.rbf_per_dim, cfg.run.rbf_width_factor);
    const std::size_t block_len = coder.feature_count();
    const std::size_t dim = block_len * kNumActions;

    CurriculumResult result{RunMetrics{run_id, seed, strategy, {}, {}},
                            SomMap::random_init(cfg.gsom.initial_rows, cfg.gsom.initial_cols, dim, rng),
                            {}};

    std::bernoulli_distribution explore(cfg.qlearn.epsilon);
    std::uniform_int_distribution<std::size_t> random_action(0, kNumActions - 1);
    std::vector<double> qvals;
    std::size_t integrated = 0;

    for (std::size_t t = 0; t < cfg.tasks.size(); ++t) {
        const TaskSpec& task = cfg.tasks[t];
        TaskMetrics tm;
        tm.episodes.reserve(cfg.run.episodes_per_task);

        WeightVector w = WeightVector::zeros(block_len, kNumActions);
        {
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (double& v : w.values) v = cfg.run.init_weight_scale * gauss(rng);
        }
        Traces z = Traces::zeros(block_len, kNumActions);
        SourceSelection source;
        bool have_source = false;

        try {
            for (std::size_t ep = 0; ep < cfg.run.episodes_per_task; ++ep) {
                const auto t_start = std::chrono::steady_clock::now();
                const bool use_advice = strategy == Strategy::kSomGuided && integrated > 0;
                if (use_advice &&
                    (!have_source || ep % cfg.transfer.advice_refresh_interval == 0)) {
                    if (norm(w.values) > 1e-8) {
                        source = select_source(result.map, w);
                    } else {
                        // Uninformed target weights: any node is as good a guess.
                        std::uniform_int_distribution<std::size_t> pick(
                            0, result.map.node_count() - 1);
                        const std::size_t i = pick(rng);
                        std::span<const double> nw = result.map.node_weights(i);
                        source = {i, 0.0, {nw.begin(), nw.end()}};
                    }
                    have_source = true;
                }
                WeightVector w_source;
                if (use_advice) w_source = WeightVector{block_len, source.weights};

                Vec2 p = sample_start(cfg.arena, task, rng);
                FeatureVector f = coder.featurize(p, stimulus_vector(p, cfg.arena));
                z.reset();

                for (std::size_t s = 0; s < cfg.run.max_steps_per_episode; ++s) {
                    Action a;
                    if (use_advice) {
                        a = som_guided_action(w, w_source, f, cfg.qlearn.epsilon, rng);
                    } else if (explore(rng)) {
                        a = Action(random_action(rng));
                    } else {
                        a = greedy_action(w, f);
                    }
                    q_values(w, f, qvals);
                    double qmax = qvals[0];
                    for (double q : qvals) qmax = std::max(qmax, q);
                    const bool was_greedy = qvals[std::size_t(a)] == qmax;

                    const Transition tr = step(p, a, task, cfg.arena);
                    FeatureVector f_next =
                        tr.terminal ? FeatureVector{}
                                    : coder.featurize(tr.next, stimulus_vector(tr.next, cfg.arena));
                    q_lambda_step(w, z, f, a, tr, tr.terminal ? f : f_next, was_greedy, cfg.qlearn);
                    if (tr.terminal) break;
                    p = tr.next;
                    f = std::move(f_next);
                }

                EpisodeRecord rec;
                std::mt19937_64 eval_rng(harness_detail::eval_seed(seed, t, ep));
                rec.avg_return =
                    evaluate_return(w, coder, task, cfg.arena, cfg.run.eval_starts,
                                    cfg.run.eval_horizon, cfg.run.eval_gamma, eval_rng);
                rec.best_similarity =
                    norm(w.values) > 0.0 ? find_winner(result.map, w.values).similarity : 0.0;
                rec.wall_clock_ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              t_start)
                        .count();
                tm.episodes.push_back(rec);
            }
        } catch (const DivergenceError& e) {
            result.metrics.failure =
                "task " + std::to_string(t + 1) + ": " + e.what();
            result.metrics.tasks.push_back(std::move(tm));
            return result;
        }

        integrate_task(result.map, w.values, cfg.gsom, rng);
        ++integrated;
        tm.node_count_after = result.map.node_count();
        result.task_weights.push_back(std::move(w));
        result.metrics.tasks.push_back(std::move(tm));
    }
    return result;
}

// All (strategy, seed) runs of the comparison experiment.  Run ids: seeds
// 0..runs-1 under som_guided, then runs..2*runs-1 under epsilon_greedy.
inline std::vector<CurriculumResult> run_comparison(const ExperimentConfig& cfg) {
    const std::size_t n = cfg.run.runs * 2;
    std::vector<CurriculumResult> results;
    results.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        results.push_back(CurriculumResult{RunMetrics{}, SomMap(1, 1, 1), {}});
    harness_detail::parallel_for(n, cfg.run.threads, [&](std::size_t i) {
        const Strategy strategy =
            i < cfg.run.runs ? Strategy::kSomGuided : Strategy::kEpsilonGreedy;
        const std::uint64_t seed = cfg.run.base_seed + (i % cfg.run.runs);
        results[i] = run_curriculum(cfg, strategy, i, seed);
    });
    return results;
}

// Random-walk task discovery: cluster the gated stimulus observations, keep
// clusters with enough support, and recover one goal per surviving cluster.
inline std::vector<TaskSpec> discover_tasks(const ExperimentConfig& cfg, std::mt19937_64& rng) {
    const DiscoveryConfig& d = cfg.discovery;
    LeaderClusterer clusterer(d.theta_c);
    TaskSpec free_roam;  // unreachable goal so sample_start covers the arena
    free_roam.goal_center = {-100.0, -100.0};
    free_roam.goal_radius = 1e-9;

    Vec2 p = sample_start(cfg.arena, free_roam, rng);
    std::uniform_int_distribution<std::size_t> random_action(0, kNumActions - 1);
    std::size_t observed = 0;
    for (std::size_t s = 0; s < d.walk_steps; ++s) {
        const std::vector<double> fe = stimulus_vector(p, cfg.arena);
        double strongest = 0.0;
        for (double a : fe) strongest = std::max(strongest, a);
        if (strongest >= d.fe_presence_min) {
            clusterer.observe(fe);
            ++observed;
        }
        p = step(p, Action(random_action(rng)), free_roam, cfg.arena).next;
    }

    std::vector<TaskSpec> tasks;
    const double min_count = d.min_cluster_fraction * double(observed);
    for (std::size_t i = 0; i < clusterer.cluster_count(); ++i) {
        if (double(clusterer.count(i)) < min_count) continue;
        tasks.push_back(cluster_to_task(clusterer.mean(i), cfg.arena, d.rewards, d.goal_radius));
    }
    return tasks;
}

// Clustered random directions standing in for learned task weights: a fixed
// set of unit family directions plus per-task Gaussian noise, renormalized.
class SyntheticTaskGenerator {
public:
    SyntheticTaskGenerator(std::size_t dim, std::size_t families, double noise,
                           std::uint64_t seed)
        : dim_(dim), noise_(noise), rng_(seed) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        directions_.resize(families);
        for (auto& dir : directions_) {
            dir.resize(dim);
            double n2 = 0.0;
            for (double& v : dir) {
                v = gauss(rng_);
                n2 += v * v;
            }
            const double inv = 1.0 / std::sqrt(n2);
            for (double& v : dir) v *= inv;
        }
    }

    std::vector<double> next() {
        std::uniform_int_distribution<std::size_t> pick(0, directions_.size() - 1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const std::vector<double>& dir = directions_[pick(rng_)];
        std::vector<double> w(dim_);
        double n2 = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
            w[k] = dir[k] + noise_ * gauss(rng_);
            n2 += w[k] * w[k];
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (double& v : w) v *= inv;
        return w;
    }

private:
    std::size_t dim_;
    double noise_;
    std::mt19937_64 rng_;
    std::vector<std::vector<double>> directions_;
};

// Sequentially integrates synthetic task vectors into one SOM per growth
// threshold, recording node counts at the configured checkpoints.  The task
// sequence is identical across thresholds for a given seed.
inline std::vector<ScalingRecord> scaling_study(const ExperimentConfig& cfg, std::uint64_t seed) {
    const ScalingConfig& sc = cfg.scaling;
    const std::size_t max_tasks = *std::max_element(sc.checkpoints.begin(), sc.checkpoints.end());

    std::vector<std::vector<double>> task_vectors;
    task_vectors.reserve(max_tasks);
    {
        SyntheticTaskGenerator gen(sc.dim, sc.families, sc.noise, seed);
        for (std::size_t t = 0; t < max_tasks; ++t) task_vectors.push_back(gen.next());
    }

    std::vector<std::vector<ScalingRecord>> per_threshold(sc.growth_thresholds.size());
    harness_detail::parallel_for(
        sc.growth_thresholds.size(), cfg.run.threads, [&](std::size_t gi) {
            GsomConfig gcfg = cfg.gsom;
            gcfg.growth_threshold = sc.growth_thresholds[gi];
            std::mt19937_64 rng(harness_detail::mix64(seed ^ (gi + 1)));
            SomMap map =
                SomMap::random_init(gcfg.initial_rows, gcfg.initial_cols, sc.dim, rng);
            std::size_t done = 0;
            for (std::size_t checkpoint : sc.checkpoints) {
                for (; done < checkpoint; ++done)
                    integrate_task(map, task_vectors[done], gcfg, rng);
                per_threshold[gi].push_back(
                    {gcfg.growth_threshold, checkpoint, map.node_count()});
            }
        });

    std::vector<ScalingRecord> records;
    for (const auto& rows : per_threshold) records.insert(records.end(), rows.begin(), rows.end());
    return records;
}

namespace harness_detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << text;
}

inline void emit_plot_scripts(const std::filesystem::path& dir);

}  // namespace harness_detail

// Writes every artifact of an experiment into out_dir: the four CSVs, the
// smoothed returns variant, plot scripts, the serialized SOM and per-task
// weights of each run, and the resolved config echo.
inline void emit_outputs(const ExperimentConfig& cfg, const std::vector<CurriculumResult>& results,
                         const std::vector<ScalingRecord>& scaling, const std::string& out_dir,
                         std::size_t smooth_window = 50) {
    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("emit_outputs: cannot create " + out_dir);

    std::vector<RunMetrics> metrics;
    metrics.reserve(results.size());
    for (const CurriculumResult& r : results) metrics.push_back(r.metrics);

    write_returns_csv((dir / "returns.csv").string(), metrics);
    write_returns_csv((dir / "returns_smoothed.csv").string(), metrics, smooth_window);
    write_similarity_csv((dir / "similarity.csv").string(), metrics);
    write_nodes_csv((dir / "nodes.csv").string(), metrics);
    write_scaling_csv((dir / "scaling.csv").string(), scaling);

    const std::string echo = cfg.to_json().dump(2);
    harness_detail::write_text_file(dir / "config_echo.json", echo + "\n");

    std::string failures;
    for (const CurriculumResult& r : results) {
        if (!r.metrics.failure.empty())
            failures += "run " + std::to_string(r.metrics.run_id) + " (" +
                        to_string(r.metrics.strategy) + "): " + r.metrics.failure + "\n";
        const std::string tag = "run" + std::to_string(r.metrics.run_id) + "_" +
                                to_string(r.metrics.strategy);
        save_map(r.map, echo, (dir / ("som_" + tag + ".somkb")).string());
        for (std::size_t t = 0; t < r.task_weights.size(); ++t)
            save_weights(r.task_weights[t],
                         (dir / ("weights_" + tag + "_task" + std::to_string(t + 1) + ".somwv"))
                             .string());
    }
    if (!failures.empty()) harness_detail::write_text_file(dir / "failures.txt", failures);

    harness_detail::emit_plot_scripts(dir);
}

namespace harness_detail {

inline void emit_plot_scripts(const std::filesystem::path& dir) {
    write_text_file(dir / "plot_returns.py", R"PY(#!/usr/bin/env python3
"""Mean +/- std of smoothed evaluated returns per task and strategy."""
import csv, collections
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import statistics

data = collections.defaultdict(lambda: collections.defaultdict(dict))
with open("returns_smoothed.csv") as f:
    for row in csv.DictReader(f):
        task, strat = int(row["task"]), row["strategy"]
        data[task][strat].setdefault(int(row["episode"]), []).append(float(row["avg_return"]))

tasks = sorted(data)
fig, axes = plt.subplots(1, len(tasks), figsize=(4 * len(tasks), 3.2), sharey=True)
if len(tasks) == 1:
    axes = [axes]
for ax, task in zip(axes, tasks):
    for strat, color in (("som_guided", "tab:blue"), ("epsilon_greedy", "tab:orange")):
        if strat not in data[task]:
            continue
        eps = sorted(data[task][strat])
        mean = [statistics.fmean(data[task][strat][e]) for e in eps]
        std = [statistics.pstdev(data[task][strat][e]) for e in eps]
        ax.plot(eps, mean, color=color, label=strat)
        ax.fill_between(eps, [m - s for m, s in zip(mean, std)],
                        [m + s for m, s in zip(mean, std)], color=color, alpha=0.2)
    ax.set_title(f"task {task}")
    ax.set_xlabel("episode")
axes[0].set_ylabel("average return")
axes[0].legend()
fig.tight_layout()
fig.savefig("returns.png", dpi=150)
print("wrote returns.png")
)PY");

    write_text_file(dir / "plot_similarity.py", R"PY(#!/usr/bin/env python3
"""Best-source cosine similarity per episode, averaged over runs."""
import csv, collections, statistics
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

data = collections.defaultdict(lambda: collections.defaultdict(list))
with open("similarity.csv") as f:
    for row in csv.DictReader(f):
        data[int(row["task"])][int(row["episode"])].append(float(row["best_similarity"]))

tasks = sorted(data)
fig, ax = plt.subplots(figsize=(6, 3.6))
for task in tasks:
    eps = sorted(data[task])
    ax.plot(eps, [statistics.fmean(data[task][e]) for e in eps], label=f"task {task}")
ax.set_xlabel("episode")
ax.set_ylabel("cosine similarity to best source")
ax.legend()
fig.tight_layout()
fig.savefig("similarity.png", dpi=150)
print("wrote similarity.png")
)PY");

    write_text_file(dir / "plot_nodes.py", R"PY(#!/usr/bin/env python3
"""SOM node count after each integrated task, per run."""
import csv, collections
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

data = collections.defaultdict(dict)
with open("nodes.csv") as f:
    for row in csv.DictReader(f):
        data[int(row["run"])][int(row["after_task"])] = int(row["node_count"])

fig, ax = plt.subplots(figsize=(5, 3.4))
for run, series in sorted(data.items()):
    xs = sorted(series)
    ax.plot(xs, [series[x] for x in xs], alpha=0.6)
ax.set_xlabel("tasks integrated")
ax.set_ylabel("node count")
fig.tight_layout()
fig.savefig("nodes.png", dpi=150)
print("wrote nodes.png")
)PY");

    write_text_file(dir / "plot_scaling.py", R"PY(#!/usr/bin/env python3
"""Node counts versus stored task count for each growth threshold."""
import csv, collections
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

data = collections.defaultdict(dict)
with open("scaling.csv") as f:
    for row in csv.DictReader(f):
        data[float(row["g_t"])][int(row["task_count"])] = int(row["node_count"])

fig, ax = plt.subplots(figsize=(5.5, 3.6))
for g_t, series in sorted(data.items()):
    xs = sorted(series)
    ax.plot(xs, [series[x] for x in xs], marker="o", label=f"G_T = {g_t}")
ax.set_xscale("log")
ax.set_xlabel("tasks stored")
ax.set_ylabel("node count")
ax.legend()
fig.tight_layout()
fig.savefig("scaling.png", dpi=150)
print("wrote scaling.png")
)PY");
}

}  // namespace harness_detail

}  // namespace somrl
