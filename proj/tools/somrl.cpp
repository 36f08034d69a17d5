#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "somrl/config.hpp"
#include "somrl/harness.hpp"
#include "somrl/som_io.hpp"

namespace {

somrl::ExperimentConfig load_config(const std::string& path, std::uint64_t seed_override,
                                    const std::string& out_override) {
    somrl::ExperimentConfig cfg = path.empty() ? somrl::ExperimentConfig::defaults()
                                               : somrl::ExperimentConfig::from_file(path);
    if (seed_override != 0) cfg.run.base_seed = seed_override;
    if (!out_override.empty()) cfg.run.out_dir = out_override;
    if (const char* env_out = std::getenv("SOMRL_OUT_DIR"); env_out && *env_out)
        cfg.run.out_dir = env_out;
    return cfg;
}

int cmd_curriculum(const std::string& config_path, std::uint64_t seed, const std::string& out,
                   const std::string& strategy, bool with_scaling) {
    somrl::ExperimentConfig cfg = load_config(config_path, seed, out);

    if (cfg.discovery.enabled && cfg.tasks.empty()) {
        std::mt19937_64 rng(cfg.run.base_seed);
        cfg.tasks = somrl::discover_tasks(cfg, rng);
        std::printf("discovered %zu tasks\n", cfg.tasks.size());
        for (std::size_t i = 0; i < cfg.tasks.size(); ++i)
            std::printf("  task %zu: goal (%.2f, %.2f)\n", i + 1, cfg.tasks[i].goal_center.x,
                        cfg.tasks[i].goal_center.y);
        if (cfg.tasks.empty()) {
            std::fprintf(stderr, "error: discovery produced no tasks\n");
            return 1;
        }
    }

    std::vector<somrl::CurriculumResult> results;
    if (strategy == "both") {
        results = somrl::run_comparison(cfg);
    } else {
        const somrl::Strategy s = somrl::strategy_from_string(strategy);
        for (std::size_t r = 0; r < cfg.run.runs; ++r)
            results.push_back(somrl::run_curriculum(cfg, s, r, cfg.run.base_seed + r));
    }

    std::vector<somrl::ScalingRecord> scaling;
    if (with_scaling) scaling = somrl::scaling_study(cfg, cfg.run.base_seed);

    somrl::emit_outputs(cfg, results, scaling, cfg.run.out_dir);
    std::printf("wrote outputs to %s\n", cfg.run.out_dir.c_str());

    for (const somrl::CurriculumResult& r : results) {
        if (!r.metrics.failure.empty())
            std::fprintf(stderr, "run %zu (%s) failed: %s\n", r.metrics.run_id,
                         somrl::to_string(r.metrics.strategy), r.metrics.failure.c_str());
    }
    return 0;
}

int cmd_scaling(const std::string& config_path, std::uint64_t seed, const std::string& out) {
    somrl::ExperimentConfig cfg = load_config(config_path, seed, out);
    const std::vector<somrl::ScalingRecord> records = somrl::scaling_study(cfg, cfg.run.base_seed);
    somrl::emit_outputs(cfg, {}, records, cfg.run.out_dir);
    for (const somrl::ScalingRecord& r : records)
        std::printf("G_T=%.3g  tasks=%zu  nodes=%zu  nodes/task=%.4f\n", r.g_t, r.task_count,
                    r.node_count, r.nodes_per_task());
    std::printf("wrote outputs to %s\n", cfg.run.out_dir.c_str());
    return 0;
}

int cmd_replay(const std::string& som_path, const std::vector<std::string>& weight_paths,
               const std::string& config_path, std::uint64_t seed) {
    const somrl::LoadedMap loaded = somrl::load_map(som_path);
    const somrl::SomMap& map = loaded.map;
    std::printf("map: %zux%zu nodes, dim %zu\n", map.rows(), map.cols(), map.dim());

    somrl::ExperimentConfig cfg = load_config(config_path, seed, "");
    const bool can_eval = !config_path.empty() && weight_paths.size() == cfg.tasks.size();
    somrl::RadialBasisCoder coder(cfg.arena, cfg.run.rbf_per_dim, cfg.run.rbf_width_factor);

    for (std::size_t i = 0; i < weight_paths.size(); ++i) {
        const somrl::WeightVector w = somrl::load_weights(weight_paths[i]);
        const somrl::SourceSelection sel = somrl::select_source(map, w);
        std::printf("%s: best node %zu (row %zu, col %zu), similarity %.4f",
                    weight_paths[i].c_str(), sel.node_index, map.row_of(sel.node_index),
                    map.col_of(sel.node_index), sel.similarity);
        if (can_eval) {
            std::mt19937_64 rng(cfg.run.base_seed + i);
            const double ret = somrl::evaluate_return(w, coder, cfg.tasks[i], cfg.arena,
                                                      cfg.run.eval_starts, cfg.run.eval_horizon,
                                                      cfg.run.eval_gamma, rng);
            std::printf(", eval return %.2f", ret);
        }
        std::printf("\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SOM-based knowledge storage and transfer for multi-task RL"};
    app.require_subcommand(1);

    std::string config_path, out_dir, strategy = "both", som_path;
    std::vector<std::string> weight_paths;
    std::uint64_t seed = 0;
    bool with_scaling = false;

    CLI::App* curriculum = app.add_subcommand(
        "curriculum", "Learn the configured tasks in order and compare exploration strategies");
    curriculum->add_option("--config", config_path, "JSON config file (defaults built in)");
    curriculum->add_option("--seed", seed, "base seed override");
    curriculum->add_option("--out", out_dir, "output directory override");
    curriculum->add_option("--strategy", strategy, "som_guided | epsilon_greedy | both")
        ->check(CLI::IsMember({"som_guided", "epsilon_greedy", "both"}));
    curriculum->add_flag("--with-scaling", with_scaling, "also run the scaling study");

    CLI::App* scaling = app.add_subcommand(
        "scaling", "Synthetic knowledge-base scaling study over growth thresholds");
    scaling->add_option("--config", config_path, "JSON config file");
    scaling->add_option("--seed", seed, "base seed override");
    scaling->add_option("--out", out_dir, "output directory override");

    CLI::App* replay = app.add_subcommand("replay", "Inspect a serialized map and saved weights");
    replay->add_option("--som", som_path, "serialized SOM file")->required();
    replay->add_option("--weights", weight_paths, "saved weight vector files");
    replay->add_option("--config", config_path, "config for evaluation rollouts");
    replay->add_option("--seed", seed, "evaluation seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (curriculum->parsed())
            return cmd_curriculum(config_path, seed, out_dir, strategy, with_scaling);
        if (scaling->parsed()) return cmd_scaling(config_path, seed, out_dir);
        if (replay->parsed()) return cmd_replay(som_path, weight_paths, config_path, seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
