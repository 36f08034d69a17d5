#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "somrl/clustering.hpp"
#include "somrl/env.hpp"
#include "somrl/gsom.hpp"
#include "somrl/qlearn.hpp"
#include "somrl/transfer.hpp"

namespace somrl {

struct DiscoveryConfig {
    bool enabled = false;
    std::size_t walk_steps = 100000;
    double theta_c = 0.3;
    // Only feature vectors whose strongest stimulus activation reaches this
    // level are clustered (a stimulus counts as "present").
    double fe_presence_min = 0.85;
    // Clusters visited less than this fraction of observations are ignored.
    double min_cluster_fraction = 0.01;
    double goal_radius = 1.0;
    TaskRewards rewards;

    void validate() const {
        if (theta_c <= 0.0) throw ConfigError("discovery: theta_c must be > 0");
        if (fe_presence_min <= 0.0 || fe_presence_min > 1.0)
            throw ConfigError("discovery: fe_presence_min in (0,1]");
    }
};

struct RunConfig {
    std::size_t episodes_per_task = 1000;
    std::size_t runs = 10;
    std::size_t max_steps_per_episode = 2000;
    int eval_starts = 100;
    int eval_horizon = 100;
    double eval_gamma = 1.0;
    double init_weight_scale = 0.01;
    std::size_t rbf_per_dim = 100;
    double rbf_width_factor = 1.5;
    std::string out_dir = "out";
    unsigned threads = 0;  // 0 = hardware concurrency
    std::uint64_t base_seed = 1;

    void validate() const {
        if (episodes_per_task < 1) throw ConfigError("run: episodes_per_task must be >= 1");
        if (runs < 1) throw ConfigError("run: runs must be >= 1");
        if (max_steps_per_episode < 1) throw ConfigError("run: max_steps_per_episode >= 1");
        if (eval_starts < 1 || eval_horizon < 1) throw ConfigError("run: eval settings >= 1");
        if (rbf_per_dim < 2) throw ConfigError("run: rbf_per_dim >= 2");
    }
};

struct ScalingConfig {
    std::vector<double> growth_thresholds = {0.1, 0.3, 0.5};
    std::vector<std::size_t> checkpoints = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
    std::size_t families = 10;
    double noise = 0.1;
    std::size_t dim = 1836;

    void validate() const {
        if (growth_thresholds.empty()) throw ConfigError("scaling: need growth thresholds");
        if (checkpoints.empty()) throw ConfigError("scaling: need checkpoints");
        if (families < 1) throw ConfigError("scaling: families >= 1");
        if (dim < 2) throw ConfigError("scaling: dim >= 2");
    }
};

struct ExperimentConfig {
    ArenaSpec arena;
    std::vector<TaskSpec> tasks;
    QLambdaConfig qlearn;
    GsomConfig gsom;
    TransferPolicyConfig transfer;
    DiscoveryConfig discovery;
    RunConfig run;
    ScalingConfig scaling;

    void validate() const {
        arena.validate();
        if (tasks.empty() && !discovery.enabled)
            throw ConfigError("config: no tasks and discovery disabled");
        for (const TaskSpec& t : tasks) {
            t.validate();
            if (!arena.valid_position(t.goal_center))
                throw ConfigError("config: goal center outside arena or inside obstacle");
        }
        qlearn.validate();
        gsom.validate();
        transfer.validate();
        discovery.validate();
        run.validate();
        scaling.validate();
    }

    static ExperimentConfig defaults();
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::json to_json() const;
};

// Default five-task layout: tasks 1, 4 and 5 share the stimulus zone in the
// upper left and have mutually close goals; tasks 2 and 3 sit apart in their
// own zones.  Walls force detours so exploration quality matters.
inline ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig cfg;
    cfg.arena.width = 25.0;
    cfg.arena.height = 25.0;
    cfg.arena.speed = 6.0;
    cfg.arena.step_duration = 0.2;
    cfg.arena.obstacles = {
        {11.0, 14.0, 1.0, 8.0},  // vertical wall, upper middle
        {14.0, 9.0, 8.0, 1.0},   // horizontal wall, right side
        {4.0, 7.0, 3.0, 3.0},    // block, lower left
    };
    cfg.arena.stimuli = {
        {{5.0, 19.0}, 3.0},
        {{9.0, 21.0}, 3.0},
        {{21.0, 19.0}, 2.5},
        {{18.0, 5.0}, 2.5},
    };

    auto make_task = [&](double gx, double gy) {
        TaskSpec t;
        t.goal_center = {gx, gy};
        t.goal_radius = 1.0;
        t.goal_reward = 100.0;
        t.obstacle_penalty = -100.0;
        t.living_penalty = -10.0;
        t.fe_signature = stimulus_vector(t.goal_center, cfg.arena);
        return t;
    };
    cfg.tasks = {
        make_task(5.5, 20.5),   // task 1
        make_task(20.5, 18.0),  // task 2
        make_task(17.5, 6.0),   // task 3
        make_task(8.5, 19.0),   // task 4
        make_task(6.5, 17.5),   // task 5
    };
    return cfg;
}

namespace config_detail {

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace config_detail

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    using config_detail::get_if;
    ExperimentConfig cfg = defaults();

    if (j.contains("arena")) {
        const auto& a = j.at("arena");
        get_if(a, "width", cfg.arena.width);
        get_if(a, "height", cfg.arena.height);
        get_if(a, "speed", cfg.arena.speed);
        get_if(a, "step_duration", cfg.arena.step_duration);
        if (a.contains("obstacles")) {
            cfg.arena.obstacles.clear();
            for (const auto& o : a.at("obstacles"))
                cfg.arena.obstacles.push_back(
                    {o.at("x").get<double>(), o.at("y").get<double>(), o.at("w").get<double>(),
                     o.at("h").get<double>()});
        }
        if (a.contains("stimuli")) {
            cfg.arena.stimuli.clear();
            for (const auto& s : a.at("stimuli"))
                cfg.arena.stimuli.push_back(
                    {{s.at("x").get<double>(), s.at("y").get<double>()}, s.at("rho").get<double>()});
        }
    }
    if (j.contains("tasks")) {
        cfg.tasks.clear();
        for (const auto& t : j.at("tasks")) {
            TaskSpec task;
            task.goal_center = {t.at("goal_x").get<double>(), t.at("goal_y").get<double>()};
            config_detail::get_if(t, "goal_radius", task.goal_radius);
            config_detail::get_if(t, "goal_reward", task.goal_reward);
            config_detail::get_if(t, "obstacle_penalty", task.obstacle_penalty);
            config_detail::get_if(t, "living_penalty", task.living_penalty);
            task.fe_signature = stimulus_vector(task.goal_center, cfg.arena);
            cfg.tasks.push_back(task);
        }
    }
    if (j.contains("qlearn")) {
        const auto& q = j.at("qlearn");
        get_if(q, "alpha", cfg.qlearn.alpha);
        get_if(q, "gamma", cfg.qlearn.gamma);
        get_if(q, "lambda", cfg.qlearn.trace_decay);
        get_if(q, "epsilon", cfg.qlearn.epsilon);
        get_if(q, "divergence_limit", cfg.qlearn.divergence_limit);
    }
    if (j.contains("gsom")) {
        const auto& g = j.at("gsom");
        get_if(g, "initial_rows", cfg.gsom.initial_rows);
        get_if(g, "initial_cols", cfg.gsom.initial_cols);
        get_if(g, "sigma0", cfg.gsom.sigma0);
        get_if(g, "tau1", cfg.gsom.tau1);
        get_if(g, "kappa0", cfg.gsom.kappa0);
        get_if(g, "tau2", cfg.gsom.tau2);
        get_if(g, "tau2_literal", cfg.gsom.tau2_literal);
        get_if(g, "growth_threshold", cfg.gsom.growth_threshold);
        get_if(g, "iterations", cfg.gsom.iterations);
        get_if(g, "epoch_presentation", cfg.gsom.epoch_presentation);
        get_if(g, "squared_neighborhood", cfg.gsom.squared_neighborhood);
        get_if(g, "persistent_errors", cfg.gsom.persistent_errors);
        get_if(g, "post_expansion_baseline", cfg.gsom.post_expansion_baseline);
        get_if(g, "max_nodes", cfg.gsom.max_nodes);
    }
    if (j.contains("transfer")) {
        const auto& t = j.at("transfer");
        get_if(t, "epsilon", cfg.transfer.epsilon);
        get_if(t, "advice_refresh_interval", cfg.transfer.advice_refresh_interval);
    }
    if (j.contains("discovery")) {
        const auto& d = j.at("discovery");
        get_if(d, "enabled", cfg.discovery.enabled);
        get_if(d, "walk_steps", cfg.discovery.walk_steps);
        get_if(d, "theta_c", cfg.discovery.theta_c);
        get_if(d, "fe_presence_min", cfg.discovery.fe_presence_min);
        get_if(d, "min_cluster_fraction", cfg.discovery.min_cluster_fraction);
        get_if(d, "goal_radius", cfg.discovery.goal_radius);
        get_if(d, "goal_reward", cfg.discovery.rewards.goal_reward);
        get_if(d, "obstacle_penalty", cfg.discovery.rewards.obstacle_penalty);
        get_if(d, "living_penalty", cfg.discovery.rewards.living_penalty);
    }
    if (j.contains("run")) {
        const auto& r = j.at("run");
        get_if(r, "episodes_per_task", cfg.run.episodes_per_task);
        get_if(r, "runs", cfg.run.runs);
        get_if(r, "max_steps_per_episode", cfg.run.max_steps_per_episode);
        get_if(r, "eval_starts", cfg.run.eval_starts);
        get_if(r, "eval_horizon", cfg.run.eval_horizon);
        get_if(r, "eval_gamma", cfg.run.eval_gamma);
        get_if(r, "init_weight_scale", cfg.run.init_weight_scale);
        get_if(r, "rbf_per_dim", cfg.run.rbf_per_dim);
        get_if(r, "rbf_width_factor", cfg.run.rbf_width_factor);
        get_if(r, "out_dir", cfg.run.out_dir);
        get_if(r, "threads", cfg.run.threads);
        get_if(r, "base_seed", cfg.run.base_seed);
    }
    if (j.contains("scaling")) {
        const auto& s = j.at("scaling");
        get_if(s, "growth_thresholds", cfg.scaling.growth_thresholds);
        get_if(s, "checkpoints", cfg.scaling.checkpoints);
        get_if(s, "families", cfg.scaling.families);
        get_if(s, "noise", cfg.scaling.noise);
        get_if(s, "dim", cfg.scaling.dim);
    }

    if (const char* env_out = std::getenv("SOMRL_OUT_DIR"); env_out && *env_out)
        cfg.run.out_dir = env_out;
    cfg.validate();
    return cfg;
}

inline ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: parse error in " + path + ": " + e.what());
    }
    return from_json(j);
}

inline nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["arena"] = {{"width", arena.width},
                  {"height", arena.height},
                  {"speed", arena.speed},
                  {"step_duration", arena.step_duration}};
    for (const Rect& o : arena.obstacles)
        j["arena"]["obstacles"].push_back({{"x", o.x}, {"y", o.y}, {"w", o.w}, {"h", o.h}});
    for (const Stimulus& s : arena.stimuli)
        j["arena"]["stimuli"].push_back({{"x", s.center.x}, {"y", s.center.y}, {"rho", s.rho}});
    for (const TaskSpec& t : tasks)
        j["tasks"].push_back({{"goal_x", t.goal_center.x},
                              {"goal_y", t.goal_center.y},
                              {"goal_radius", t.goal_radius},
                              {"goal_reward", t.goal_reward},
                              {"obstacle_penalty", t.obstacle_penalty},
                              {"living_penalty", t.living_penalty}});
    j["qlearn"] = {{"alpha", qlearn.alpha},
                   {"gamma", qlearn.gamma},
                   {"lambda", qlearn.trace_decay},
                   {"epsilon", qlearn.epsilon},
                   {"divergence_limit", qlearn.divergence_limit}};
    j["gsom"] = {{"initial_rows", gsom.initial_rows},
                 {"initial_cols", gsom.initial_cols},
                 {"sigma0", gsom.sigma0},
                 {"tau1", gsom.tau1},
                 {"kappa0", gsom.kappa0},
                 {"tau2", gsom.tau2},
                 {"tau2_literal", gsom.tau2_literal},
                 {"growth_threshold", gsom.growth_threshold},
                 {"iterations", gsom.iterations},
                 {"epoch_presentation", gsom.epoch_presentation},
                 {"squared_neighborhood", gsom.squared_neighborhood},
                 {"persistent_errors", gsom.persistent_errors},
                 {"post_expansion_baseline", gsom.post_expansion_baseline},
                 {"max_nodes", gsom.max_nodes}};
    j["transfer"] = {{"epsilon", transfer.epsilon},
                     {"advice_refresh_interval", transfer.advice_refresh_interval}};
    j["discovery"] = {{"enabled", discovery.enabled},
                      {"walk_steps", discovery.walk_steps},
                      {"theta_c", discovery.theta_c},
                      {"fe_presence_min", discovery.fe_presence_min},
                      {"min_cluster_fraction", discovery.min_cluster_fraction},
                      {"goal_radius", discovery.goal_radius}};
    j["run"] = {{"episodes_per_task", run.episodes_per_task},
                {"runs", run.runs},
                {"max_steps_per_episode", run.max_steps_per_episode},
                {"eval_starts", run.eval_starts},
                {"eval_horizon", run.eval_horizon},
                {"eval_gamma", run.eval_gamma},
                {"init_weight_scale", run.init_weight_scale},
                {"rbf_per_dim", run.rbf_per_dim},
                {"rbf_width_factor", run.rbf_width_factor},
                {"out_dir", run.out_dir},
                {"threads", run.threads},
                {"base_seed", run.base_seed}};
    j["scaling"] = {{"growth_thresholds", scaling.growth_thresholds},
                    {"checkpoints", scaling.checkpoints},
                    {"families", scaling.families},
                    {"noise", scaling.noise},
                    {"dim", scaling.dim}};
    return j;
}

}  // namespace somrl
