#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "somrl/errors.hpp"

namespace somrl {

enum class Strategy { kSomGuided, kEpsilonGreedy };

inline const char* to_string(Strategy s) {
    return s == Strategy::kSomGuided ? "som_guided" : "epsilon_greedy";
}

inline Strategy strategy_from_string(const std::string& s) {
    if (s == "som_guided") return Strategy::kSomGuided;
    if (s == "epsilon_greedy") return Strategy::kEpsilonGreedy;
    throw ConfigError("unknown strategy: " + s);
}

struct EpisodeRecord {
    double avg_return = 0.0;
    double best_similarity = 0.0;
    double wall_clock_ms = 0.0;
};

struct TaskMetrics {
    std::vector<EpisodeRecord> episodes;
    std::size_t node_count_after = 0;  // SOM size once this task was integrated
};

struct RunMetrics {
    std::size_t run_id = 0;
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::kEpsilonGreedy;
    std::vector<TaskMetrics> tasks;
    std::string failure;  // non-empty when the run aborted
};

struct ScalingRecord {
    double g_t = 0.0;
    std::size_t task_count = 0;
    std::size_t node_count = 0;

    double nodes_per_task() const { return double(node_count) / double(task_count); }
};

// Trailing moving average; entry i averages the last min(i+1, window) values.
inline std::vector<double> moving_average(const std::vector<double>& xs, std::size_t window) {
    std::vector<double> out(xs.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        acc += xs[i];
        if (i >= window) acc -= xs[i - window];
        out[i] = acc / double(std::min(i + 1, window));
    }
    return out;
}

namespace csv_detail {

// Shortest round-trippable decimal form, identical across runs.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace csv_detail

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : os_(path) {
        if (!os_) throw ConfigError("csv: cannot open " + path);
        os_ << header << '\n';
    }

    template <typename... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((os_ << (first ? "" : ","), first = false, put(fields)), ...);
        os_ << '\n';
    }

private:
    void put(double v) { os_ << csv_detail::fmt(v); }
    void put(std::size_t v) { os_ << v; }
    void put(int v) { os_ << v; }
    void put(const char* v) { os_ << v; }
    void put(const std::string& v) { os_ << v; }

    std::ofstream os_;
};

inline void write_returns_csv(const std::string& path, const std::vector<RunMetrics>& runs,
                              std::size_t smooth_window = 0) {
    CsvWriter csv(path, "run,task,episode,strategy,avg_return");
    for (const RunMetrics& rm : runs) {
        for (std::size_t t = 0; t < rm.tasks.size(); ++t) {
            std::vector<double> values;
            values.reserve(rm.tasks[t].episodes.size());
            for (const EpisodeRecord& ep : rm.tasks[t].episodes) values.push_back(ep.avg_return);
            if (smooth_window > 0) values = moving_average(values, smooth_window);
            for (std::size_t e = 0; e < values.size(); ++e)
                csv.row(rm.run_id, t + 1, e, to_string(rm.strategy), values[e]);
        }
    }
}

inline void write_similarity_csv(const std::string& path, const std::vector<RunMetrics>& runs) {
    CsvWriter csv(path, "run,task,episode,best_similarity");
    for (const RunMetrics& rm : runs)
        for (std::size_t t = 0; t < rm.tasks.size(); ++t)
            for (std::size_t e = 0; e < rm.tasks[t].episodes.size(); ++e)
                csv.row(rm.run_id, t + 1, e, rm.tasks[t].episodes[e].best_similarity);
}

inline void write_nodes_csv(const std::string& path, const std::vector<RunMetrics>& runs) {
    CsvWriter csv(path, "run,after_task,node_count");
    for (const RunMetrics& rm : runs)
        for (std::size_t t = 0; t < rm.tasks.size(); ++t)
            csv.row(rm.run_id, t + 1, rm.tasks[t].node_count_after);
}

inline void write_scaling_csv(const std::string& path, const std::vector<ScalingRecord>& records) {
    CsvWriter csv(path, "g_t,task_count,node_count");
    for (const ScalingRecord& r : records) csv.row(r.g_t, r.task_count, r.node_count);
}

}  // namespace somrl
