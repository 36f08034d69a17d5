#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "somrl/env.hpp"
#include "somrl/errors.hpp"
#include "somrl/vecops.hpp"

namespace somrl {

// Online leader clustering over environment feature vectors.  An observation
// joins the nearest existing cluster when its Euclidean distance to that
// cluster's mean is below theta_c; otherwise it seeds a new cluster.
class LeaderClusterer {
public:
    explicit LeaderClusterer(double theta_c) : theta_c_(theta_c) {
        if (theta_c <= 0.0) throw ConfigError("clustering: theta_c must be > 0");
    }

    std::size_t observe(const std::vector<double>& fe) {
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < means_.size(); ++i) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < fe.size(); ++k) {
                const double d = fe[k] - means_[i][k];
                d2 += d * d;
            }
            if (d2 < best_d2) {
                best_d2 = d2;
                best = i;
            }
        }
        if (!means_.empty() && std::sqrt(best_d2) < theta_c_) {
            ++counts_[best];
            const double inv = 1.0 / double(counts_[best]);
            for (std::size_t k = 0; k < fe.size(); ++k)
                means_[best][k] += (fe[k] - means_[best][k]) * inv;
            return best;
        }
        means_.push_back(fe);
        counts_.push_back(1);
        return means_.size() - 1;
    }

    std::size_t cluster_count() const { return means_.size(); }
    const std::vector<double>& mean(std::size_t i) const { return means_.at(i); }
    std::size_t count(std::size_t i) const { return counts_.at(i); }
    double theta_c() const { return theta_c_; }

private:
    double theta_c_;
    std::vector<std::vector<double>> means_;
    std::vector<std::size_t> counts_;
};

struct TaskRewards {
    double goal_reward = 100.0;
    double obstacle_penalty = -100.0;
    double living_penalty = -10.0;
};

// Recovers a navigation task from a cluster mean: the goal is the valid
// arena position whose stimulus signature is most cosine-similar to the
// mean, found by dense grid search.
inline TaskSpec cluster_to_task(const std::vector<double>& mean, const ArenaSpec& arena,
                                const TaskRewards& rewards = {}, double goal_radius = 1.0,
                                double resolution = 0.1) {
    if (mean.size() != arena.stimuli.size())
        throw ContractViolation("cluster_to_task: mean length != stimulus count");
    if (norm(mean) == 0.0) throw ContractViolation("cluster_to_task: all-zero cluster mean");

    Vec2 best{0.0, 0.0};
    double best_c = -2.0;
    bool found = false;
    const long nx = long(arena.width / resolution);
    const long ny = long(arena.height / resolution);
    for (long iy = 0; iy <= ny; ++iy) {
        for (long ix = 0; ix <= nx; ++ix) {
            const Vec2 p{double(ix) * resolution, double(iy) * resolution};
            if (!arena.valid_position(p)) continue;
            const std::vector<double> fe = stimulus_vector(p, arena);
            if (squared_norm(fe) == 0.0) continue;
            const double c = cosine(fe, mean);
            if (c > best_c) {
                best_c = c;
                best = p;
                found = true;
            }
        }
    }
    if (!found) throw ConfigError("cluster_to_task: no valid arena position");

    TaskSpec task;
    task.goal_center = best;
    task.goal_radius = goal_radius;
    task.goal_reward = rewards.goal_reward;
    task.obstacle_penalty = rewards.obstacle_penalty;
    task.living_penalty = rewards.living_penalty;
    task.fe_signature = stimulus_vector(best, arena);
    return task;
}

}  // namespace somrl
