#pragma once

#include <random>
#include <span>
#include <vector>

#include "somrl/errors.hpp"
#include "somrl/gsom.hpp"
#include "somrl/qlearn.hpp"

namespace somrl {

struct TransferPolicyConfig {
    double epsilon = 0.3;  // probability of following source advice
    std::size_t advice_refresh_interval = 1;  // episodes between source re-selection

    void validate() const {
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("transfer: epsilon in [0,1]");
        if (advice_refresh_interval < 1)
            throw ConfigError("transfer: advice_refresh_interval must be >= 1");
    }
};

struct SourceSelection {
    std::size_t node_index = 0;
    double similarity = -2.0;
    std::vector<double> weights;
};

// The stored weight vector most cosine-similar to the target's; ties go to
// the lowest row-major node index.
inline SourceSelection select_source(const SomMap& map, std::span<const double> w_target) {
    const WinnerResult win = find_winner(map, w_target);
    std::span<const double> w = map.node_weights(win.index);
    return {win.index, win.similarity, std::vector<double>(w.begin(), w.end())};
}

inline SourceSelection select_source(const SomMap& map, const WeightVector& w_target) {
    return select_source(map, std::span<const double>(w_target.values));
}

// With probability epsilon act greedily per the source weights, otherwise
// exploit the target weights.
inline Action som_guided_action(const WeightVector& w_target, const WeightVector& w_source,
                                const FeatureVector& f, double epsilon, std::mt19937_64& rng) {
    std::bernoulli_distribution follow_source(epsilon);
    return follow_source(rng) ? greedy_action(w_source, f) : greedy_action(w_target, f);
}

// Best-node similarity for each snapshot of an evolving target weight vector.
inline std::vector<double> similarity_trace(const std::vector<std::vector<double>>& snapshots,
                                            const SomMap& map) {
    std::vector<double> trace;
    trace.reserve(snapshots.size());
    for (const auto& w : snapshots) trace.push_back(find_winner(map, w).similarity);
    return trace;
}

}  // namespace somrl
