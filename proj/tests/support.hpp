#pragma once

// Shared helpers for the test suites.

#include <random>
#include <vector>

#include "somrl/features.hpp"
#include "somrl/qlearn.hpp"

namespace somrl::testing {

inline FeatureVector one_hot(std::size_t size, std::size_t idx, double v = 1.0) {
    FeatureVector f;
    f.size = size;
    f.index = {std::uint32_t(idx)};
    f.value = {v};
    return f;
}

inline FeatureVector random_features(std::size_t size, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> count(1, std::min<std::size_t>(size, 12));
    std::uniform_int_distribution<std::uint32_t> pick(0, std::uint32_t(size - 1));
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    FeatureVector f;
    f.size = size;
    std::vector<bool> used(size, false);
    const std::size_t n = count(rng);
    while (f.index.size() < n) {
        const std::uint32_t i = pick(rng);
        if (used[i]) continue;
        used[i] = true;
        f.index.push_back(i);
        f.value.push_back(val(rng));
    }
    return f;
}

inline WeightVector random_weights(std::size_t block_len, std::size_t n_actions,
                                   std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    WeightVector w = WeightVector::zeros(block_len, n_actions);
    for (double& v : w.values) v = g(rng);
    return w;
}

// Deterministic two-state, two-action chain: action 1 advances (state 1's
// action 1 reaches the goal, reward +10); action 0 stays put for free.
struct ChainMdp {
    static constexpr std::size_t kStates = 2;
    static constexpr std::size_t kActions = 2;
    static constexpr double kGoalReward = 10.0;

    struct Outcome {
        std::size_t next = 0;
        double reward = 0.0;
        bool terminal = false;
    };

    static Outcome apply(std::size_t s, std::size_t a) {
        if (a == 0) return {s, 0.0, false};
        if (s == 0) return {1, 0.0, false};
        return {1, kGoalReward, true};
    }

    // Q* by value iteration.
    static std::vector<std::vector<double>> optimal_q(double gamma, int sweeps = 1000) {
        std::vector<std::vector<double>> q(kStates, std::vector<double>(kActions, 0.0));
        for (int it = 0; it < sweeps; ++it) {
            for (std::size_t s = 0; s < kStates; ++s) {
                for (std::size_t a = 0; a < kActions; ++a) {
                    const Outcome o = apply(s, a);
                    const double boot =
                        o.terminal ? 0.0 : std::max(q[o.next][0], q[o.next][1]);
                    q[s][a] = o.reward + gamma * boot;
                }
            }
        }
        return q;
    }
};

}  // namespace somrl::testing
