#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "somrl/env.hpp"
#include "somrl/errors.hpp"
#include "somrl/features.hpp"

namespace somrl {

// Linear Q-function parameters: one weight block of length `block_len` per
// action, concatenated in action order.
struct WeightVector {
    std::size_t block_len = 0;
    std::vector<double> values;

    static WeightVector zeros(std::size_t block_len, std::size_t n_actions) {
        return {block_len, std::vector<double>(block_len * n_actions, 0.0)};
    }

    std::size_t n_actions() const { return block_len == 0 ? 0 : values.size() / block_len; }

    std::span<const double> block(std::size_t a) const {
        return {values.data() + a * block_len, block_len};
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

// Eligibility traces, same shape as the weights they update.
struct Traces {
    std::size_t block_len = 0;
    std::vector<double> values;

    static Traces zeros(std::size_t block_len, std::size_t n_actions) {
        return {block_len, std::vector<double>(block_len * n_actions, 0.0)};
    }

    void reset() { std::fill(values.begin(), values.end(), 0.0); }
};

struct QLambdaConfig {
    double alpha = 0.3;        // learning rate
    double gamma = 0.9;        // discount
    double trace_decay = 0.9;  // lambda
    double epsilon = 0.3;      // exploration probability
    double divergence_limit = 1e9;

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("qlearn: alpha in (0,1]");
        if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("qlearn: gamma in [0,1)");
        if (!(trace_decay >= 0.0 && trace_decay <= 1.0)) throw ConfigError("qlearn: lambda in [0,1]");
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("qlearn: epsilon in [0,1]");
    }
};

inline double q_value(const WeightVector& w, const FeatureVector& f, Action a) {
    if (f.size != w.block_len) throw ContractViolation("q_value: feature/weight shape mismatch");
    const double* block = w.values.data() + std::size_t(a) * w.block_len;
    double q = 0.0;
    for (std::size_t k = 0; k < f.index.size(); ++k) q += block[f.index[k]] * f.value[k];
    return q;
}

inline void q_values(const WeightVector& w, const FeatureVector& f, std::vector<double>& out) {
    if (f.size != w.block_len) throw ContractViolation("q_values: feature/weight shape mismatch");
    out.assign(w.n_actions(), 0.0);
    for (std::size_t a = 0; a < out.size(); ++a) {
        const double* block = w.values.data() + a * w.block_len;
        double q = 0.0;
        for (std::size_t k = 0; k < f.index.size(); ++k) q += block[f.index[k]] * f.value[k];
        out[a] = q;
    }
}

// Argmax of q_value over all actions; ties go to the lowest action id.
inline Action greedy_action(const WeightVector& w, const FeatureVector& f) {
    std::size_t best = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < w.n_actions(); ++a) {
        const double q = q_value(w, f, Action(a));
        if (q > best_q) {
            best_q = q;
            best = a;
        }
    }
    return Action(best);
}

// One Watkins Q(lambda) update with replacing traces.  Traces decay by
// gamma*lambda, the taken action's active features are refreshed to
// max(trace, feature), weights move by alpha * delta * trace, and traces are
// cut after the update when the taken action was exploratory.
inline void q_lambda_step(WeightVector& w, Traces& z, const FeatureVector& f, Action a,
                          const Transition& tr, const FeatureVector& f_next, bool was_greedy,
                          const QLambdaConfig& cfg) {
    if (z.values.size() != w.values.size())
        throw ContractViolation("q_lambda_step: trace/weight shape mismatch");

    double target = tr.reward;
    if (!tr.terminal) {
        double best_next = -std::numeric_limits<double>::infinity();
        for (std::size_t a2 = 0; a2 < w.n_actions(); ++a2)
            best_next = std::max(best_next, q_value(w, f_next, Action(a2)));
        target += cfg.gamma * best_next;
    }
    const double delta = target - q_value(w, f, a);
    if (!std::isfinite(delta)) throw DivergenceError("q_lambda_step: non-finite TD error");

    const double decay = cfg.gamma * cfg.trace_decay;
    for (double& v : z.values) v *= decay;
    double* zblock = z.values.data() + std::size_t(a) * z.block_len;
    for (std::size_t k = 0; k < f.index.size(); ++k)
        zblock[f.index[k]] = std::max(zblock[f.index[k]], f.value[k]);

    const double scale = cfg.alpha * delta;
    double max_abs = 0.0;
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        w.values[i] += scale * z.values[i];
        max_abs = std::max(max_abs, std::abs(w.values[i]));
    }
    if (max_abs > cfg.divergence_limit)
        throw DivergenceError("q_lambda_step: weight magnitude exceeded divergence limit");

    if (!was_greedy) z.reset();
}

// Mean cumulative reward of greedy rollouts from `n_starts` random starts,
// each at most `horizon` steps (gamma_eval = 1 gives undiscounted returns).
inline double evaluate_return(const WeightVector& w, const RadialBasisCoder& coder,
                              const TaskSpec& task, const ArenaSpec& arena, int n_starts,
                              int horizon, double gamma_eval, std::mt19937_64& rng) {
    if (n_starts < 1 || horizon < 1)
        throw ContractViolation("evaluate_return: n_starts and horizon must be >= 1");
    double total = 0.0;
    for (int s = 0; s < n_starts; ++s) {
        Vec2 p = sample_start(arena, task, rng);
        double ret = 0.0;
        double disc = 1.0;
        for (int t = 0; t < horizon; ++t) {
            const FeatureVector f = coder.featurize(p, stimulus_vector(p, arena));
            const Transition tr = step(p, greedy_action(w, f), task, arena);
            ret += disc * tr.reward;
            disc *= gamma_eval;
            p = tr.next;
            if (tr.terminal) break;
        }
        total += ret;
    }
    return total / double(n_starts);
}

}  // namespace somrl
