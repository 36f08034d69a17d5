#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "somrl/errors.hpp"
#include "somrl/vecops.hpp"

namespace somrl {

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    return cosine(a, b);
}

struct GsomConfig {
    std::size_t initial_rows = 2;
    std::size_t initial_cols = 2;
    double sigma0 = 2.0;   // initial neighborhood width, in grid units
    double tau1 = 250.0;   // neighborhood time constant
    double kappa0 = 0.6;   // initial learning rate
    // Learning-rate time constant.  Interpreted as a fraction of `iterations`
    // by default (effective constant tau2 * iterations); set tau2_literal for
    // kappa = kappa0 * exp(-i / tau2) with tau2 in raw iterations.
    double tau2 = 1.0;
    bool tau2_literal = false;
    double growth_threshold = 0.3;  // G_T
    std::size_t iterations = 1000;  // input presentations per training run
    // Present the full input set once per epoch (shuffled) and evaluate the
    // growth trigger on per-epoch error increments.  When false, each
    // iteration presents a single sampled input and the trigger runs per
    // presentation.
    bool epoch_presentation = true;
    // h = exp(-d^2 / 2 sigma^2) over squared grid distance; the unsquared
    // variant exp(-d / 2 sigma^2) is kept for comparison runs.
    bool squared_neighborhood = true;
    // Node errors carry over between training runs; when false each run
    // starts from a zero error vector.
    bool persistent_errors = true;
    // After growth, the baseline for the next trigger check includes the
    // mean-initialized errors of the new nodes.  When false the baseline is
    // recorded before expansion, so the initialization itself counts as an
    // error increase and growth tends to cascade.
    bool post_expansion_baseline = true;
    std::size_t max_nodes = 100000;

    double kappa_time_constant() const {
        return tau2_literal ? tau2 : tau2 * double(iterations);
    }

    void validate() const {
        if (initial_rows == 0 || initial_cols == 0) throw ConfigError("gsom: empty initial grid");
        if (sigma0 <= 0.0 || tau1 <= 0.0 || kappa0 <= 0.0 || tau2 <= 0.0)
            throw ConfigError("gsom: schedule constants must be > 0");
        if (!(growth_threshold > 0.0)) throw ConfigError("gsom: growth threshold must be > 0");
        if (iterations == 0) throw ConfigError("gsom: iterations must be >= 1");
        if (max_nodes < initial_rows * initial_cols) throw ConfigError("gsom: max_nodes too small");
    }
};

struct WinnerResult {
    std::size_t index = 0;
    double similarity = -2.0;
};

// One growth-trigger evaluation during training.
struct TriggerRecord {
    double total_error = 0.0;   // E after this check (post-expansion if grown)
    double delta = 0.0;         // E increase since the previous check
    std::size_t node_count = 0; // N used in the trigger test
    bool grew = false;
};

// Rectangular grid of prototype weight vectors with accumulated quantization
// errors.  Node i sits at grid position (i / cols, i % cols).
class SomMap {
public:
    SomMap(std::size_t rows, std::size_t cols, std::size_t dim)
        : rows_(rows), cols_(cols), dim_(dim), weights_(rows * cols * dim, 0.0),
          errors_(rows * cols, 0.0) {}

    // Initial nodes are unit-normalized vectors of standard normal entries.
    static SomMap random_init(std::size_t rows, std::size_t cols, std::size_t dim,
                              std::mt19937_64& rng) {
        SomMap map(rows, cols, dim);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (std::size_t i = 0; i < map.node_count(); ++i) {
            double* w = map.weights_.data() + i * dim;
            double n2 = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                w[k] = gauss(rng);
                n2 += w[k] * w[k];
            }
            const double inv = 1.0 / std::sqrt(n2);
            for (std::size_t k = 0; k < dim; ++k) w[k] *= inv;
        }
        return map;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t dim() const { return dim_; }
    std::size_t node_count() const { return rows_ * cols_; }
    std::size_t row_of(std::size_t i) const { return i / cols_; }
    std::size_t col_of(std::size_t i) const { return i % cols_; }

    std::span<const double> node_weights(std::size_t i) const {
        return {weights_.data() + i * dim_, dim_};
    }
    std::span<double> mutable_node_weights(std::size_t i) {
        return {weights_.data() + i * dim_, dim_};
    }

    double node_error(std::size_t i) const { return errors_[i]; }
    const std::vector<double>& errors() const { return errors_; }
    double total_error() const { return std::accumulate(errors_.begin(), errors_.end(), 0.0); }

    void reset_errors() { std::fill(errors_.begin(), errors_.end(), 0.0); }
    void add_error(std::size_t i, double e) { errors_[i] += e; }
    void set_error(std::size_t i, double e) { errors_[i] = e; }

    const std::vector<TriggerRecord>& trigger_history() const { return trigger_history_; }
    std::vector<TriggerRecord>& mutable_trigger_history() { return trigger_history_; }

    // Appends one full row or column next to the boundary node with the
    // largest accumulated error, on that node's nearest outer side.  New
    // node weights are the mean of their pre-existing grid neighbors; new
    // node errors are the mean of the previous error vector.
    void grow() {
        const std::size_t target = max_error_boundary_node();
        const std::size_t r = row_of(target), c = col_of(target);

        // Side order on ties: top, bottom, left, right.
        const std::size_t dists[4] = {r, rows_ - 1 - r, c, cols_ - 1 - c};
        std::size_t side = 0;
        for (std::size_t s = 1; s < 4; ++s)
            if (dists[s] < dists[side]) side = s;

        const bool row_insert = side < 2;
        const std::size_t new_rows = rows_ + (row_insert ? 1 : 0);
        const std::size_t new_cols = cols_ + (row_insert ? 0 : 1);
        const std::size_t row_off = (side == 0) ? 1 : 0;  // old rows shift when inserting on top
        const std::size_t col_off = (side == 2) ? 1 : 0;

        const double mean_err = total_error() / double(node_count());
        std::vector<double> w2(new_rows * new_cols * dim_, 0.0);
        std::vector<double> e2(new_rows * new_cols, 0.0);
        auto is_old = [&](std::size_t nr, std::size_t nc) {
            return nr >= row_off && nr - row_off < rows_ && nc >= col_off && nc - col_off < cols_;
        };
        for (std::size_t nr = 0; nr < new_rows; ++nr) {
            for (std::size_t nc = 0; nc < new_cols; ++nc) {
                double* dst = w2.data() + (nr * new_cols + nc) * dim_;
                if (is_old(nr, nc)) {
                    const std::size_t old_i = (nr - row_off) * cols_ + (nc - col_off);
                    std::copy_n(weights_.data() + old_i * dim_, dim_, dst);
                    e2[nr * new_cols + nc] = errors_[old_i];
                    continue;
                }
                // Mean of pre-existing nodes in the 8-neighborhood.
                std::size_t found = 0;
                for (long dr = -1; dr <= 1; ++dr) {
                    for (long dc = -1; dc <= 1; ++dc) {
                        const long ar = long(nr) + dr, ac = long(nc) + dc;
                        if (ar < 0 || ac < 0 || ar >= long(new_rows) || ac >= long(new_cols))
                            continue;
                        if (!is_old(std::size_t(ar), std::size_t(ac))) continue;
                        const std::size_t old_i =
                            (std::size_t(ar) - row_off) * cols_ + (std::size_t(ac) - col_off);
                        const double* src = weights_.data() + old_i * dim_;
                        for (std::size_t k = 0; k < dim_; ++k) dst[k] += src[k];
                        ++found;
                    }
                }
                const double inv = 1.0 / double(found);
                for (std::size_t k = 0; k < dim_; ++k) dst[k] *= inv;
                e2[nr * new_cols + nc] = mean_err;
            }
        }
        rows_ = new_rows;
        cols_ = new_cols;
        weights_.swap(w2);
        errors_.swap(e2);
    }

private:
    std::size_t max_error_boundary_node() const {
        std::size_t best = 0;
        double best_err = -1.0;
        for (std::size_t i = 0; i < node_count(); ++i) {
            const std::size_t r = row_of(i), c = col_of(i);
            const bool boundary = r == 0 || r == rows_ - 1 || c == 0 || c == cols_ - 1;
            if (boundary && errors_[i] > best_err) {
                best_err = errors_[i];
                best = i;
            }
        }
        return best;
    }

    std::size_t rows_, cols_, dim_;
    std::vector<double> weights_;  // row-major nodes, dim_ doubles each
    std::vector<double> errors_;
    std::vector<TriggerRecord> trigger_history_;
};

// Node with the highest cosine similarity to x; ties go to the lowest
// row-major index.
inline WinnerResult find_winner(const SomMap& map, std::span<const double> x) {
    if (x.size() != map.dim()) throw ContractViolation("find_winner: dimension mismatch");
    const double xn2 = squared_norm(x);
    if (xn2 == 0.0) throw ContractViolation("find_winner: zero-norm input");
    WinnerResult best;
    for (std::size_t i = 0; i < map.node_count(); ++i) {
        std::span<const double> w = map.node_weights(i);
        double s = 0.0, n2 = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            s += w[k] * x[k];
            n2 += w[k] * w[k];
        }
        if (n2 == 0.0) throw ContractViolation("find_winner: zero-norm node weights");
        const double c = s / std::sqrt(n2 * xn2);
        if (c > best.similarity) {
            best.similarity = std::min(1.0, std::max(-1.0, c));
            best.index = i;
        }
    }
    return best;
}

// Competitive training with error-driven growth.  Each presentation pulls
// every node toward the input with strength kappa * h, where h decays with
// grid distance to the winner; the winner accumulates quantization error
// 1 - c.  After each pass the map grows by one row or column if the error
// increase per node exceeds the growth threshold.  Node errors restart at
// zero for each training run.
inline void train(SomMap& map, const std::vector<std::vector<double>>& inputs,
                  const GsomConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    if (inputs.empty()) throw ContractViolation("train: no inputs");
    for (const auto& x : inputs) {
        if (x.size() != map.dim()) throw ContractViolation("train: input dimension mismatch");
        if (squared_norm(x) == 0.0) throw ContractViolation("train: zero-norm input");
    }

    if (!cfg.persistent_errors) map.reset_errors();
    map.mutable_trigger_history().clear();
    double prev_total = map.total_error();
    const double kappa_tc = cfg.kappa_time_constant();

    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), 0);
    std::uniform_int_distribution<std::size_t> pick(0, inputs.size() - 1);

    std::size_t i = 0;
    while (i < cfg.iterations) {
        std::size_t pass_len;
        if (cfg.epoch_presentation) {
            std::shuffle(order.begin(), order.end(), rng);
            pass_len = std::min(order.size(), cfg.iterations - i);
        } else {
            order[0] = pick(rng);
            pass_len = 1;
        }

        for (std::size_t p = 0; p < pass_len; ++p) {
            ++i;
            const std::vector<double>& x = inputs[order[p]];
            const WinnerResult win = find_winner(map, x);
            map.add_error(win.index, 1.0 - win.similarity);

            const double sigma = cfg.sigma0 * std::exp(-double(i) / cfg.tau1);
            const double kappa = cfg.kappa0 * std::exp(-double(i) / kappa_tc);
            const double denom = 2.0 * sigma * sigma;
            const long wr = long(map.row_of(win.index)), wc = long(map.col_of(win.index));
            for (std::size_t j = 0; j < map.node_count(); ++j) {
                const long dr = long(map.row_of(j)) - wr;
                const long dc = long(map.col_of(j)) - wc;
                const double d2 = double(dr * dr + dc * dc);
                const double arg = cfg.squared_neighborhood ? d2 : std::sqrt(d2);
                const double step = kappa * std::exp(-arg / denom);
                if (step < 1e-12) continue;
                std::span<double> w = map.mutable_node_weights(j);
                for (std::size_t k = 0; k < w.size(); ++k) w[k] += step * (x[k] - w[k]);
            }
        }

        const double total = map.total_error();
        const double delta = total - prev_total;
        TriggerRecord rec{total, delta, map.node_count(), false};
        if (delta / double(map.node_count()) > cfg.growth_threshold &&
            map.node_count() < cfg.max_nodes) {
            map.grow();
            rec.grew = true;
            rec.total_error = map.total_error();  // includes mean-initialized new errors
        }
        map.mutable_trigger_history().push_back(rec);
        prev_total = cfg.post_expansion_baseline ? rec.total_error : total;
    }
}

// Folds one newly learned weight vector into the knowledge base: retrains the
// map on its own node weights plus the new vector, growing as needed.
inline void integrate_task(SomMap& map, std::span<const double> w_new, const GsomConfig& cfg,
                           std::mt19937_64& rng) {
    if (squared_norm(w_new) == 0.0) throw ContractViolation("integrate_task: zero-norm input");
    std::vector<std::vector<double>> inputs;
    inputs.reserve(map.node_count() + 1);
    for (std::size_t j = 0; j < map.node_count(); ++j) {
        std::span<const double> w = map.node_weights(j);
        inputs.emplace_back(w.begin(), w.end());
    }
    inputs.emplace_back(w_new.begin(), w_new.end());
    train(map, inputs, cfg, rng);
}

}  // namespace somrl
