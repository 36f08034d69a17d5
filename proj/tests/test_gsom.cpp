#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "somrl/gsom.hpp"
#include "support.hpp"

using namespace somrl;

namespace {

std::vector<double> random_unit(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(dim);
    double n2 = 0.0;
    for (double& x : v) {
        x = g(rng);
        n2 += x * x;
    }
    for (double& x : v) x /= std::sqrt(n2);
    return v;
}

std::vector<double> perturbed(const std::vector<double>& base, double scale,
                              std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(base.size());
    double n2 = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = base[k] + scale * g(rng);
        n2 += v[k] * v[k];
    }
    for (double& x : v) x /= std::sqrt(n2);
    return v;
}

}  // namespace

TEST_CASE("cosine similarity basics", "[gsom]") {
    const std::vector<double> w{1.0, 2.0, -3.0, 0.5};
    REQUIRE(cosine_similarity(w, w) == Catch::Approx(1.0));

    std::vector<double> neg = w;
    for (double& v : neg) v = -v;
    REQUIRE(cosine_similarity(w, neg) == Catch::Approx(-1.0));

    REQUIRE(cosine_similarity(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}) ==
            0.0);

    std::vector<double> scaled = w;
    for (double& v : scaled) v *= 10.0;
    const std::vector<double> other{0.3, -1.0, 0.2, 2.0};
    REQUIRE(cosine_similarity(scaled, other) == Catch::Approx(cosine_similarity(w, other)));

    REQUIRE_THROWS_AS(cosine_similarity(std::vector<double>{0.0, 0.0}, w), ContractViolation);
}

TEST_CASE("cosine similarity is bounded and symmetric under fuzz", "[gsom]") {
    std::mt19937_64 rng(71);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int i = 0; i < 100000; ++i) {
        std::vector<double> a(8), b(8);
        for (double& v : a) v = g(rng);
        for (double& v : b) v = g(rng);
        const double c = cosine_similarity(a, b);
        REQUIRE(c >= -1.0);
        REQUIRE(c <= 1.0);
        REQUIRE(c == cosine_similarity(b, a));
        std::vector<double> a_scaled = a;
        const double s = scale(rng);
        for (double& v : a_scaled) v *= s;
        REQUIRE(cosine_similarity(a_scaled, b) == Catch::Approx(c).margin(1e-12));
    }
}

TEST_CASE("find_winner picks the most similar node", "[gsom]") {
    std::mt19937_64 rng(73);
    SomMap map = SomMap::random_init(3, 3, 16, rng);

    SECTION("a node's own weights win with similarity 1") {
        std::span<const double> w4 = map.node_weights(4);
        const WinnerResult win = find_winner(map, w4);
        REQUIRE(win.index == 4);
        REQUIRE(win.similarity == Catch::Approx(1.0));
    }
    SECTION("identical nodes tie to the lowest index") {
        SomMap uniform(2, 2, 4);
        for (std::size_t i = 0; i < 4; ++i) {
            std::span<double> w = uniform.mutable_node_weights(i);
            w[0] = 1.0;
            w[1] = 0.5;
        }
        REQUIRE(find_winner(uniform, std::vector<double>{1.0, 0.4, 0.0, 0.0}).index == 0);
    }
    SECTION("zero input is rejected") {
        REQUIRE_THROWS_AS(find_winner(map, std::vector<double>(16, 0.0)), ContractViolation);
    }
    SECTION("matches the exhaustive scan oracle") {
        for (int trial = 0; trial < 1000; ++trial) {
            const std::vector<double> x = random_unit(16, rng);
            std::size_t best = 0;
            double best_c = -2.0;
            for (std::size_t i = 0; i < map.node_count(); ++i) {
                const double c = cosine_similarity(map.node_weights(i), x);
                if (c > best_c) {
                    best_c = c;
                    best = i;
                }
            }
            const WinnerResult win = find_winner(map, x);
            REQUIRE(win.index == best);
            REQUIRE(win.similarity == Catch::Approx(best_c));
        }
    }
}

TEST_CASE("training on a single input pulls every node to it", "[gsom]") {
    std::mt19937_64 rng(79);
    GsomConfig cfg;
    cfg.growth_threshold = 1e18;  // growth disabled
    cfg.iterations = 2000;
    SomMap map = SomMap::random_init(2, 2, 16, rng);
    const std::vector<double> x = random_unit(16, rng);
    train(map, {x}, cfg, rng);
    REQUIRE(map.node_count() == 4);
    for (std::size_t i = 0; i < map.node_count(); ++i)
        REQUIRE(cosine_similarity(map.node_weights(i), x) > 0.999);
}

TEST_CASE("antipodal input clusters win at distinct nodes", "[gsom]") {
    std::mt19937_64 rng(83);
    GsomConfig cfg;
    cfg.growth_threshold = 1e18;
    std::vector<double> u = random_unit(16, rng);
    std::vector<double> v = u;
    for (double& x : v) x = -x;
    SomMap map = SomMap::random_init(2, 2, 16, rng);
    train(map, {u, v}, cfg, rng);
    REQUIRE(find_winner(map, u).index != find_winner(map, v).index);
    REQUIRE(find_winner(map, u).similarity > 0.99);
    REQUIRE(find_winner(map, v).similarity > 0.99);
}

TEST_CASE("winner error increments stay in [0, 2] per presentation", "[gsom]") {
    std::mt19937_64 rng(89);
    GsomConfig cfg;
    cfg.epoch_presentation = false;  // one presentation per trigger record
    cfg.persistent_errors = false;
    cfg.growth_threshold = 1e18;
    cfg.iterations = 500;
    SomMap map = SomMap::random_init(2, 2, 8, rng);
    std::vector<std::vector<double>> inputs;
    for (int i = 0; i < 6; ++i) inputs.push_back(random_unit(8, rng));
    train(map, inputs, cfg, rng);
    REQUIRE(map.trigger_history().size() == 500);
    for (const TriggerRecord& rec : map.trigger_history()) {
        REQUIRE(rec.delta >= 0.0);
        REQUIRE(rec.delta <= 2.0);
    }
    for (std::size_t i = 0; i < map.node_count(); ++i) REQUIRE(map.node_error(i) >= 0.0);
}

TEST_CASE("growth fires exactly when the per-node error increase exceeds G_T", "[gsom]") {
    std::mt19937_64 rng(97);
    GsomConfig cfg;
    cfg.max_nodes = 200;
    SomMap map = SomMap::random_init(2, 2, 32, rng);
    std::vector<std::vector<double>> inputs;
    for (int i = 0; i < 8; ++i) inputs.push_back(random_unit(32, rng));
    train(map, inputs, cfg, rng);

    std::size_t prev_nodes = 4;
    bool any_growth = false;
    for (const TriggerRecord& rec : map.trigger_history()) {
        REQUIRE(rec.node_count >= prev_nodes);  // node count never shrinks
        const bool should_grow =
            rec.delta / double(rec.node_count) > cfg.growth_threshold &&
            rec.node_count < cfg.max_nodes;
        REQUIRE(rec.grew == should_grow);
        prev_nodes = rec.node_count;
        any_growth = any_growth || rec.grew;
    }
    REQUIRE(any_growth);  // random prototypes vs. spread inputs must trigger
}

TEST_CASE("an infinite growth threshold freezes the grid", "[gsom]") {
    std::mt19937_64 rng(101);
    GsomConfig cfg;
    cfg.growth_threshold = 1e18;
    SomMap map = SomMap::random_init(2, 2, 16, rng);
    std::vector<std::vector<double>> inputs;
    for (int i = 0; i < 5; ++i) inputs.push_back(random_unit(16, rng));
    train(map, inputs, cfg, rng);
    REQUIRE(map.rows() == 2);
    REQUIRE(map.cols() == 2);
}

TEST_CASE("grow appends a row toward the max-error boundary node", "[gsom]") {
    SomMap map(2, 2, 2);
    // Distinct weights per node; top-left node carries the largest error.
    for (std::size_t i = 0; i < 4; ++i) {
        std::span<double> w = map.mutable_node_weights(i);
        w[0] = double(i + 1);
        w[1] = 1.0;
    }
    map.set_error(0, 5.0);
    map.set_error(1, 1.0);
    map.set_error(2, 1.0);
    map.set_error(3, 1.0);

    map.grow();
    REQUIRE(map.rows() == 3);
    REQUIRE(map.cols() == 2);

    // New top-row node (0,0): mean of old (0,0) and (0,1) weights.
    std::span<const double> nw = map.node_weights(0);
    REQUIRE(nw[0] == Catch::Approx((1.0 + 2.0) / 2.0));
    REQUIRE(nw[1] == Catch::Approx(1.0));
    // New node errors are the mean of the previous error vector.
    REQUIRE(map.node_error(0) == Catch::Approx(2.0));
    REQUIRE(map.node_error(1) == Catch::Approx(2.0));
    // Old nodes shifted down one row, errors intact.
    REQUIRE(map.node_weights(2)[0] == 1.0);
    REQUIRE(map.node_error(2) == 5.0);
}

TEST_CASE("repeated growth keeps the grid rectangular", "[gsom]") {
    std::mt19937_64 rng(103);
    SomMap map = SomMap::random_init(2, 2, 4, rng);
    std::uniform_real_distribution<double> err(0.0, 10.0);
    for (int g = 0; g < 30; ++g) {
        for (std::size_t i = 0; i < map.node_count(); ++i) map.set_error(i, err(rng));
        const std::size_t before = map.node_count();
        map.grow();
        REQUIRE(map.node_count() == map.rows() * map.cols());
        REQUIRE(map.node_count() > before);
        for (std::size_t i = 0; i < map.node_count(); ++i) {
            REQUIRE(squared_norm(map.node_weights(i)) > 0.0);
            REQUIRE(map.node_error(i) >= 0.0);
        }
    }
}

TEST_CASE("integrating the same vector twice barely moves its match", "[gsom]") {
    std::mt19937_64 rng(107);
    GsomConfig cfg;
    const std::vector<double> w = random_unit(64, rng);
    SomMap map = SomMap::random_init(2, 2, 64, rng);
    integrate_task(map, w, cfg, rng);
    const double first = find_winner(map, w).similarity;
    integrate_task(map, w, cfg, rng);
    const double second = find_winner(map, w).similarity;
    REQUIRE(std::abs(second - first) < 0.01);
}

TEST_CASE("integrated task knowledge is retained above 0.9 similarity", "[gsom]") {
    std::mt19937_64 rng(109);
    GsomConfig cfg;
    cfg.max_nodes = 500;
    // Five related task vectors: shared component plus per-task structure.
    const std::vector<double> shared = random_unit(128, rng);
    std::vector<std::vector<double>> tasks;
    for (int t = 0; t < 5; ++t) {
        std::vector<double> v = perturbed(shared, 0.6 / std::sqrt(128.0), rng);
        for (double& x : v) x *= 250.0;  // learned weights are far from unit scale
        tasks.push_back(v);
    }
    SomMap map = SomMap::random_init(2, 2, 128, rng);
    for (const auto& t : tasks) integrate_task(map, t, cfg, rng);
    for (const auto& t : tasks) REQUIRE(find_winner(map, t).similarity >= 0.9);
    REQUIRE(map.node_count() > 4);
}

TEST_CASE("training arranges input clusters topographically", "[gsom]") {
    std::mt19937_64 rng(113);
    GsomConfig cfg;
    cfg.growth_threshold = 1e18;
    cfg.iterations = 4000;
    cfg.sigma0 = 2.0;
    cfg.tau1 = 800.0;

    const std::vector<double> u = random_unit(32, rng);
    std::vector<double> nu = u;
    for (double& x : nu) x = -x;
    std::vector<std::vector<double>> inputs;
    std::vector<int> labels;
    for (int i = 0; i < 8; ++i) {
        inputs.push_back(perturbed(u, 0.005, rng));  // intra-cluster cosine > 0.99
        labels.push_back(0);
        inputs.push_back(perturbed(nu, 0.005, rng));
        labels.push_back(1);
    }

    SomMap map = SomMap::random_init(4, 4, 32, rng);
    train(map, inputs, cfg, rng);

    auto grid_dist = [&](std::size_t a, std::size_t b) {
        const double dr = double(map.row_of(a)) - double(map.row_of(b));
        const double dc = double(map.col_of(a)) - double(map.col_of(b));
        return std::sqrt(dr * dr + dc * dc);
    };
    std::vector<std::size_t> winners;
    for (const auto& x : inputs) winners.push_back(find_winner(map, x).index);

    double same = 0.0, cross = 0.0;
    std::size_t n_same = 0, n_cross = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (std::size_t j = i + 1; j < inputs.size(); ++j) {
            if (labels[i] == labels[j]) {
                same += grid_dist(winners[i], winners[j]);
                ++n_same;
            } else {
                cross += grid_dist(winners[i], winners[j]);
                ++n_cross;
            }
        }
    }
    REQUIRE(same / double(n_same) < cross / double(n_cross));
}

TEST_CASE("train validates its inputs", "[gsom]") {
    std::mt19937_64 rng(127);
    GsomConfig cfg;
    SomMap map = SomMap::random_init(2, 2, 8, rng);
    REQUIRE_THROWS_AS(train(map, {}, cfg, rng), ContractViolation);
    REQUIRE_THROWS_AS(train(map, {std::vector<double>(8, 0.0)}, cfg, rng), ContractViolation);
    REQUIRE_THROWS_AS(train(map, {std::vector<double>(7, 1.0)}, cfg, rng), ContractViolation);
    REQUIRE_THROWS_AS(integrate_task(map, std::vector<double>(8, 0.0), cfg, rng),
                      ContractViolation);
}
