#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "somrl/transfer.hpp"
#include "support.hpp"

using namespace somrl;
using namespace somrl::testing;

TEST_CASE("select_source finds the stored vector itself", "[transfer]") {
    std::mt19937_64 rng(131);
    SomMap map = SomMap::random_init(3, 2, 12, rng);
    std::span<const double> node3 = map.node_weights(3);
    WeightVector target{12, {node3.begin(), node3.end()}};

    const SourceSelection sel = select_source(map, target);
    REQUIRE(sel.node_index == 3);
    REQUIRE(sel.similarity == Catch::Approx(1.0));
    REQUIRE(sel.weights == target.values);

    SECTION("selection is invariant under positive scaling of the target") {
        WeightVector scaled = target;
        for (double& v : scaled.values) v *= 10.0;
        const SourceSelection sel2 = select_source(map, scaled);
        REQUIRE(sel2.node_index == sel.node_index);
        REQUIRE(sel2.similarity == Catch::Approx(sel.similarity));
    }
    SECTION("zero target is rejected") {
        REQUIRE_THROWS_AS(select_source(map, WeightVector::zeros(12, 1)), ContractViolation);
    }
}

TEST_CASE("select_source matches a brute-force scan", "[transfer]") {
    std::mt19937_64 rng(137);
    for (int trial = 0; trial < 1000; ++trial) {
        SomMap map = SomMap::random_init(2, 3, 8, rng);
        const WeightVector target = random_weights(8, 1, rng);
        std::size_t best = 0;
        double best_c = -2.0;
        for (std::size_t i = 0; i < map.node_count(); ++i) {
            const double c = cosine_similarity(map.node_weights(i), target.values);
            if (c > best_c) {
                best_c = c;
                best = i;
            }
        }
        const SourceSelection sel = select_source(map, target);
        REQUIRE(sel.node_index == best);
        REQUIRE(sel.similarity == Catch::Approx(best_c));
    }
}

TEST_CASE("som_guided_action mixes source and target greedily", "[transfer]") {
    std::mt19937_64 rng(139);
    // Target prefers action 1, source prefers action 2 on this feature.
    WeightVector target = WeightVector::zeros(6, kNumActions);
    WeightVector source = WeightVector::zeros(6, kNumActions);
    target.values[1 * 6 + 0] = 1.0;
    source.values[2 * 6 + 0] = 1.0;
    const FeatureVector f = one_hot(6, 0);

    SECTION("epsilon 0 always exploits the target") {
        for (int i = 0; i < 100; ++i)
            REQUIRE(som_guided_action(target, source, f, 0.0, rng) == Action(1));
    }
    SECTION("epsilon 1 always follows the source") {
        for (int i = 0; i < 100; ++i)
            REQUIRE(som_guided_action(target, source, f, 1.0, rng) == Action(2));
    }
    SECTION("source advice frequency matches epsilon = 0.3") {
        int source_actions = 0;
        const int n = 100000;
        for (int i = 0; i < n; ++i)
            if (som_guided_action(target, source, f, 0.3, rng) == Action(2)) ++source_actions;
        REQUIRE(double(source_actions) / n == Catch::Approx(0.3).margin(0.01));
    }
    SECTION("the result is always one of the two greedy actions") {
        std::mt19937_64 wrng(149);
        for (int i = 0; i < 500; ++i) {
            const WeightVector t2 = random_weights(6, kNumActions, wrng);
            const WeightVector s2 = random_weights(6, kNumActions, wrng);
            const FeatureVector fr = random_features(6, wrng);
            const Action a = som_guided_action(t2, s2, fr, 0.5, rng);
            const bool ok = a == greedy_action(t2, fr) || a == greedy_action(s2, fr);
            REQUIRE(ok);
        }
    }
}

TEST_CASE("similarity_trace reports best-node similarity per snapshot", "[transfer]") {
    std::mt19937_64 rng(151);
    SomMap map = SomMap::random_init(2, 2, 8, rng);

    SECTION("constant snapshots give a constant trace") {
        std::normal_distribution<double> g(0.0, 1.0);
        std::vector<double> w(8);
        for (double& v : w) v = g(rng);
        const std::vector<std::vector<double>> snaps(5, w);
        const std::vector<double> trace = similarity_trace(snaps, map);
        REQUIRE(trace.size() == 5);
        for (double v : trace) REQUIRE(v == trace[0]);
    }
    SECTION("a snapshot equal to a node traces 1") {
        std::span<const double> node = map.node_weights(2);
        const std::vector<double> trace =
            similarity_trace({std::vector<double>(node.begin(), node.end())}, map);
        REQUIRE(trace[0] == Catch::Approx(1.0));
    }
}

TEST_CASE("transfer config validates", "[transfer]") {
    TransferPolicyConfig cfg;
    cfg.epsilon = 1.5;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg.epsilon = 0.3;
    cfg.advice_refresh_interval = 0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
}
