#include <gtest/gtest.h>

#include <cmath>

#include "ghz/engines.hpp"
#include "ghz/errors.hpp"

using namespace ghz;

namespace {

QuantumParams make_params(double p, double q, CoherenceTime m) {
    QuantumParams params;
    params.p = p;
    params.q = q;
    params.m = m;
    return params;
}

Topology star_graph(int leaves) {
    std::vector<Edge> edges;
    for (int i = 1; i <= leaves; ++i) edges.push_back(Edge::of(0, static_cast<NodeId>(i)));
    return Topology(static_cast<std::size_t>(leaves + 1), edges);
}

// Minimum edge count of a tree connecting three terminals in the live graph:
// min over v of the summed live-graph distances (Floyd-Warshall).
int three_terminal_steiner_size(const EntanglementPool& pool, const ConsumerSet& c) {
    const auto& topo = pool.topology();
    const auto n = topo.node_count();
    const int inf = 1 << 20;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (EdgeId e = 0; e < topo.edge_count(); ++e)
        if (pool.is_live(e)) d[topo.edge(e).u][topo.edge(e).v] = d[topo.edge(e).v][topo.edge(e).u] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    int best = inf;
    for (std::size_t v = 0; v < n; ++v) best = std::min(best, d[v][c[0]] + d[v][c[1]] + d[v][c[2]]);
    return best >= inf ? -1 : best;
}

}  // namespace

TEST(maer, hand_trace_root_in_the_middle) {
    // a - root - b: both consumers join the root in slot 0, fusion at the root is a swap.
    auto g = make_path(3);
    EntanglementPool pool(g);
    Dodag dodag(g, 1);
    ConsumerSet consumers({0, 2});
    auto params = make_params(1.0, 0.8, CoherenceTime(1));
    auto rng = derive_stream(0, {});
    for (int s = 0; s < 5; ++s) {
        auto sample = maer_slot(pool, dodag, consumers, params, {}, s, rng);
        EXPECT_DOUBLE_EQ(sample.xi, 0.8);
        EXPECT_EQ(sample.ops, 1);
        EXPECT_EQ(sample.subtree_edges, 2);
        EXPECT_EQ(pool.live_count(), 0u);
        EXPECT_EQ(dodag.member_count(), 1u);
    }
}

TEST(maer, hand_trace_root_at_the_end) {
    // root - a - b: a is b's parent, so the subtree is the single link a-b with no operation.
    auto g = make_path(3);
    EntanglementPool pool(g);
    Dodag dodag(g, 0);
    ConsumerSet consumers({1, 2});
    auto params = make_params(1.0, 0.8, CoherenceTime::infinite());
    auto rng = derive_stream(0, {});
    auto sample = maer_slot(pool, dodag, consumers, params, {}, 0, rng);
    EXPECT_DOUBLE_EQ(sample.xi, 1.0);
    EXPECT_EQ(sample.ops, 0);
    // The root link survives; b left the DODAG with its consumed parent edge.
    EXPECT_EQ(pool.live_count(), 1u);
    EXPECT_TRUE(dodag.is_member(1));
    EXPECT_FALSE(dodag.is_member(2));
}

TEST(maer, zero_generation_gives_zero_rate) {
    auto g = make_grid(4, 4);
    auto rng = derive_stream(1, {});
    EXPECT_EQ(run_trial(EngineKind::maer, g, 5, ConsumerSet({0, 15, 3}), make_params(0.0, 0.9, CoherenceTime(4)),
                        {}, 200, rng),
              0.0);
    EXPECT_EQ(run_trial(EngineKind::synchronous, g, 5, ConsumerSet({0, 15, 3}),
                        make_params(0.0, 0.9, CoherenceTime(4)), {}, 1, rng),
              0.0);
}

TEST(maer, infinite_memory_eventually_serves_path_ends) {
    auto g = make_path(8);
    auto params = make_params(0.05, 0.9, CoherenceTime::infinite());
    MaerEngine engine(g, 3, ConsumerSet({0, 7}), params);
    auto rng = derive_stream(4, {});
    int served = 0;
    for (int s = 0; s < 20000; ++s)
        if (engine.step(rng).xi > 0) ++served;
    EXPECT_GT(served, 20);
}

TEST(maer, m_one_carries_nothing_across_slots) {
    auto g = make_grid(5, 5);
    EntanglementPool pool(g);
    Dodag dodag(g, 12);
    ConsumerSet consumers({0, 4, 24});
    auto params = make_params(0.7, 0.9, CoherenceTime(1));
    auto rng = derive_stream(6, {});
    for (int s = 0; s < 300; ++s) {
        maer_slot(pool, dodag, consumers, params, {}, s, rng);
        EntanglementPool next = pool;
        next.advance_age(params);
        ASSERT_EQ(next.live_count(), 0u);
    }
}

TEST(maer, invariants_hold_every_slot) {
    auto rng = derive_stream(12, {});
    for (int rep = 0; rep < 20; ++rep) {
        auto topo_rng = derive_stream(12, {static_cast<std::uint64_t>(rep)});
        auto g = make_random(25, 0.15, topo_rng);
        NodeId root = center_node(g);
        std::vector<NodeId> pick;
        for (NodeId v = 0; v < 25 && pick.size() < 3; v += 5)
            if (v != root) pick.push_back(v);
        auto params = make_params(0.3, 0.9, CoherenceTime(1 + rep % 6));
        MaerEngine engine(g, root, ConsumerSet(pick), params);
        for (int s = 0; s < 200; ++s) {
            auto sample = engine.step(rng);
            if (sample.xi > 0) ASSERT_NEAR(sample.xi, std::pow(0.9, sample.ops), 1e-15);
            ASSERT_NO_THROW(engine.pool().check_invariants(params));
            ASSERT_EQ(engine.dodag().violation(engine.pool()), std::nullopt);
        }
    }
}

TEST(maer, engine_rejects_root_consumer) {
    auto g = make_path(3);
    EXPECT_THROW(MaerEngine(g, 1, ConsumerSet({1, 2}), make_params(0.5, 0.5, CoherenceTime(1))),
                 std::invalid_argument);
}

TEST(maer, join_hop_limit_slows_long_paths) {
    auto g = make_path(9);
    auto params = make_params(1.0, 1.0, CoherenceTime::infinite());
    ConsumerSet ends({0, 8});
    EngineOptions one_hop{Accounting::expected, 1};
    MaerEngine limited(g, 4, ends, params, one_hop);
    MaerEngine full(g, 4, ends, params);
    auto rng = derive_stream(0, {});
    EXPECT_EQ(full.step(rng).xi, 1.0);
    for (int s = 0; s < 3; ++s) EXPECT_EQ(limited.step(rng).xi, 0.0);
    EXPECT_EQ(limited.step(rng).xi, 1.0);
}

TEST(sync, star_with_perfect_links_serves_every_slot) {
    auto g = star_graph(3);
    EntanglementPool pool(g);
    auto rng = derive_stream(0, {});
    auto params = make_params(1.0, 0.65, CoherenceTime(1));
    for (int s = 0; s < 10; ++s) {
        auto sample = sync_slot(pool, ConsumerSet({1, 2, 3}), params, {}, s, rng);
        EXPECT_DOUBLE_EQ(sample.xi, 0.65);
        EXPECT_EQ(sample.subtree_edges, 3);
        EXPECT_EQ(pool.live_count(), 0u);
    }
}

TEST(sync, requires_empty_pool) {
    auto g = make_path(3);
    EntanglementPool pool(g);
    pool.create(0);
    auto rng = derive_stream(0, {});
    EXPECT_THROW(sync_slot(pool, ConsumerSet({0, 2}), make_params(1, 1, CoherenceTime(1)), {}, 0, rng),
                 PreconditionViolation);
}

TEST(sync, path_closed_form) {
    const int k = 3;
    const double p = 0.8, q = 0.9;
    const int slots = 200000;
    const double expected = std::pow(p, k) * std::pow(q, k - 1);
    EXPECT_NEAR(expected, 0.41472, 1e-12);
    // Per-slot xi is q^(k-1) with probability p^k, else 0.
    const double success = std::pow(p, k);
    const double stderr_rate = std::pow(q, k - 1) * std::sqrt(success * (1 - success) / slots);
    auto rng = derive_stream(17, {});
    double mean = run_trial(EngineKind::synchronous, make_path(k + 1), 1, ConsumerSet({0, static_cast<NodeId>(k)}),
                            make_params(p, q, CoherenceTime(1)), {}, slots, rng);
    EXPECT_NEAR(mean, expected, 3 * stderr_rate);
}

TEST(sync, median_tree_is_minimal_for_three_terminals) {
    auto rng = derive_stream(21, {});
    int found = 0;
    for (int rep = 0; rep < 200; ++rep) {
        auto g = make_grid(5, 6);
        EntanglementPool pool(g);
        pool.attempt_generation(make_params(0.7, 1.0, CoherenceTime(1)), rng);
        std::vector<NodeId> pick;
        while (pick.size() < 3) {
            auto v = static_cast<NodeId>(uniform_below(rng, 30));
            if (std::find(pick.begin(), pick.end(), v) == pick.end()) pick.push_back(v);
        }
        ConsumerSet consumers(pick);
        auto tree = median_steiner_tree(pool, consumers);
        int oracle = three_terminal_steiner_size(pool, consumers);
        if (oracle < 0) {
            ASSERT_FALSE(tree.has_value());
            continue;
        }
        ASSERT_TRUE(tree.has_value());
        ASSERT_EQ(static_cast<int>(tree->edges.size()), oracle);
        for (const auto& e : tree->edges) ASSERT_TRUE(pool.is_live(g.edge_id(e.u, e.v)));
        ++found;
    }
    EXPECT_GT(found, 50);
}

TEST(accounting, bernoulli_records_zero_or_one_with_matching_mean) {
    auto g = make_path(4);
    auto params = make_params(1.0, 0.6, CoherenceTime(1));
    EngineOptions bern{Accounting::bernoulli, 0};
    auto rng = derive_stream(3, {});
    EntanglementPool pool(g);
    double sum = 0;
    const int slots = 40000;
    for (int s = 0; s < slots; ++s) {
        auto sample = sync_slot(pool, ConsumerSet({0, 3}), params, bern, s, rng);
        ASSERT_TRUE(sample.xi == 0.0 || sample.xi == 1.0);
        sum += sample.xi;
    }
    const double expected = 0.36;
    EXPECT_NEAR(sum / slots, expected, 3 * std::sqrt(expected * (1 - expected) / slots));
    EXPECT_EQ(parse_accounting("bernoulli"), Accounting::bernoulli);
    EXPECT_THROW(parse_accounting("median"), std::invalid_argument);
}

TEST(run_trial, deterministic_for_a_seed) {
    auto g = make_grid(6, 6);
    auto params = make_params(0.6, 0.9, CoherenceTime(3));
    ConsumerSet c({0, 5, 30});
    auto a = derive_stream(9, {1});
    auto b = derive_stream(9, {1});
    EXPECT_EQ(run_trial(EngineKind::maer, g, 14, c, params, {}, 2000, a),
              run_trial(EngineKind::maer, g, 14, c, params, {}, 2000, b));
    EXPECT_THROW(run_trial(EngineKind::maer, g, 14, c, params, {}, 0, a), std::invalid_argument);
}
