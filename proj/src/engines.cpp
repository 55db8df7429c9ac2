#include "ghz/engines.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

#include "ghz/errors.hpp"

namespace ghz {

std::string to_string(EngineKind kind) { return kind == EngineKind::maer ? "maer" : "sync"; }

std::string to_string(Accounting mode) {
    return mode == Accounting::expected ? "expected" : "bernoulli";
}

Accounting parse_accounting(const std::string& text) {
    if (text == "expected") return Accounting::expected;
    if (text == "bernoulli") return Accounting::bernoulli;
    throw std::invalid_argument("unknown accounting mode: " + text);
}

namespace {

std::vector<EdgeId> edge_ids(const Topology& topo, const SteinerSubtree& tree) {
    std::vector<EdgeId> ids;
    ids.reserve(tree.edges.size());
    for (const auto& e : tree.edges) ids.push_back(topo.edge_id(e.u, e.v));
    return ids;
}

double record(const SteinerSubtree& tree, const QuantumParams& params, const EngineOptions& options,
              RandomStream& rng) {
    double prob = tree_success_probability(tree, params);
    if (options.accounting == Accounting::expected) return prob;
    return bernoulli(rng, prob) ? 1.0 : 0.0;
}

// BFS over live links only. parent[source] = source; unreached = -1 distance.
struct InstantBfs {
    std::vector<int> dist;
    std::vector<NodeId> parent;
};

InstantBfs instant_bfs(const EntanglementPool& pool, NodeId source) {
    const auto& topo = pool.topology();
    InstantBfs out{std::vector<int>(topo.node_count(), -1), std::vector<NodeId>(topo.node_count())};
    std::deque<NodeId> queue{source};
    out.dist[source] = 0;
    out.parent[source] = source;
    while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        for (const auto& adj : topo.neighbors(v)) {
            if (out.dist[adj.node] >= 0 || !pool.is_live(adj.edge)) continue;
            out.dist[adj.node] = out.dist[v] + 1;
            out.parent[adj.node] = v;
            queue.push_back(adj.node);
        }
    }
    return out;
}

}  // namespace

RateSample maer_slot(EntanglementPool& pool, Dodag& dodag, const ConsumerSet& consumers,
                     const QuantumParams& params, const EngineOptions& options, int slot,
                     RandomStream& rng) {
    auto expired = pool.advance_age(params);
    dodag.detach(expired);
    pool.attempt_generation(params, rng);
    dodag.join_round(pool, slot, options.join_hops_per_slot);

    RateSample sample{slot, 0.0, 0, 0};
    auto tree = dodag.steiner_subtree(consumers);
    if (!tree) return sample;

    sample.xi = record(*tree, params, options, rng);
    sample.ops = tree->op_count;
    sample.subtree_edges = static_cast<int>(tree->edges.size());
    auto used = edge_ids(pool.topology(), *tree);
    pool.consume(used);
    dodag.detach(used);
    return sample;
}

std::optional<SteinerSubtree> median_steiner_tree(const EntanglementPool& pool,
                                                  const ConsumerSet& consumers) {
    const auto& topo = pool.topology();
    const std::size_t nodes = topo.node_count();
    std::vector<long> total(nodes, 0);
    std::vector<char> reachable(nodes, 1);
    for (NodeId c : consumers) {
        auto bfs = instant_bfs(pool, c);
        for (NodeId v = 0; v < nodes; ++v) {
            if (bfs.dist[v] < 0)
                reachable[v] = 0;
            else
                total[v] += bfs.dist[v];
        }
    }
    NodeId median = Dodag::kNoParent;
    long best = std::numeric_limits<long>::max();
    for (NodeId v = 0; v < nodes; ++v) {
        if (reachable[v] && total[v] < best) {
            best = total[v];
            median = v;
        }
    }
    if (median == Dodag::kNoParent) return std::nullopt;

    auto bfs = instant_bfs(pool, median);
    std::vector<char> taken(nodes, 0);
    std::vector<std::vector<NodeId>> adj(nodes);
    std::vector<Edge> edges;
    for (NodeId c : consumers) {
        for (NodeId v = c; v != median && !taken[v]; v = bfs.parent[v]) {
            taken[v] = 1;
            edges.push_back(Edge::of(v, bfs.parent[v]));
            adj[v].push_back(bfs.parent[v]);
            adj[bfs.parent[v]].push_back(v);
        }
    }

    // Prune non-consumer leaves. Unreachable for an exact median, kept so the
    // subtree contract holds regardless of tie-breaking.
    std::vector<char> dropped(nodes, 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (NodeId v = 0; v < nodes; ++v) {
            if (dropped[v] || consumers.contains(v)) continue;
            auto live_degree = std::count_if(adj[v].begin(), adj[v].end(),
                                             [&](NodeId w) { return !dropped[w]; });
            if (live_degree == 1) {
                dropped[v] = 1;
                changed = true;
            }
        }
    }
    std::erase_if(edges, [&](const Edge& e) { return dropped[e.u] || dropped[e.v]; });
    return SteinerSubtree::from_edges(std::move(edges), consumers);
}

RateSample sync_slot(EntanglementPool& pool, const ConsumerSet& consumers,
                     const QuantumParams& params, const EngineOptions& options, int slot,
                     RandomStream& rng) {
    if (pool.live_count() != 0) throw PreconditionViolation("synchronous slot needs an empty pool");
    pool.attempt_generation(params, rng);

    RateSample sample{slot, 0.0, 0, 0};
    if (auto tree = median_steiner_tree(pool, consumers)) {
        sample.xi = record(*tree, params, options, rng);
        sample.ops = tree->op_count;
        sample.subtree_edges = static_cast<int>(tree->edges.size());
    }
    pool.clear();
    return sample;
}

double run_trial(EngineKind engine, const Topology& topo, NodeId root, const ConsumerSet& consumers,
                 const QuantumParams& params, const EngineOptions& options, int slots,
                 RandomStream& rng) {
    if (slots < 1) throw std::invalid_argument("slots must be >= 1");
    params.validate();
    double sum = 0.0;
    EntanglementPool pool(topo);
    if (engine == EngineKind::maer) {
        Dodag dodag(topo, root);
        for (int s = 0; s < slots; ++s)
            sum += maer_slot(pool, dodag, consumers, params, options, s, rng).xi;
    } else {
        for (int s = 0; s < slots; ++s) sum += sync_slot(pool, consumers, params, options, s, rng).xi;
    }
    return sum / slots;
}

MaerEngine::MaerEngine(const Topology& topo, NodeId root, ConsumerSet consumers,
                       QuantumParams params, EngineOptions options)
    : pool_(topo),
      dodag_(topo, root),
      consumers_(std::move(consumers)),
      params_(params),
      options_(options) {
    params_.validate();
    if (consumers_.contains(root)) throw std::invalid_argument("consumers must exclude the root");
}

RateSample MaerEngine::step(RandomStream& rng) {
    return maer_slot(pool_, dodag_, consumers_, params_, options_, slot_++, rng);
}

}  // namespace ghz
