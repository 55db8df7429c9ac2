#include "ghz/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ghz/errors.hpp"

namespace ghz {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

constexpr int kRandomGraphAttempts = 1000;

}  // namespace

std::string describe(const TopologyKind& kind) {
    std::ostringstream out;
    std::visit(overloaded{
                   [&](const GridKind& g) { out << "grid:" << g.rows << ',' << g.cols; },
                   [&](const BarbellKind& b) { out << "barbell:" << b.clique_size; },
                   [&](const RandomKind& r) { out << "random:" << r.nodes << ',' << r.prob; },
                   [&](const PathKind& p) { out << "path:" << p.nodes; },
                   [&](const CustomKind&) { out << "custom"; },
               },
               kind);
    return out.str();
}

Topology::Topology(std::size_t node_count, std::vector<Edge> edges, TopologyKind kind)
    : edges_(std::move(edges)), adjacency_(node_count), kind_(kind) {
    if (node_count == 0) throw std::invalid_argument("topology needs at least one node");
    for (auto& e : edges_) {
        if (e.u == e.v) throw std::invalid_argument("self-loop in topology");
        if (e.u >= node_count || e.v >= node_count)
            throw std::invalid_argument("edge endpoint out of range");
        e = Edge::of(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw std::invalid_argument("duplicate edge in topology");
    if (!is_connected(node_count, edges_)) throw std::invalid_argument("topology is not connected");

    for (EdgeId id = 0; id < edges_.size(); ++id) {
        adjacency_[edges_[id].u].push_back({edges_[id].v, id});
        adjacency_[edges_[id].v].push_back({edges_[id].u, id});
    }
    for (auto& adj : adjacency_) {
        std::sort(adj.begin(), adj.end(),
                  [](const Adjacent& a, const Adjacent& b) { return a.node < b.node; });
    }
}

std::int64_t Topology::find_edge(NodeId a, NodeId b) const {
    if (!contains(a) || !contains(b)) return -1;
    const auto& adj = adjacency_[a];
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const Adjacent& x, NodeId n) { return x.node < n; });
    if (it == adj.end() || it->node != b) return -1;
    return it->edge;
}

EdgeId Topology::edge_id(NodeId a, NodeId b) const {
    auto id = find_edge(a, b);
    if (id < 0) throw std::invalid_argument("nodes are not physically linked");
    return static_cast<EdgeId>(id);
}

bool is_connected(std::size_t node_count, std::span<const Edge> edges) {
    if (node_count == 0) return false;
    // Union-find; cheaper than building adjacency for every random attempt.
    std::vector<std::size_t> parent(node_count);
    for (std::size_t i = 0; i < node_count; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t components = node_count;
    for (const auto& e : edges) {
        auto a = find(e.u), b = find(e.v);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

Topology make_grid(int rows, int cols) {
    if (rows < 2 || cols < 2) throw std::invalid_argument("grid dimensions must be >= 2");
    std::vector<Edge> edges;
    auto id = [cols](int r, int c) { return static_cast<NodeId>(r * cols + c); };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1)});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c)});
        }
    }
    return Topology(static_cast<std::size_t>(rows * cols), std::move(edges), GridKind{rows, cols});
}

Topology make_barbell(int clique_size) {
    if (clique_size < 2) throw std::invalid_argument("barbell clique size must be >= 2");
    const auto k = static_cast<NodeId>(clique_size);
    std::vector<Edge> edges;
    for (NodeId base : {NodeId{0}, k}) {
        for (NodeId a = 0; a < k; ++a)
            for (NodeId b = a + 1; b < k; ++b) edges.push_back({base + a, base + b});
    }
    // Bridge between the lowest-index node of each clique.
    edges.push_back({0, k});
    return Topology(2 * k, std::move(edges), BarbellKind{clique_size});
}

Topology make_random(int nodes, double prob, RandomStream& rng) {
    if (nodes < 2) throw std::invalid_argument("random graph needs >= 2 nodes");
    if (!(prob > 0.0 && prob <= 1.0)) throw std::invalid_argument("edge probability must be in (0, 1]");
    const auto n = static_cast<NodeId>(nodes);
    std::vector<Edge> edges;
    for (int attempt = 0; attempt < kRandomGraphAttempts; ++attempt) {
        auto local = derive_stream(rng(), {});
        edges.clear();
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = a + 1; b < n; ++b)
                if (bernoulli(local, prob)) edges.push_back({a, b});
        if (is_connected(n, edges)) return Topology(n, std::move(edges), RandomKind{nodes, prob});
    }
    throw GenerationFailed("random graph did not connect within " +
                           std::to_string(kRandomGraphAttempts) + " attempts");
}

Topology make_path(int nodes) {
    if (nodes < 2) throw std::invalid_argument("path needs >= 2 nodes");
    std::vector<Edge> edges;
    for (NodeId v = 0; v + 1 < static_cast<NodeId>(nodes); ++v) edges.push_back({v, v + 1});
    return Topology(static_cast<std::size_t>(nodes), std::move(edges), PathKind{nodes});
}

std::vector<int> bfs_distances(const Topology& topo, NodeId source) {
    if (!topo.contains(source)) throw std::invalid_argument("node out of range");
    std::vector<int> dist(topo.node_count(), -1);
    std::deque<NodeId> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        for (const auto& adj : topo.neighbors(v)) {
            if (dist[adj.node] < 0) {
                dist[adj.node] = dist[v] + 1;
                queue.push_back(adj.node);
            }
        }
    }
    return dist;
}

int hop_distance(const Topology& topo, NodeId u, NodeId v) {
    if (!topo.contains(u) || !topo.contains(v)) throw std::invalid_argument("node out of range");
    if (u == v) return 0;
    int d = bfs_distances(topo, u)[v];
    if (d < 0) throw Unreachable("no path between nodes");
    return d;
}

DistanceTable::DistanceTable(const Topology& topo) {
    rows_.reserve(topo.node_count());
    for (NodeId v = 0; v < topo.node_count(); ++v) rows_.push_back(bfs_distances(topo, v));
}

int DistanceTable::eccentricity(NodeId v) const {
    return *std::max_element(rows_[v].begin(), rows_[v].end());
}

ConsumerSet::ConsumerSet(std::vector<NodeId> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw std::invalid_argument("consumer set needs at least two nodes");
    auto sorted = nodes_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("consumers must be distinct");
}

bool ConsumerSet::contains(NodeId v) const {
    return std::find(nodes_.begin(), nodes_.end(), v) != nodes_.end();
}

double group_distance(const DistanceTable& dist, const ConsumerSet& nodes) {
    long total = 0;
    long pairs = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            int d = dist(nodes[i], nodes[j]);
            if (d < 0) throw Unreachable("consumers are not mutually reachable");
            total += d;
            ++pairs;
        }
    }
    return static_cast<double>(total) / static_cast<double>(pairs);
}

double group_distance(const Topology& topo, const ConsumerSet& nodes) {
    long total = 0;
    long pairs = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto row = bfs_distances(topo, nodes[i]);
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            if (row[nodes[j]] < 0) throw Unreachable("consumers are not mutually reachable");
            total += row[nodes[j]];
            ++pairs;
        }
    }
    return static_cast<double>(total) / static_cast<double>(pairs);
}

NodeId center_node(const DistanceTable& dist) {
    NodeId best = 0;
    int best_ecc = std::numeric_limits<int>::max();
    for (NodeId v = 0; v < dist.size(); ++v) {
        int ecc = dist.eccentricity(v);
        if (ecc < best_ecc) {
            best_ecc = ecc;
            best = v;
        }
    }
    return best;
}

NodeId center_node(const Topology& topo) { return center_node(DistanceTable(topo)); }

void SamplingSpec::validate() const {
    if (n < 2) throw std::invalid_argument("consumer count must be >= 2");
    if (d_star < 1.0) throw std::invalid_argument("d_star must be >= 1");
    if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
}

ConsumerSet sample_consumers(const DistanceTable& dist, const SamplingSpec& spec, NodeId root,
                             RandomStream& rng, std::uint64_t budget) {
    spec.validate();
    const std::size_t nodes = dist.size();
    if (root >= nodes) throw std::invalid_argument("root out of range");
    if (static_cast<std::size_t>(spec.n) > nodes - 1)
        throw std::invalid_argument("more consumers requested than non-root nodes");

    // Group distances are multiples of 1 / C(n, 2); the slack absorbs rounding.
    constexpr double kSlack = 1e-9;
    const double lo = spec.d_star - spec.delta - kSlack;
    const double hi = spec.d_star + spec.delta + kSlack;
    const auto candidates = nodes - 1;

    std::vector<NodeId> pick(static_cast<std::size_t>(spec.n));
    for (std::uint64_t draw = 0; draw < budget; ++draw) {
        for (std::size_t i = 0; i < pick.size(); ++i) {
            NodeId v;
            do {
                // Skip over the root so every non-root node is equally likely.
                v = static_cast<NodeId>(uniform_below(rng, candidates));
                if (v >= root) ++v;
            } while (std::find(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(i), v) !=
                     pick.begin() + static_cast<std::ptrdiff_t>(i));
            pick[i] = v;
        }
        ConsumerSet set(pick);
        double d = group_distance(dist, set);
        if (d >= lo && d <= hi) return set;
    }
    std::ostringstream msg;
    msg << "no consumer set with n=" << spec.n << " and distance in [" << spec.d_star - spec.delta
        << ", " << spec.d_star + spec.delta << "] after " << budget << " draws";
    throw SamplingExhausted(msg.str());
}

ConsumerSet sample_consumers(const Topology& topo, const SamplingSpec& spec, NodeId root,
                             RandomStream& rng, std::uint64_t budget) {
    return sample_consumers(DistanceTable(topo), spec, root, rng, budget);
}

void write_edge_list(std::ostream& out, const Topology& topo) {
    for (const auto& e : topo.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace ghz
