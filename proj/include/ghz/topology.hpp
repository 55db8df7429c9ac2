#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ghz/random.hpp"

namespace ghz {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Unordered node pair, stored with u < v.
struct Edge {
    NodeId u = 0;
    NodeId v = 0;

    static Edge of(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
    auto operator<=>(const Edge&) const = default;
};

struct GridKind {
    int rows = 0;
    int cols = 0;
};
struct BarbellKind {
    int clique_size = 0;
};
struct RandomKind {
    int nodes = 0;
    double prob = 0.0;
};
struct PathKind {
    int nodes = 0;
};
struct CustomKind {};

using TopologyKind = std::variant<GridKind, BarbellKind, RandomKind, PathKind, CustomKind>;

/// Renders a kind the way the CLI accepts it, e.g. "grid:10,10".
std::string describe(const TopologyKind& kind);

/// Static physical graph G(V, E). Immutable after construction; edges are kept
/// sorted so EdgeId is the position in edges().
class Topology {
  public:
    struct Adjacent {
        NodeId node;
        EdgeId edge;
    };

    /// Validates: endpoints in range, no self-loops, no duplicates, connected.
    Topology(std::size_t node_count, std::vector<Edge> edges, TopologyKind kind = CustomKind{});

    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    std::span<const Edge> edges() const { return edges_; }
    const Edge& edge(EdgeId id) const { return edges_.at(id); }
    const TopologyKind& kind() const { return kind_; }

    /// Neighbours sorted by node id.
    std::span<const Adjacent> neighbors(NodeId v) const { return adjacency_.at(v); }
    std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }

    /// Edge id of {a, b}, or -1 when the pair is not physically linked.
    std::int64_t find_edge(NodeId a, NodeId b) const;
    EdgeId edge_id(NodeId a, NodeId b) const;

    bool contains(NodeId v) const { return v < node_count(); }

  private:
    std::vector<Edge> edges_;
    std::vector<std::vector<Adjacent>> adjacency_;
    TopologyKind kind_;
};

bool is_connected(std::size_t node_count, std::span<const Edge> edges);

Topology make_grid(int rows, int cols);
Topology make_barbell(int clique_size);
/// Erdős–Rényi G(n, prob), resampled until connected (at most 1000 attempts).
Topology make_random(int nodes, double prob, RandomStream& rng);
Topology make_path(int nodes);

/// Hop distances from `source`; -1 marks unreachable nodes.
std::vector<int> bfs_distances(const Topology& topo, NodeId source);

int hop_distance(const Topology& topo, NodeId u, NodeId v);

/// All-pairs hop distances, one BFS per node.
class DistanceTable {
  public:
    explicit DistanceTable(const Topology& topo);
    int operator()(NodeId u, NodeId v) const { return rows_[u][v]; }
    std::size_t size() const { return rows_.size(); }
    int eccentricity(NodeId v) const;

  private:
    std::vector<std::vector<int>> rows_;
};

/// Ordered list of distinct consumer nodes, at least two.
class ConsumerSet {
  public:
    ConsumerSet() = default;
    explicit ConsumerSet(std::vector<NodeId> nodes);

    std::size_t size() const { return nodes_.size(); }
    std::span<const NodeId> nodes() const { return nodes_; }
    auto begin() const { return nodes_.begin(); }
    auto end() const { return nodes_.end(); }
    NodeId operator[](std::size_t i) const { return nodes_[i]; }
    bool contains(NodeId v) const;

    bool operator==(const ConsumerSet&) const = default;

  private:
    std::vector<NodeId> nodes_;
};

/// Mean hop distance over all unordered consumer pairs. For three consumers
/// this is the triplet distance (D(u,v) + D(v,w) + D(w,u)) / 3.
double group_distance(const Topology& topo, const ConsumerSet& nodes);
double group_distance(const DistanceTable& dist, const ConsumerSet& nodes);

/// Node of minimum eccentricity, lowest id on ties.
NodeId center_node(const Topology& topo);
NodeId center_node(const DistanceTable& dist);

struct SamplingSpec {
    int n = 3;
    double d_star = 4.0;
    double delta = 1.0;
    int trials = 100;

    void validate() const;
};

inline constexpr std::uint64_t kDefaultSamplingBudget = 1'000'000;

/// Uniform rejection sampling of n distinct non-root consumers whose
/// group_distance lies in [d_star - delta, d_star + delta].
ConsumerSet sample_consumers(const Topology& topo, const SamplingSpec& spec, NodeId root,
                             RandomStream& rng, std::uint64_t budget = kDefaultSamplingBudget);
ConsumerSet sample_consumers(const DistanceTable& dist, const SamplingSpec& spec, NodeId root,
                             RandomStream& rng, std::uint64_t budget = kDefaultSamplingBudget);

/// Debug dump: one "u v" line per edge, ascending.
void write_edge_list(std::ostream& out, const Topology& topo);

}  // namespace ghz
