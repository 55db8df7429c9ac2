#include "ghz/resources.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ghz/errors.hpp"

namespace ghz {

CoherenceTime::CoherenceTime(int slots) : slots_(slots) {
    if (slots < 1) throw std::invalid_argument("coherence time must be >= 1 slot");
}

int CoherenceTime::slots() const {
    if (!slots_) throw std::logic_error("infinite coherence time has no slot count");
    return *slots_;
}

std::strong_ordering CoherenceTime::operator<=>(const CoherenceTime& other) const {
    if (is_infinite() || other.is_infinite()) return is_infinite() <=> other.is_infinite();
    return *slots_ <=> *other.slots_;
}

std::string CoherenceTime::to_string() const {
    return is_infinite() ? std::string("inf") : std::to_string(*slots_);
}

CoherenceTime CoherenceTime::parse(const std::string& text) {
    if (text == "inf" || text == "infinite") return infinite();
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::invalid_argument("coherence time must be an integer or 'inf': " + text);
    return CoherenceTime(value);
}

std::string to_string(FusionMode mode) {
    return mode == FusionMode::uniform_q ? "uniform_q" : "optical_half_power";
}

FusionMode parse_fusion_mode(const std::string& text) {
    if (text == "uniform_q" || text == "uniform") return FusionMode::uniform_q;
    if (text == "optical_half_power" || text == "optical") return FusionMode::optical_half_power;
    throw std::invalid_argument("unknown fusion mode: " + text);
}

void QuantumParams::validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0, 1]");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must be in [0, 1]");
}

EntanglementPool::EntanglementPool(const Topology& topo)
    : topo_(&topo), age_(topo.edge_count(), -1) {}

std::optional<int> EntanglementPool::age(EdgeId e) const {
    int a = age_.at(e);
    if (a < 0) return std::nullopt;
    return a;
}

std::vector<EdgeId> EntanglementPool::live_edges() const {
    std::vector<EdgeId> out;
    out.reserve(live_);
    for (EdgeId e = 0; e < age_.size(); ++e)
        if (age_[e] >= 0) out.push_back(e);
    return out;
}

void EntanglementPool::create(EdgeId e) {
    if (age_.at(e) >= 0) throw PreconditionViolation("edge already holds a live link");
    age_[e] = 0;
    ++live_;
}

int EntanglementPool::attempt_generation(const QuantumParams& params, RandomStream& rng) {
    int created = 0;
    for (auto& a : age_) {
        if (a >= 0) continue;
        if (bernoulli(rng, params.p)) {
            a = 0;
            ++created;
        }
    }
    live_ += static_cast<std::size_t>(created);
    return created;
}

std::vector<EdgeId> EntanglementPool::advance_age(const QuantumParams& params) {
    std::vector<EdgeId> expired;
    const bool finite = !params.m.is_infinite();
    const int limit = finite ? params.m.slots() : 0;
    for (EdgeId e = 0; e < age_.size(); ++e) {
        if (age_[e] < 0) continue;
        // Infinite links never expire; their age saturates instead of overflowing.
        if (!finite) {
            if (age_[e] < std::numeric_limits<int>::max()) ++age_[e];
            continue;
        }
        if (++age_[e] >= limit) {
            age_[e] = -1;
            --live_;
            expired.push_back(e);
        }
    }
    return expired;
}

void EntanglementPool::consume(std::span<const EdgeId> edges) {
    for (EdgeId e : edges) {
        if (e >= age_.size() || age_[e] < 0)
            throw PreconditionViolation("consume: edge " + std::to_string(e) + " is not live");
    }
    for (EdgeId e : edges) {
        if (age_[e] >= 0) {
            age_[e] = -1;
            --live_;
        }
    }
}

void EntanglementPool::clear() {
    std::fill(age_.begin(), age_.end(), -1);
    live_ = 0;
}

void EntanglementPool::check_invariants(const QuantumParams& params) const {
    std::size_t count = 0;
    for (int a : age_) {
        if (a < 0) continue;
        ++count;
        if (!params.m.is_infinite() && a >= params.m.slots())
            throw std::logic_error("pool holds a link with age >= m");
    }
    if (count != live_) throw std::logic_error("pool live count out of sync");
}

namespace {

// Degree of every entry of the sorted node list; -1 if an edge endpoint is
// missing from the list.
std::vector<int> degrees(std::span<const NodeId> nodes, std::span<const Edge> edges) {
    std::vector<int> deg(nodes.size(), 0);
    for (const auto& e : edges) {
        for (NodeId end : {e.u, e.v}) {
            auto it = std::lower_bound(nodes.begin(), nodes.end(), end);
            if (it == nodes.end() || *it != end) return {};
            ++deg[static_cast<std::size_t>(it - nodes.begin())];
        }
    }
    return deg;
}

std::size_t index_of(std::span<const NodeId> nodes, NodeId v) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
}

}  // namespace

int count_operations(std::span<const NodeId> nodes, std::span<const Edge> edges,
                     const ConsumerSet& consumers) {
    std::vector<NodeId> sorted(nodes.begin(), nodes.end());
    std::sort(sorted.begin(), sorted.end());
    auto deg = degrees(sorted, edges);
    if (deg.empty() && !edges.empty()) throw std::invalid_argument("edge endpoint not in node list");
    int ops = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        bool leaf_consumer = deg[i] == 1 && consumers.contains(sorted[i]);
        if (!leaf_consumer) ++ops;
    }
    return ops;
}

std::optional<std::string> subtree_violation(const SteinerSubtree& tree) {
    const auto& nodes = tree.nodes;
    if (tree.edges.empty()) return "subtree has no edges";
    if (!std::is_sorted(nodes.begin(), nodes.end()) ||
        std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
        return "node list is not sorted and unique";
    if (nodes.size() != tree.edges.size() + 1) return "edge count is not node count - 1";
    for (const auto& e : tree.edges)
        if (e.u == e.v) return "self-loop";

    auto deg = degrees(nodes, tree.edges);
    if (deg.empty()) return "edge endpoint missing from node list";
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (deg[i] == 0) return "node " + std::to_string(nodes[i]) + " is not on any edge";

    // Connected with |V| - 1 edges means acyclic. Union-find over list positions.
    std::vector<std::size_t> up(nodes.size());
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = i;
    auto find = [&](std::size_t x) {
        while (up[x] != x) x = up[x] = up[up[x]];
        return x;
    };
    for (const auto& e : tree.edges) {
        auto a = find(index_of(nodes, e.u)), b = find(index_of(nodes, e.v));
        if (a == b) return "subtree has a cycle";
        up[a] = b;
    }

    for (NodeId c : tree.consumers)
        if (!std::binary_search(nodes.begin(), nodes.end(), c))
            return "consumer " + std::to_string(c) + " not spanned";
    int ops = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const bool consumer = tree.consumers.contains(nodes[i]);
        if (deg[i] == 1 && !consumer) return "leaf " + std::to_string(nodes[i]) + " is not a consumer";
        if (!(deg[i] == 1 && consumer)) ++ops;
    }
    if (tree.op_count != ops) return "op_count disagrees with the node roles";
    return std::nullopt;
}

SteinerSubtree SteinerSubtree::from_edges(std::vector<Edge> edges, ConsumerSet consumers) {
    SteinerSubtree tree;
    for (auto& e : edges) {
        e = Edge::of(e.u, e.v);
        tree.nodes.push_back(e.u);
        tree.nodes.push_back(e.v);
    }
    std::sort(edges.begin(), edges.end());
    std::sort(tree.nodes.begin(), tree.nodes.end());
    tree.nodes.erase(std::unique(tree.nodes.begin(), tree.nodes.end()), tree.nodes.end());
    tree.edges = std::move(edges);
    tree.consumers = std::move(consumers);
    tree.op_count = count_operations(tree.nodes, tree.edges, tree.consumers);
    if (auto bad = subtree_violation(tree)) throw std::invalid_argument("invalid subtree: " + *bad);
    return tree;
}

int SteinerSubtree::degree(NodeId v) const {
    return static_cast<int>(std::count_if(edges.begin(), edges.end(),
                                          [v](const Edge& e) { return e.u == v || e.v == v; }));
}

double tree_success_probability(const SteinerSubtree& tree, const QuantumParams& params) {
    if (params.fusion_mode == FusionMode::uniform_q) return std::pow(params.q, tree.op_count);

    auto degree = degrees(tree.nodes, tree.edges);
    double prob = 1.0;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const bool consumer = tree.consumers.contains(tree.nodes[i]);
        const int deg = degree[i];
        if (consumer && deg == 1) continue;
        if (!consumer && deg >= 3)
            prob *= std::ldexp(1.0, -deg);
        else
            prob *= params.q;
    }
    return prob;
}

}  // namespace ghz
