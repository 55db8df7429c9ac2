#include "ghz/dodag.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace ghz {

Dodag::Dodag(const Topology& topo, NodeId root)
    : topo_(&topo),
      root_(root),
      rank_(topo.node_count(), -1),
      parent_(topo.node_count(), kNoParent),
      children_(topo.node_count()) {
    if (!topo.contains(root)) throw std::invalid_argument("root out of range");
    rank_[root] = 0;
    members_ = 1;
}

std::optional<NodeId> Dodag::parent(NodeId v) const {
    if (parent_.at(v) == kNoParent) return std::nullopt;
    return parent_[v];
}

std::optional<int> Dodag::rank(NodeId v) const {
    if (rank_.at(v) < 0) return std::nullopt;
    return rank_[v];
}

std::vector<NodeId> Dodag::members() const {
    std::vector<NodeId> out;
    out.reserve(members_);
    for (NodeId v = 0; v < rank_.size(); ++v)
        if (rank_[v] >= 0) out.push_back(v);
    return out;
}

std::vector<JoinEvent> Dodag::join_round(const EntanglementPool& pool, int slot, int max_hops) {
    std::vector<JoinEvent> events;
    std::vector<JoinEvent> layer;
    // The first layer may attach anywhere; later layers can only hang off the
    // previous layer, since link liveness is fixed within the round.
    std::vector<NodeId> candidates;
    for (NodeId v = 0; v < rank_.size(); ++v)
        if (rank_[v] < 0) candidates.push_back(v);

    for (int hop = 0; max_hops <= 0 || hop < max_hops; ++hop) {
        layer.clear();
        for (NodeId v : candidates) {
            if (rank_[v] >= 0) continue;
            NodeId best = kNoParent;
            for (const auto& adj : topo_->neighbors(v)) {
                if (rank_[adj.node] < 0 || !pool.is_live(adj.edge)) continue;
                // Neighbours arrive in id order, so strict < keeps the lowest id on ties.
                if (best == kNoParent || rank_[adj.node] < rank_[best]) best = adj.node;
            }
            if (best != kNoParent) layer.push_back({v, best, slot});
        }
        if (layer.empty()) break;
        // The whole layer answers the same DIO round: parents are pre-round members.
        candidates.clear();
        for (const auto& ev : layer) {
            rank_[ev.joiner] = rank_[ev.parent] + 1;
            parent_[ev.joiner] = ev.parent;
            children_[ev.parent].push_back(ev.joiner);
            ++members_;
        }
        for (const auto& ev : layer)
            for (const auto& adj : topo_->neighbors(ev.joiner))
                if (rank_[adj.node] < 0 && pool.is_live(adj.edge)) candidates.push_back(adj.node);
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        events.insert(events.end(), layer.begin(), layer.end());
    }
    return events;
}

void Dodag::remove_subtree(NodeId top, std::vector<NodeId>& removed) {
    NodeId up = parent_[top];
    if (up != kNoParent) {
        auto& siblings = children_[up];
        siblings.erase(std::find(siblings.begin(), siblings.end(), top));
    }
    std::vector<NodeId> stack{top};
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (NodeId c : children_[v]) stack.push_back(c);
        children_[v].clear();
        rank_[v] = -1;
        parent_[v] = kNoParent;
        --members_;
        removed.push_back(v);
    }
}

std::vector<NodeId> Dodag::detach(std::span<const EdgeId> edges) {
    std::vector<NodeId> removed;
    for (EdgeId id : edges) {
        const Edge& e = topo_->edge(id);
        if (rank_[e.u] >= 0 && parent_[e.u] == e.v)
            remove_subtree(e.u, removed);
        else if (rank_[e.v] >= 0 && parent_[e.v] == e.u)
            remove_subtree(e.v, removed);
    }
    std::sort(removed.begin(), removed.end());
    return removed;
}

std::optional<SteinerSubtree> Dodag::steiner_subtree(const ConsumerSet& consumers) const {
    for (NodeId c : consumers)
        if (!topo_->contains(c) || rank_[c] < 0) return std::nullopt;

    // Deepest common ancestor; ranks equal depths.
    auto common = [&](NodeId a, NodeId b) {
        while (rank_[a] > rank_[b]) a = parent_[a];
        while (rank_[b] > rank_[a]) b = parent_[b];
        while (a != b) {
            a = parent_[a];
            b = parent_[b];
        }
        return a;
    };
    NodeId top = consumers[0];
    for (std::size_t i = 1; i < consumers.size(); ++i) top = common(top, consumers[i]);

    std::vector<Edge> edges;
    std::vector<char> taken(rank_.size(), 0);
    for (NodeId c : consumers) {
        for (NodeId v = c; v != top && !taken[v]; v = parent_[v]) {
            taken[v] = 1;
            edges.push_back(Edge::of(v, parent_[v]));
        }
    }
    return SteinerSubtree::from_edges(std::move(edges), consumers);
}

std::optional<std::string> Dodag::violation(const EntanglementPool& pool) const {
    if (rank_[root_] != 0 || parent_[root_] != kNoParent) return "root must have rank 0 and no parent";
    std::size_t count = 0;
    for (NodeId v = 0; v < rank_.size(); ++v) {
        if (rank_[v] < 0) {
            if (parent_[v] != kNoParent || !children_[v].empty())
                return "non-member " + std::to_string(v) + " has tree state";
            continue;
        }
        ++count;
        if (v == root_) continue;
        NodeId f = parent_[v];
        if (f == kNoParent || rank_[f] < 0) return "member " + std::to_string(v) + " has no member parent";
        if (!(rank_[f] < rank_[v])) return "parent rank not strictly lower at " + std::to_string(v);
        if (rank_[v] != rank_[f] + 1) return "rank is not parent rank + 1 at " + std::to_string(v);
        auto id = topo_->find_edge(v, f);
        if (id < 0 || !pool.is_live(static_cast<EdgeId>(id)))
            return "parent edge of " + std::to_string(v) + " has no live link";
        const auto& sib = children_[f];
        if (std::find(sib.begin(), sib.end(), v) == sib.end())
            return "child list of " + std::to_string(f) + " misses " + std::to_string(v);
    }
    if (count != members_) return "member count out of sync";
    return std::nullopt;
}

void Dodag::write_table(std::ostream& out) const {
    for (NodeId v = 0; v < rank_.size(); ++v) {
        if (rank_[v] < 0) continue;
        out << v << ' ';
        if (parent_[v] == kNoParent)
            out << '-';
        else
            out << parent_[v];
        out << ' ' << rank_[v] << '\n';
    }
}

}  // namespace ghz
