#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ghz/resources.hpp"
#include "ghz/topology.hpp"

namespace ghz {

struct JoinEvent {
    NodeId joiner;
    NodeId parent;
    int slot;

    bool operator==(const JoinEvent&) const = default;
};

/// Destination-oriented tree over the instant topology, grown outward from a
/// fixed root. Ranks are hop counts from the root along parent edges, so a
/// parent always has a strictly lower rank than its child and no cycle can
/// form. Members keep their parent until the parent edge expires or is
/// consumed; there is no reparenting.
class Dodag {
  public:
    static constexpr NodeId kNoParent = static_cast<NodeId>(-1);

    Dodag(const Topology& topo, NodeId root);

    NodeId root() const { return root_; }
    const Topology& topology() const { return *topo_; }

    bool is_member(NodeId v) const { return rank_.at(v) >= 0; }
    std::optional<NodeId> parent(NodeId v) const;
    std::optional<int> rank(NodeId v) const;
    std::size_t member_count() const { return members_; }
    std::vector<NodeId> members() const;
    std::span<const NodeId> children(NodeId v) const { return children_.at(v); }

    /// One classical messaging exchange (DIS / DIO / DAO). Every non-member
    /// with a live link to a member joins under the linked member of lowest
    /// rank, ties by lowest id. A joined node immediately advertises, so the
    /// frontier keeps expanding until no node can join, or for at most
    /// `max_hops` layers when max_hops > 0. Events are in join order.
    std::vector<JoinEvent> join_round(const EntanglementPool& pool, int slot, int max_hops = 0);

    /// Removes the child subtree below every listed edge that is a parent
    /// edge. Returns removed nodes, ascending.
    std::vector<NodeId> detach(std::span<const EdgeId> edges);

    /// Minimal subtree of the parent-edge tree spanning all consumers, or
    /// nothing while any consumer is outside the DODAG. Its top node is the
    /// consumers' deepest common ancestor, which may sit below the root.
    std::optional<SteinerSubtree> steiner_subtree(const ConsumerSet& consumers) const;

    /// Empty when every structural invariant holds against `pool`.
    std::optional<std::string> violation(const EntanglementPool& pool) const;

    /// "node parent rank" per member, ascending by node; the root's parent is "-".
    void write_table(std::ostream& out) const;

  private:
    void remove_subtree(NodeId top, std::vector<NodeId>& removed);

    const Topology* topo_;
    NodeId root_;
    std::vector<int> rank_;  // -1 for non-members
    std::vector<NodeId> parent_;
    std::vector<std::vector<NodeId>> children_;
    std::size_t members_ = 0;
};

}  // namespace ghz
