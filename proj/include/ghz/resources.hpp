#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ghz/random.hpp"
#include "ghz/topology.hpp"

namespace ghz {

/// Memory coherence time in whole slots, or infinite.
class CoherenceTime {
  public:
    constexpr CoherenceTime() = default;
    explicit CoherenceTime(int slots);
    static constexpr CoherenceTime infinite() { return CoherenceTime(Infinite{}); }

    bool is_infinite() const { return !slots_.has_value(); }
    int slots() const;  // throws on infinite

    /// Infinite compares greater than every finite value.
    std::strong_ordering operator<=>(const CoherenceTime& other) const;
    bool operator==(const CoherenceTime&) const = default;

    /// "inf" or the slot count.
    std::string to_string() const;
    /// Accepts a positive integer or "inf".
    static CoherenceTime parse(const std::string& text);

  private:
    struct Infinite {};
    constexpr explicit CoherenceTime(Infinite) : slots_(std::nullopt) {}
    std::optional<int> slots_ = 1;
};

enum class FusionMode { uniform_q, optical_half_power };

std::string to_string(FusionMode mode);
FusionMode parse_fusion_mode(const std::string& text);

struct QuantumParams {
    double p = 1.0;  ///< direct-link generation success per attempt
    double q = 1.0;  ///< success per repeater operation (swap, fusion, fan-out)
    CoherenceTime m{};
    FusionMode fusion_mode = FusionMode::uniform_q;

    /// Requires p and q in [0, 1].
    void validate() const;
};

/// Live direct-link entanglement per physical edge: the instant topology G'.
/// At most one link per edge; a link's age counts slots since creation.
class EntanglementPool {
  public:
    explicit EntanglementPool(const Topology& topo);

    const Topology& topology() const { return *topo_; }

    bool is_live(EdgeId e) const { return age_.at(e) >= 0; }
    std::optional<int> age(EdgeId e) const;
    std::size_t live_count() const { return live_; }
    std::vector<EdgeId> live_edges() const;

    /// Inserts a fresh (age 0) link on an idle edge.
    void create(EdgeId e);

    /// Each idle edge independently becomes live with probability p.
    /// Live edges are untouched. Returns the number of new links.
    int attempt_generation(const QuantumParams& params, RandomStream& rng);

    /// Ages every live link by one slot; links reaching age m are removed and
    /// returned in edge order.
    std::vector<EdgeId> advance_age(const QuantumParams& params);

    /// Removes the listed links. Every listed edge must be live.
    void consume(std::span<const EdgeId> edges);

    void clear();

    /// Throws std::logic_error on a link with age >= m.
    void check_invariants(const QuantumParams& params) const;

  private:
    const Topology* topo_;
    std::vector<int> age_;  // -1 = idle
    std::size_t live_ = 0;
};

/// Tree fragment connecting a consumer set. Every leaf is a consumer.
struct SteinerSubtree {
    std::vector<NodeId> nodes;  // sorted
    std::vector<Edge> edges;    // sorted
    ConsumerSet consumers;
    int op_count = 0;

    /// Builds the subtree from its edge set, deriving nodes and op_count.
    /// Throws std::invalid_argument if the edges are not a tree whose leaves
    /// are all consumers and which spans every consumer.
    static SteinerSubtree from_edges(std::vector<Edge> edges, ConsumerSet consumers);

    int degree(NodeId v) const;
};

/// Nodes that perform an operation: everything except degree-1 consumers.
/// Pass-through nodes swap, branching nodes fuse, internal consumers fan out.
int count_operations(std::span<const NodeId> nodes, std::span<const Edge> edges,
                     const ConsumerSet& consumers);

/// Empty when the subtree satisfies every structural invariant, otherwise a
/// description of the first violation found.
std::optional<std::string> subtree_violation(const SteinerSubtree& tree);

/// q^op_count in uniform mode. In optical mode every non-consumer node of
/// degree b >= 3 contributes 1/2^b in place of its q factor.
double tree_success_probability(const SteinerSubtree& tree, const QuantumParams& params);

}  // namespace ghz
