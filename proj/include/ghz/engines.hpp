#pragma once

#include <optional>
#include <string>

#include "ghz/dodag.hpp"
#include "ghz/random.hpp"
#include "ghz/resources.hpp"
#include "ghz/topology.hpp"

namespace ghz {

enum class EngineKind { maer, synchronous };
std::string to_string(EngineKind kind);

/// expected: a formed structure records its success probability.
/// bernoulli: the probability is drawn once and the slot records 1 or 0; the
/// structure's links are consumed either way.
enum class Accounting { expected, bernoulli };
std::string to_string(Accounting mode);
Accounting parse_accounting(const std::string& text);

struct EngineOptions {
    Accounting accounting = Accounting::expected;
    int join_hops_per_slot = 0;  ///< 0 = cascade to a fixed point
};

struct RateSample {
    int slot = 0;
    double xi = 0.0;  ///< 0 when no structure formed
    int ops = 0;
    int subtree_edges = 0;
};

/// One asynchronous slot: expire and detach, generate on idle edges, join,
/// then serve the request over the DODAG's Steiner subtree and consume it.
RateSample maer_slot(EntanglementPool& pool, Dodag& dodag, const ConsumerSet& consumers,
                     const QuantumParams& params, const EngineOptions& options, int slot,
                     RandomStream& rng);

/// Steiner structure found with global knowledge of the live links: the
/// median node minimizing the summed hop distance to all consumers, joined to
/// each consumer by a shortest path. Nothing if the consumers are not
/// connected in the instant graph.
std::optional<SteinerSubtree> median_steiner_tree(const EntanglementPool& pool,
                                                  const ConsumerSet& consumers);

/// One synchronous two-phase slot. The pool must be empty on entry and is
/// reset on exit.
RateSample sync_slot(EntanglementPool& pool, const ConsumerSet& consumers,
                     const QuantumParams& params, const EngineOptions& options, int slot,
                     RandomStream& rng);

/// Runs `slots` slots from fresh state and returns the mean rate.
double run_trial(EngineKind engine, const Topology& topo, NodeId root, const ConsumerSet& consumers,
                 const QuantumParams& params, const EngineOptions& options, int slots,
                 RandomStream& rng);

/// MAER state bundle for callers that step slot by slot.
class MaerEngine {
  public:
    MaerEngine(const Topology& topo, NodeId root, ConsumerSet consumers, QuantumParams params,
               EngineOptions options = {});

    RateSample step(RandomStream& rng);

    const EntanglementPool& pool() const { return pool_; }
    const Dodag& dodag() const { return dodag_; }
    const ConsumerSet& consumers() const { return consumers_; }
    int slot() const { return slot_; }

  private:
    EntanglementPool pool_;
    Dodag dodag_;
    ConsumerSet consumers_;
    QuantumParams params_;
    EngineOptions options_;
    int slot_ = 0;
};

}  // namespace ghz
