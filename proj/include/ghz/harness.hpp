#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ghz/engines.hpp"
#include "ghz/resources.hpp"
#include "ghz/topology.hpp"

namespace ghz {

/// Parses "grid:R,C", "barbell:K", "random:N,P" or "path:N".
TopologyKind parse_topology(const std::string& text);

/// Builds the topology; random graphs draw from a stream derived from `seed`.
Topology build_topology(const TopologyKind& kind, std::uint64_t seed);

struct ExperimentConfig {
    std::vector<EngineKind> engines{EngineKind::maer, EngineKind::synchronous};
    TopologyKind topology = GridKind{10, 10};
    std::vector<double> p{0.6};
    std::vector<double> q{0.9};
    std::vector<CoherenceTime> m{CoherenceTime(1)};
    std::vector<int> n{3};
    std::vector<double> d_star{6.0};
    bool d_star_three_n = false;  ///< d_star = 3 * n for each n
    double delta = 1.0;
    int trials = 100;
    int slots = 20000;
    std::uint64_t seed = 0;
    FusionMode fusion_mode = FusionMode::uniform_q;
    Accounting accounting = Accounting::expected;
    int join_hops_per_slot = 0;

    void validate() const;
};

struct SeriesPoint {
    EngineKind engine;
    std::string topology;
    double p;
    double q;
    CoherenceTime m;
    int n;
    double d_star;
    std::string sweep_param;
    double sweep_value;  ///< +inf for m = inf
    double mean_rate;
    double stderr_rate;
    int trials;
};

/// Sample mean and sample-sd / sqrt(N) over per-trial means; stderr is 0 for N = 1.
struct MeanStderr {
    double mean;
    double stderr_rate;
};
MeanStderr mean_and_stderr(std::span<const double> values);

/// A sweep broken into independent (point, trial) tasks. Construction builds
/// the topology, fixes the root at the centre and samples every consumer set;
/// run_task is const and touches only task-local state, so tasks may run in
/// any order or concurrently.
class ExperimentPlan {
  public:
    explicit ExperimentPlan(ExperimentConfig config);

    std::size_t task_count() const { return points_.size() * static_cast<std::size_t>(config_.trials); }
    double run_task(std::size_t task) const;
    std::vector<SeriesPoint> aggregate(std::span<const double> trial_means) const;

    const Topology& topology() const { return topology_; }
    NodeId root() const { return root_; }
    const ConsumerSet& consumers(std::size_t placement, int trial) const;

  private:
    struct Placement {
        int n;
        double d_star;
    };
    struct Point {
        std::size_t placement;
        std::size_t sweep_index;  // (placement, p, q, m) combination
        EngineKind engine;
        QuantumParams params;
    };

    ExperimentConfig config_;
    Topology topology_;
    NodeId root_;
    std::string sweep_param_;
    std::vector<Placement> placements_;
    std::vector<Point> points_;
    std::vector<std::vector<ConsumerSet>> consumers_;  // [placement][trial]
};

/// Reference path: every task in order on the calling thread.
std::vector<SeriesPoint> run_experiment_serial(const ExperimentConfig& config);
/// OpenMP path over tasks; output identical to the serial path.
std::vector<SeriesPoint> run_experiment_parallel(const ExperimentConfig& config);
inline std::vector<SeriesPoint> run_experiment(const ExperimentConfig& config) {
    return run_experiment_parallel(config);
}

inline constexpr const char* kCsvHeader =
    "engine,topology,p,q,m,n,d_star,sweep_param,sweep_value,mean_rate,stderr,trials";

/// Header plus one row per point, sorted by sweep value (stable), numbers with
/// 6 significant digits, infinite m as "inf".
void emit_csv(std::span<const SeriesPoint> series, std::ostream& out);
void emit_csv(std::span<const SeriesPoint> series, const std::string& path);

/// 6-significant-digit rendering used in the CSV.
std::string format_number(double value);

}  // namespace ghz
