#include "ghz/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ghz/errors.hpp"

namespace ghz {

namespace {

// Stream keys so topology, placement and engine draws never share a stream.
constexpr std::uint64_t kTopologyStream = 0;
constexpr std::uint64_t kPlacementStream = 1;
constexpr std::uint64_t kEngineStream = 2;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

int parse_int(const std::string& text) {
    std::size_t used = 0;
    int value = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument("not an integer: " + text);
    return value;
}

double parse_double(const std::string& text) {
    std::size_t used = 0;
    double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("not a number: " + text);
    return value;
}

}  // namespace

TopologyKind parse_topology(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("topology must look like kind:params: " + text);
    const auto name = text.substr(0, colon);
    const auto args = split(text.substr(colon + 1), ',');
    try {
        if (name == "grid" && args.size() == 2) return GridKind{parse_int(args[0]), parse_int(args[1])};
        if (name == "barbell" && args.size() == 1) return BarbellKind{parse_int(args[0])};
        if (name == "random" && args.size() == 2) return RandomKind{parse_int(args[0]), parse_double(args[1])};
        if (name == "path" && args.size() == 1) return PathKind{parse_int(args[0])};
    } catch (const std::logic_error&) {
        // stoi / stod failures fall through to the common message.
    }
    throw std::invalid_argument("unrecognized topology: " + text);
}

Topology build_topology(const TopologyKind& kind, std::uint64_t seed) {
    if (auto g = std::get_if<GridKind>(&kind)) return make_grid(g->rows, g->cols);
    if (auto b = std::get_if<BarbellKind>(&kind)) return make_barbell(b->clique_size);
    if (auto p = std::get_if<PathKind>(&kind)) return make_path(p->nodes);
    if (auto r = std::get_if<RandomKind>(&kind)) {
        auto rng = derive_stream(seed, {kTopologyStream});
        return make_random(r->nodes, r->prob, rng);
    }
    throw std::invalid_argument("custom topologies cannot be built from a config");
}

void ExperimentConfig::validate() const {
    if (engines.empty()) throw std::invalid_argument("at least one engine is required");
    if (p.empty() || q.empty() || m.empty() || n.empty())
        throw std::invalid_argument("p, q, m and consumer lists must be non-empty");
    if (!d_star_three_n && d_star.empty()) throw std::invalid_argument("d_star list must be non-empty");
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("p must be in [0, 1]");
    for (double v : q)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("q must be in [0, 1]");
    for (int v : n)
        if (v < 2) throw std::invalid_argument("consumer count must be >= 2");
    for (double v : d_star)
        if (!d_star_three_n && v < 1.0) throw std::invalid_argument("d_star must be >= 1");
    if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (slots < 1) throw std::invalid_argument("slots must be >= 1");
    if (join_hops_per_slot < 0) throw std::invalid_argument("join hops per slot must be >= 0");
}

MeanStderr mean_and_stderr(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("no values to aggregate");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double count = static_cast<double>(values.size());
    const double mean = sum / count;
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (count - 1.0)) / std::sqrt(count)};
}

ExperimentPlan::ExperimentPlan(ExperimentConfig config)
    : config_(std::move(config)), topology_(build_topology(config_.topology, config_.seed)) {
    config_.validate();
    const DistanceTable dist(topology_);
    root_ = center_node(dist);

    if (config_.d_star_three_n) {
        for (int n : config_.n) placements_.push_back({n, 3.0 * n});
    } else {
        for (int n : config_.n)
            for (double d : config_.d_star) placements_.push_back({n, d});
    }

    // The first axis that actually varies names the sweep.
    if (config_.m.size() > 1)
        sweep_param_ = "m";
    else if (config_.p.size() > 1)
        sweep_param_ = "p";
    else if (config_.q.size() > 1)
        sweep_param_ = "q";
    else if (!config_.d_star_three_n && config_.d_star.size() > 1)
        sweep_param_ = "d_star";
    else if (config_.n.size() > 1)
        sweep_param_ = "n";
    else
        sweep_param_ = "m";

    std::size_t sweep_index = 0;
    for (std::size_t pl = 0; pl < placements_.size(); ++pl) {
        for (double p : config_.p)
            for (double q : config_.q)
                for (const auto& m : config_.m) {
                    QuantumParams params{p, q, m, config_.fusion_mode};
                    for (auto engine : config_.engines) points_.push_back({pl, sweep_index, engine, params});
                    ++sweep_index;
                }
    }

    consumers_.resize(placements_.size());
    for (std::size_t pl = 0; pl < placements_.size(); ++pl) {
        SamplingSpec spec{placements_[pl].n, placements_[pl].d_star, config_.delta, config_.trials};
        for (int t = 0; t < config_.trials; ++t) {
            auto rng = derive_stream(config_.seed, {kPlacementStream, pl, static_cast<std::uint64_t>(t)});
            try {
                consumers_[pl].push_back(sample_consumers(dist, spec, root_, rng));
            } catch (const SamplingExhausted& e) {
                std::ostringstream msg;
                msg << "sweep point n=" << spec.n << " d_star=" << format_number(spec.d_star) << ": "
                    << e.what();
                throw SamplingExhausted(msg.str());
            }
        }
    }
}

const ConsumerSet& ExperimentPlan::consumers(std::size_t placement, int trial) const {
    return consumers_.at(placement).at(static_cast<std::size_t>(trial));
}

double ExperimentPlan::run_task(std::size_t task) const {
    const auto trials = static_cast<std::size_t>(config_.trials);
    const Point& point = points_.at(task / trials);
    const auto trial = static_cast<int>(task % trials);
    auto rng = derive_stream(config_.seed, {kEngineStream, point.sweep_index, static_cast<std::uint64_t>(trial),
                                            static_cast<std::uint64_t>(point.engine)});
    EngineOptions options{config_.accounting, config_.join_hops_per_slot};
    return run_trial(point.engine, topology_, root_, consumers(point.placement, trial), point.params, options,
                     config_.slots, rng);
}

std::vector<SeriesPoint> ExperimentPlan::aggregate(std::span<const double> trial_means) const {
    if (trial_means.size() != task_count()) throw std::invalid_argument("one result per task expected");
    const auto trials = static_cast<std::size_t>(config_.trials);
    const auto topo_name = describe(config_.topology);
    std::vector<SeriesPoint> out;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& pt = points_[i];
        const auto& pl = placements_[pt.placement];
        auto stats = mean_and_stderr(trial_means.subspan(i * trials, trials));
        double sweep = 0.0;
        if (sweep_param_ == "m")
            sweep = pt.params.m.is_infinite() ? std::numeric_limits<double>::infinity() : pt.params.m.slots();
        else if (sweep_param_ == "p")
            sweep = pt.params.p;
        else if (sweep_param_ == "q")
            sweep = pt.params.q;
        else if (sweep_param_ == "d_star")
            sweep = pl.d_star;
        else
            sweep = pl.n;
        out.push_back({pt.engine, topo_name, pt.params.p, pt.params.q, pt.params.m, pl.n, pl.d_star, sweep_param_,
                       sweep, stats.mean, stats.stderr_rate, config_.trials});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SeriesPoint& a, const SeriesPoint& b) { return a.sweep_value < b.sweep_value; });
    return out;
}

std::vector<SeriesPoint> run_experiment_serial(const ExperimentConfig& config) {
    ExperimentPlan plan(config);
    std::vector<double> means(plan.task_count());
    for (std::size_t i = 0; i < means.size(); ++i) means[i] = plan.run_task(i);
    return plan.aggregate(means);
}

std::vector<SeriesPoint> run_experiment_parallel(const ExperimentConfig& config) {
    ExperimentPlan plan(config);
    const auto count = static_cast<std::int64_t>(plan.task_count());
    std::vector<double> means(plan.task_count());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            means[static_cast<std::size_t>(i)] = plan.run_task(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return plan.aggregate(means);
}

std::string format_number(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

namespace {

// RFC 4180 quoting; topology names such as grid:10,10 contain commas.
std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

}  // namespace

void emit_csv(std::span<const SeriesPoint> series, std::ostream& out) {
    if (series.empty()) throw std::invalid_argument("refusing to write an empty series");
    std::vector<SeriesPoint> rows(series.begin(), series.end());
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SeriesPoint& a, const SeriesPoint& b) { return a.sweep_value < b.sweep_value; });
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << to_string(r.engine) << ',' << csv_field(r.topology) << ',' << format_number(r.p) << ','
            << format_number(r.q) << ',' << r.m.to_string() << ',' << r.n << ',' << format_number(r.d_star)
            << ',' << r.sweep_param << ',' << format_number(r.sweep_value) << ',' << format_number(r.mean_rate)
            << ',' << format_number(r.stderr_rate) << ',' << r.trials << '\n';
    }
}

void emit_csv(std::span<const SeriesPoint> series, const std::string& path) {
    if (series.empty()) throw std::invalid_argument("refusing to write an empty series");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    emit_csv(series, out);
    out.flush();
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace ghz
