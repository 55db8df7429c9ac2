#include "ghz/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ghz/dodag.hpp"
#include "ghz/errors.hpp"
#include "ghz/harness.hpp"
#include "ghz/verifier.hpp"

namespace ghz {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct RunArgs {
    std::string engine = "both";
    std::string topology = "grid:10,10";
    std::string p = "0.6";
    std::string q = "0.9";
    std::string m = "1";
    std::string consumers = "3";
    std::string d_star = "6";
    double delta = 1.0;
    int trials = 100;
    int slots = 20000;
    std::uint64_t seed = 0;
    std::string fusion_mode = "uniform_q";
    std::string accounting = "expected";
    int join_hops = 0;
    std::string out;
    std::string config;
    bool serial = false;
};

struct DumpArgs {
    std::string topology = "grid:10,10";
    std::uint64_t seed = 0;
    int dodag_slots = 0;
    double p = 0.6;
    std::string m = "1";
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("empty entry in list: " + text);
        out.push_back(item);
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("not a number: " + s);
    return v;
}

int to_int(const std::string& s) {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument("not an integer: " + s);
    return v;
}

// Flat key=value file; each entry becomes "--key value" ahead of the real
// command line so explicit flags win.
std::vector<std::string> config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file " + path);
    std::vector<std::string> args;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line without '=': " + line);
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key == "config") throw std::invalid_argument("config files cannot include other config files");
        if (key == "serial") {
            if (value == "true" || value == "1") args.push_back("--serial");
            continue;
        }
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

std::string find_config(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return {};
}

ExperimentConfig build_config(const RunArgs& a) {
    ExperimentConfig c;
    if (a.engine == "maer")
        c.engines = {EngineKind::maer};
    else if (a.engine == "sync")
        c.engines = {EngineKind::synchronous};
    else if (a.engine == "both")
        c.engines = {EngineKind::maer, EngineKind::synchronous};
    else
        throw std::invalid_argument("engine must be maer, sync or both");
    c.topology = parse_topology(a.topology);
    c.p.clear();
    for (const auto& s : split_list(a.p)) c.p.push_back(to_double(s));
    c.q.clear();
    for (const auto& s : split_list(a.q)) c.q.push_back(to_double(s));
    c.m.clear();
    for (const auto& s : split_list(a.m)) c.m.push_back(CoherenceTime::parse(s));
    c.n.clear();
    for (const auto& s : split_list(a.consumers)) c.n.push_back(to_int(s));
    c.d_star.clear();
    if (trim(a.d_star) == "3n") {
        c.d_star_three_n = true;
    } else {
        for (const auto& s : split_list(a.d_star)) c.d_star.push_back(to_double(s));
    }
    c.delta = a.delta;
    c.trials = a.trials;
    c.slots = a.slots;
    c.seed = a.seed;
    c.fusion_mode = parse_fusion_mode(a.fusion_mode);
    c.accounting = parse_accounting(a.accounting);
    c.join_hops_per_slot = a.join_hops;
    c.validate();
    return c;
}

int do_run(const RunArgs& a, std::ostream& out) {
    auto config = build_config(a);
    auto series = a.serial ? run_experiment_serial(config) : run_experiment_parallel(config);
    if (a.out.empty())
        emit_csv(series, out);
    else
        emit_csv(series, a.out);
    return kExitOk;
}

int do_verify(std::ostream& out) {
    bool ok = true;
    for (const auto& check : verify::run_verification_suite()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", check.value);
        out << check.name << ' ' << buf << (check.passed() ? "" : "  FAILED") << '\n';
        ok = ok && check.passed();
    }
    return ok ? kExitOk : kExitRuntime;
}

int do_dump(const DumpArgs& a, std::ostream& out) {
    auto topo = build_topology(parse_topology(a.topology), a.seed);
    if (a.dodag_slots <= 0) {
        write_edge_list(out, topo);
        return kExitOk;
    }
    QuantumParams params{a.p, 1.0, CoherenceTime::parse(a.m)};
    params.validate();
    EntanglementPool pool(topo);
    Dodag dodag(topo, center_node(topo));
    auto rng = derive_stream(a.seed, {3});
    for (int s = 0; s < a.dodag_slots; ++s) {
        dodag.detach(pool.advance_age(params));
        pool.attempt_generation(params, rng);
        dodag.join_round(pool, s);
    }
    dodag.write_table(out);
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multipartite asynchronous entanglement routing simulator", "ghz_router"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Run an experiment sweep and write CSV");
    run->add_option("--engine", run_args.engine, "maer | sync | both")->capture_default_str();
    run->add_option("--topology", run_args.topology, "grid:R,C | barbell:K | random:N,P | path:N")
        ->capture_default_str();
    run->add_option("--p", run_args.p, "Link generation probability (comma list)")->capture_default_str();
    run->add_option("--q", run_args.q, "Repeater operation probability (comma list)")->capture_default_str();
    run->add_option("--m", run_args.m, "Coherence time in slots (comma list, 'inf' allowed)")->capture_default_str();
    run->add_option("--consumers", run_args.consumers, "Consumer count n (comma list)")->capture_default_str();
    run->add_option("--d-star", run_args.d_star, "Target group distance (comma list) or '3n'")->capture_default_str();
    run->add_option("--delta", run_args.delta, "Distance tolerance in hops")->capture_default_str();
    run->add_option("--trials", run_args.trials, "Consumer sets per sweep point (N)")->capture_default_str();
    run->add_option("--slots", run_args.slots, "Slots per trial")->capture_default_str();
    auto* seed_opt = run->add_option("--seed", run_args.seed, "Master seed (else $GHZ_ROUTER_SEED, else 0)");
    run->add_option("--fusion-mode", run_args.fusion_mode, "uniform_q | optical_half_power")->capture_default_str();
    run->add_option("--accounting", run_args.accounting, "expected | bernoulli")->capture_default_str();
    run->add_option("--join-hops-per-slot", run_args.join_hops, "DODAG layers admitted per slot (0 = unbounded)")
        ->capture_default_str();
    run->add_option("--out", run_args.out, "CSV destination (default stdout)");
    run->add_option("--config", run_args.config, "Flat key=value file mirroring the flags");
    run->add_flag("--serial", run_args.serial, "Use the single-threaded reference path");

    auto* verify_cmd = app.add_subcommand("verify", "Run the state-vector checks of swap, fusion and fan-out");

    DumpArgs dump_args;
    auto* dump = app.add_subcommand("topo-dump", "Print the edge list, or a DODAG table after some slots");
    dump->add_option("--topology", dump_args.topology)->capture_default_str();
    dump->add_option("--seed", dump_args.seed)->capture_default_str();
    dump->add_option("--dodag-slots", dump_args.dodag_slots, "Grow the DODAG this many slots and print it");
    dump->add_option("--p", dump_args.p)->capture_default_str();
    dump->add_option("--m", dump_args.m)->capture_default_str();

    try {
        std::vector<std::string> full = args;
        if (!full.empty() && full[0] == "run") {
            auto path = find_config(full);
            if (!path.empty()) {
                auto extra = config_args(path);
                full.insert(full.begin() + 1, extra.begin(), extra.end());
            }
        }
        std::vector<std::string> reversed(full.rbegin(), full.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << app.help();
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (run->parsed()) {
            if (seed_opt->count() == 0) {
                if (const char* env = std::getenv("GHZ_ROUTER_SEED")) run_args.seed = std::stoull(env);
            }
            return do_run(run_args, out);
        }
        if (verify_cmd->parsed()) return do_verify(out);
        if (dump->parsed()) return do_dump(dump_args, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace ghz
