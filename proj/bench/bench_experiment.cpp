// Times the serial reference against the OpenMP path on one sweep and checks
// that both emit the same CSV.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "ghz/harness.hpp"

using namespace ghz;

namespace {

template <typename F>
std::pair<double, std::string> timed(F&& run) {
    const auto start = std::chrono::steady_clock::now();
    auto series = run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream out;
    emit_csv(series, out);
    return {secs, out.str()};
}

}  // namespace

int main(int argc, char** argv) {
    ExperimentConfig c;
    c.topology = GridKind{10, 10};
    c.m = {CoherenceTime(1), CoherenceTime(4), CoherenceTime::infinite()};
    c.trials = argc > 1 ? std::atoi(argv[1]) : 20;
    c.slots = argc > 2 ? std::atoi(argv[2]) : 2000;
    c.seed = 1;

    auto [serial_secs, serial_csv] = timed([&] { return run_experiment_serial(c); });
    auto [parallel_secs, parallel_csv] = timed([&] { return run_experiment_parallel(c); });
    const double slots = 2.0 * 3.0 * c.trials * c.slots;

    std::printf("threads           %d\n", omp_get_max_threads());
    std::printf("serial            %.3f s  (%.2f us/slot)\n", serial_secs, 1e6 * serial_secs / slots);
    std::printf("parallel          %.3f s  (%.2f us/slot)\n", parallel_secs, 1e6 * parallel_secs / slots);
    std::printf("speedup           %.2fx\n", serial_secs / parallel_secs);
    std::printf("identical output  %s\n", serial_csv == parallel_csv ? "yes" : "NO");
    return serial_csv == parallel_csv ? 0 : 1;
}
