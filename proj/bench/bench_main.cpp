// Benchmark: production crop-proposal kernel vs the serial brute-force
// reference, and OpenMP-parallel evaluation vs the serial loop. Both
// comparisons also verify that the fast path reproduces the reference output.

#include <chrono>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "support/arp_reference.hpp"
#include "support/testutil.hpp"
#include "uiground/eval.hpp"

using namespace uiground;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void bench_arp(int n_maps) {
    std::vector<AttentionMap> maps;
    maps.reserve(static_cast<std::size_t>(n_maps));
    Rng rng(42);
    for (int t = 0; t < n_maps; ++t) maps.push_back(testutil::random_map(rng, 64, 64));
    ArpConfig cfg;

    std::vector<PixelBox> fast(maps.size()), slow(maps.size());
    auto t0 = Clock::now();
    for (std::size_t i = 0; i < maps.size(); ++i) fast[i] = arp_crop(maps[i], cfg);
    double fast_s = seconds_since(t0);

    t0 = Clock::now();
    for (std::size_t i = 0; i < maps.size(); ++i) slow[i] = reference::arp_crop(maps[i], cfg);
    double slow_s = seconds_since(t0);

    int mismatches = 0;
    for (std::size_t i = 0; i < maps.size(); ++i)
        if (!(fast[i] == slow[i])) ++mismatches;

    std::printf("crop proposal   %6d maps   union-find %7.1f us/map   flood-fill ref %7.1f us/map"
                "   speedup %4.2fx   mismatches %d\n",
                n_maps, fast_s / n_maps * 1e6, slow_s / n_maps * 1e6, slow_s / fast_s, mismatches);
}

void bench_eval(int n_samples) {
    auto samples = testutil::make_dataset(n_samples, 7);
    SyntheticModelSpec base;
    base.noise_frac = {0.05};
    base.tool_policy = ToolPolicy::oracle;
    auto factory = testutil::synthetic_factory(base, 3);
    AscConfig cfg;

    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 2) threads = 2;

    EvalOptions serial;
    serial.parallelism = 1;
    EvalOptions parallel;
    parallel.parallelism = threads;

    auto t0 = Clock::now();
    auto r1 = evaluate(samples, factory, cfg, serial);
    double serial_s = seconds_since(t0);

    t0 = Clock::now();
    auto r2 = evaluate(samples, factory, cfg, parallel);
    double parallel_s = seconds_since(t0);

    bool identical = r1.report == r2.report && r1.traces.size() == r2.traces.size();
    if (identical)
        for (std::size_t i = 0; i < r1.traces.size(); ++i)
            identical &= trace_to_json(r1.traces[i]) == trace_to_json(r2.traces[i]);

    std::printf("evaluation      %6d samples  serial %7.2f ms      omp x%-2d %14.2f ms"
                "   speedup %4.2fx   outputs %s\n",
                n_samples, serial_s * 1e3, threads, parallel_s * 1e3, serial_s / parallel_s,
                identical ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    int n_maps = argc > 1 ? std::atoi(argv[1]) : 1500;
    int n_samples = argc > 2 ? std::atoi(argv[2]) : 1500;
    bench_arp(n_maps);
    bench_eval(n_samples);
    return 0;
}
