// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. argv[1] must point at the uiground CLI binary (used by the
// determinism criterion).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "support/arp_reference.hpp"
#include "support/testutil.hpp"
#include "uiground/config.hpp"
#include "uiground/eval.hpp"
#include "uiground/http_backend.hpp"
#include "uiground/rewards.hpp"
#include "uiground/stub_server.hpp"
#include "uiground/util/png.hpp"

using namespace uiground;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// --- C1: region-proposal crop equals the brute-force oracle -----------------

bool c1_arp_oracle_equivalence(std::string& detail) {
    auto start = Clock::now();
    const double taus[] = {0.1, 0.3, 0.7};
    const int ks[] = {1, 5, 20};
    const int conns[] = {4, 8};
    const int n_maps = 1000;

    long long mismatches = 0;
    long long checks = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : mismatches, checks)
    for (int t = 0; t < n_maps; ++t) {
        Rng rng(mix64(0xA1u, static_cast<std::uint64_t>(t)));
        AttentionMap map = testutil::random_map(rng, 64, 64);
        for (double tau : taus)
            for (int k : ks)
                for (int conn : conns) {
                    ArpConfig cfg;
                    cfg.tau = tau;
                    cfg.k = k;
                    cfg.connectivity = conn;
                    PixelBox fast = arp_crop(map, cfg);
                    PixelBox slow = reference::arp_crop(map, cfg);
                    ++checks;
                    if (!(fast == slow)) ++mismatches;
                }
    }
    double elapsed = seconds_since(start);
    std::ostringstream d;
    d << checks << " comparisons, " << mismatches << " mismatches, " << std::fixed
      << std::setprecision(2) << elapsed << "s";
    detail = d.str();
    return mismatches == 0 && elapsed < 10.0;
}

// --- C2: reward exactness ----------------------------------------------------

bool c2_reward_exactness(std::string& detail) {
    RewardConfig cfg;
    const PixelBox gt{100, 100, 200, 150};
    auto rollout_at = [&](ToolCall tool, PixelPoint p) {
        Rollout r;
        r.tool_call = tool;
        r.point = p;
        r.gt_bbox = gt;
        r.raw_text = std::string("<tool_call>") + to_string(tool) + "</tool_call>";
        r.format_ok = true;
        return r;
    };

    bool point_ok =
        std::abs(point_reward(rollout_at(ToolCall::no, {150, 125}), cfg) - 1.0) <= 1e-9 &&
        std::abs(point_reward(rollout_at(ToolCall::no, {200, 125}), cfg) - std::exp(-0.5)) <=
            1e-9 &&
        std::abs(point_reward(rollout_at(ToolCall::no, {175, 137.5}), cfg) - std::exp(-0.25)) <=
            1e-9;

    bool tool_ok = tool_reward(rollout_at(ToolCall::no, {150, 125})) == 1.0 &&
                   tool_reward(rollout_at(ToolCall::no, {300, 300})) == 0.0 &&
                   tool_reward(rollout_at(ToolCall::yes, {150, 125})) == 0.0 &&
                   tool_reward(rollout_at(ToolCall::yes, {300, 300})) == 1.0;

    Rng rng(0xC2);
    bool bounded = true;
    for (int t = 0; t < 10000; ++t) {
        Rollout r;
        switch (t % 3) {
            case 0: r = Rollout::from_text("<tool_call>yes</tool_call>", {0, 0}, gt, cfg); break;
            case 1: r = Rollout::from_text("<tool_call>no</tool_call>", {0, 0}, gt, cfg); break;
            default: r = Rollout::from_text("garbled output", {0, 0}, gt, cfg); break;
        }
        r.point = {rng.uniform_range(-1000, 2000), rng.uniform_range(-1000, 2000)};
        double total = total_reward(r, cfg);
        bounded &= total >= 0.0 && total <= 3.0;
    }
    detail = std::string("analytic points ") + (point_ok ? "ok" : "FAIL") + ", truth table " +
             (tool_ok ? "ok" : "FAIL") + ", 10000 totals in [0,3] " + (bounded ? "ok" : "FAIL");
    return point_ok && tool_ok && bounded;
}

// --- C3: attention-loss properties -------------------------------------------

bool c3_attention_loss(std::string& detail) {
    Rng rng(0xC3);
    PatchGrid grid(8, 8, 28, 224, 224);
    bool self_ok = true, nonneg_ok = true;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> w(64);
        for (auto& v : w) v = rng.uniform() + 1e-4;
        auto p = normalize(AttentionMap(grid, w));
        self_ok &= std::abs(attention_kl(p, p)) <= 1e-12;
    }
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> w1(64), w2(64);
        for (auto& v : w1) v = rng.uniform() + 1e-4;
        for (auto& v : w2) v = rng.uniform() + 1e-4;
        auto p = normalize(AttentionMap(grid, w1));
        auto a = normalize(AttentionMap(grid, w2));
        nonneg_ok &= attention_kl(p, a) >= -1e-12;
    }
    PatchGrid g2(2, 2, 28, 56, 56);
    double onehot_vs_uniform = attention_kl(TargetDistribution(g2, {1, 0, 0, 0}),
                                            TargetDistribution(g2, {0.25, 0.25, 0.25, 0.25}));
    bool ln4_ok = std::abs(onehot_vs_uniform - std::log(4.0)) <= 1e-9;
    std::ostringstream d;
    d << "self-KL " << (self_ok ? "ok" : "FAIL") << ", non-negativity "
      << (nonneg_ok ? "ok" : "FAIL") << ", one-hot vs uniform-4 = " << onehot_vs_uniform;
    detail = d.str();
    return self_ok && nonneg_ok && ln4_ok;
}

// --- C4: advantage normalization ---------------------------------------------

bool c4_advantages(std::string& detail) {
    Rng rng(0xC4);
    double worst_mean = 0.0, worst_shift = 0.0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> rewards(8);
        for (auto& r : rewards) r = rng.uniform_range(0.0, 3.0);
        auto adv = group_advantages(rewards);
        double mean = 0;
        for (double a : adv) mean += a;
        mean /= 8.0;
        worst_mean = std::max(worst_mean, std::abs(mean));

        std::vector<double> shifted = rewards;
        for (auto& r : shifted) r += 5.25;
        auto adv2 = group_advantages(shifted);
        for (std::size_t i = 0; i < adv.size(); ++i)
            worst_shift = std::max(worst_shift, std::abs(adv[i] - adv2[i]));
    }
    std::ostringstream d;
    d << "worst |mean| " << worst_mean << ", worst shift delta " << worst_shift;
    detail = d.str();
    return worst_mean <= 1e-9 && worst_shift <= 1e-6;
}

// --- C5/C6: simulator-based stage behavior -----------------------------------

struct StageRunStats {
    double single_accuracy = 0.0;
    double adaptive_accuracy = 0.0;
    double adaptive_tool_rate = 0.0;
    double stage1_miss_rate = 0.0;
};

StageRunStats run_stage_comparison(std::uint64_t seed, double noise, int n) {
    auto samples = testutil::make_dataset(n, mix64(seed, 0x5EEDu));
    SyntheticModelSpec base;
    base.noise_frac = {noise};
    base.tool_policy = ToolPolicy::oracle;
    auto factory = testutil::synthetic_factory(base, seed);

    EvalOptions opts;
    opts.parallelism = 2;
    AscConfig single;
    single.max_stages = 1;
    AscConfig adaptive;
    adaptive.max_stages = 2;

    auto r_single = evaluate(samples, factory, single, opts);
    auto r_adaptive = evaluate(samples, factory, adaptive, opts);

    StageRunStats s;
    s.single_accuracy = r_single.report.overall.accuracy();
    s.adaptive_accuracy = r_adaptive.report.overall.accuracy();
    s.adaptive_tool_rate = r_adaptive.report.overall.tool_call_rate();
    s.stage1_miss_rate = 1.0 - s.single_accuracy;
    return s;
}

bool c5_adaptive_benefit(std::string& detail) {
    auto start = Clock::now();
    std::ostringstream d;
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        StageRunStats s = run_stage_comparison(seed, 0.05, 500);
        double gain = s.adaptive_accuracy - s.single_accuracy;
        bool seed_ok = s.stage1_miss_rate >= 0.5 && gain >= 0.15;
        ok &= seed_ok;
        d << "seed " << seed << ": miss1 " << std::fixed << std::setprecision(3)
          << s.stage1_miss_rate << " gain " << gain << (seed_ok ? "" : " FAIL") << "; ";
    }
    double elapsed = seconds_since(start);
    ok &= elapsed < 30.0;
    d << std::setprecision(2) << elapsed << "s";
    detail = d.str();
    return ok;
}

bool c6_adaptive_parsimony(std::string& detail) {
    StageRunStats s = run_stage_comparison(0xC6, 0.0, 500);
    std::ostringstream d;
    d << "accuracy " << s.adaptive_accuracy << ", tool rate " << s.adaptive_tool_rate;
    detail = d.str();
    return s.adaptive_accuracy == 1.0 && s.adaptive_tool_rate == 0.0;
}

// --- C7: difficulty-labeling partition ---------------------------------------

bool c7_label_partition(std::string& detail) {
    auto samples = testutil::make_dataset(300, 0xC7);
    SyntheticModelSpec base;
    base.noise_frac = {0.05, 0.0};  // noisy first look, exact after cropping
    base.tool_policy = ToolPolicy::oracle;
    EvalOptions opts;
    opts.parallelism = 2;
    auto outcome = label_difficulty(samples, testutil::synthetic_factory(base, 0xC7), AscConfig{},
                                    opts);
    long total = outcome.easy + outcome.challenging + outcome.unresolved;
    std::ostringstream d;
    d << "easy " << outcome.easy << " + challenging " << outcome.challenging << " + unresolved "
      << outcome.unresolved << " = " << total;
    detail = d.str();
    return total == static_cast<long>(samples.size()) && outcome.challenging > 0;
}

// --- C8: CLI determinism ------------------------------------------------------

int run_cmd(const std::string& cmd) {
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool c8_cli_determinism(std::string& detail) {
    testutil::TempDir dir("acceptance_c8");

    std::ostringstream data;
    for (const auto& s : testutil::make_dataset(80, 0xC8)) {
        nlohmann::json row{{"id", s.id},           {"image", s.image},
                           {"image_w", s.image_w}, {"image_h", s.image_h},
                           {"instruction", s.instruction},
                           {"bbox", {s.gt_bbox.x1, s.gt_bbox.y1, s.gt_bbox.x2, s.gt_bbox.y2}},
                           {"category", s.category}};
        data << row.dump() << '\n';
    }
    testutil::write_file(dir.file("data.jsonl"), data.str());

    nlohmann::json cfg{{"seed", 12345},
                       {"parallelism", 2},
                       {"backend",
                        {{"synthetic", {{"noise_frac", 0.07}, {"tool_policy", "oracle"}}}}}};
    testutil::write_file(dir.file("config.json"), cfg.dump());

    std::string out_dir = dir.file("out");
    std::string cmd = "'" + g_cli + "' --config '" + dir.file("config.json") + "' eval '" +
                      dir.file("data.jsonl") + "' --out-dir '" + out_dir +
                      "' --format md --format csv --format json >/dev/null 2>&1";

    if (run_cmd(cmd) != 0) {
        detail = "first eval run failed";
        return false;
    }
    std::map<std::string, std::string> first;
    for (const char* f : {"report.md", "report.csv", "report.json", "traces.jsonl"})
        first[f] = testutil::read_file(out_dir + "/" + f);

    if (run_cmd(cmd) != 0) {
        detail = "second eval run failed";
        return false;
    }
    bool ok = true;
    std::ostringstream d;
    for (const char* f : {"report.md", "report.csv", "report.json", "traces.jsonl"}) {
        bool same = first[f] == testutil::read_file(out_dir + "/" + f) && !first[f].empty();
        ok &= same;
        d << f << (same ? " ok; " : " DIFFERS; ");
    }
    detail = d.str();
    return ok;
}

// --- C9: wire-protocol conformance --------------------------------------------

bool c9_wire_protocol(std::string& detail) {
    StubServer server(28);
    int port = server.start();
    HttpOptions opt;
    opt.endpoint = "http://127.0.0.1:" + std::to_string(port);
    opt.read_timeout_ms = 400;

    Image img{448, 448, 1, std::vector<std::uint8_t>(448 * 448, 127)};
    std::string png = png_encode(img);

    bool round_trip = false;
    try {
        auto resp = http_respond(opt, png, "tool:yes locate the button", 1, 448, 448);
        round_trip = resp.attention.grid().rows == 16 && resp.attention.grid().cols == 16 &&
                     resp.tool_call == ToolCall::yes;
    } catch (const std::exception&) {
    }

    auto kind_of = [&](const std::string& instruction) -> std::string {
        try {
            http_respond(opt, png, instruction, 1, 448, 448);
            return "none";
        } catch (const BackendError& e) {
            return to_string(e.kind);
        }
    };
    std::string timeout_kind = kind_of("sleep:1200");
    std::string schema_kind = kind_of("mode:bad-schema");
    std::string grid_kind = kind_of("mode:bad-grid");

    std::ostringstream d;
    d << "round trip " << (round_trip ? "ok" : "FAIL") << ", timeout->" << timeout_kind
      << ", schema->" << schema_kind << ", grid->" << grid_kind;
    detail = d.str();
    return round_trip && timeout_kind == "timeout" && schema_kind == "schema" &&
           grid_kind == "grid_mismatch";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-uiground-cli>\n");
        return 64;
    }
    g_cli = argv[1];

    struct Criterion {
        const char* name;
        std::function<bool(std::string&)> fn;
    };
    const Criterion criteria[] = {
        {"C1 region-proposal oracle equivalence", c1_arp_oracle_equivalence},
        {"C2 reward exactness", c2_reward_exactness},
        {"C3 attention-loss properties", c3_attention_loss},
        {"C4 advantage normalization", c4_advantages},
        {"C5 adaptive-stage benefit", c5_adaptive_benefit},
        {"C6 adaptive-stage parsimony", c6_adaptive_parsimony},
        {"C7 difficulty-labeling partition", c7_label_partition},
        {"C8 CLI determinism", c8_cli_determinism},
        {"C9 wire-protocol conformance", c9_wire_protocol},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %s (%s)\n", ok ? "PASS" : "FAIL", c.name, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failed;
    }
    if (failed) std::printf("%d criterion(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
}
