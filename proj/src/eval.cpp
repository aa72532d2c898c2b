#include "uiground/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace uiground {

namespace {

PixelBox box_from_json(const nlohmann::json& arr, const char* what) {
    if (!arr.is_array() || arr.size() != 4)
        throw ValidationError(std::string(what) + " must be an array [x1, y1, x2, y2]");
    for (const auto& v : arr)
        if (!v.is_number()) throw ValidationError(std::string(what) + " entries must be numbers");
    PixelBox b{arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(),
               arr[3].get<double>()};
    require_valid(b, what);
    return b;
}

}  // namespace

GroundingSample sample_from_json(const nlohmann::json& row) {
    if (!row.is_object()) throw ValidationError("row must be a JSON object");
    for (const char* key : {"id", "image", "image_w", "image_h", "instruction", "bbox", "category"})
        if (!row.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");

    GroundingSample s;
    s.id = row.at("id").get<std::string>();
    s.image = row.at("image").get<std::string>();
    s.image_w = row.at("image_w").get<double>();
    s.image_h = row.at("image_h").get<double>();
    s.instruction = row.at("instruction").get<std::string>();
    s.category = row.at("category").get<std::string>();
    if (!(s.image_w > 0.0 && s.image_h > 0.0))
        throw ValidationError("image_w/image_h must be positive");
    if (s.instruction.empty()) throw ValidationError("instruction must be non-empty");

    PixelBox raw = box_from_json(row.at("bbox"), "bbox");
    if (raw.x2 < 0.0 || raw.y2 < 0.0 || raw.x1 > s.image_w || raw.y1 > s.image_h)
        throw ValidationError("bbox lies entirely outside the image");
    s.gt_bbox = clamp_box(raw, s.image_w, s.image_h);
    return s;
}

Dataset load_dataset(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);

    Dataset ds;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            nlohmann::json row = nlohmann::json::parse(line);
            ds.samples.push_back(sample_from_json(row));
            ds.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            if (strict)
                throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
            ds.skipped.push_back({line_no, e.what()});
        }
    }
    return ds;
}

namespace {

struct SampleResult {
    StageTrace trace;
    bool correct = false;
    bool failed = false;
    std::string failure;
};

SampleResult run_sample(const GroundingSample& s, const BackendFactory& factory,
                        const AscConfig& cfg) {
    SampleResult r;
    try {
        auto backend = factory(s);
        r.trace = ground({s.image, s.image_w, s.image_h}, s.instruction, *backend, cfg);
        r.trace.id = s.id;
        r.correct = point_in_box(r.trace.final_point, s.gt_bbox);
    } catch (const EpisodeError& e) {
        r.trace = e.partial;
        r.trace.id = s.id;
        r.failed = true;
        r.failure = e.what();
    } catch (const std::exception& e) {
        r.trace.id = s.id;
        r.trace.image = s.image;
        r.trace.image_w = s.image_w;
        r.trace.image_h = s.image_h;
        r.trace.instruction = s.instruction;
        r.trace.error = e.what();
        r.failed = true;
        r.failure = e.what();
    }
    return r;
}

template <typename Fn>
void for_each_sample(std::size_t n, int parallelism, Fn&& fn) {
    if (parallelism <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
#pragma omp parallel for schedule(dynamic) num_threads(parallelism)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        fn(static_cast<std::size_t>(i));
}

}  // namespace

EvalOutcome evaluate(const std::vector<GroundingSample>& samples, const BackendFactory& factory,
                     const AscConfig& cfg, const EvalOptions& opts) {
    if (samples.empty()) throw ValidationError("evaluate: dataset is empty");
    cfg.validate();

    std::vector<SampleResult> results(samples.size());
    for_each_sample(samples.size(), opts.parallelism, [&](std::size_t i) {
        results[i] = run_sample(samples[i], factory, cfg);
    });

    if (opts.fail_hard)
        for (const auto& r : results)
            if (r.failed) throw Error("evaluate: sample " + r.trace.id + " failed: " + r.failure);

    // Deterministic aggregation: walk samples sorted by id regardless of the
    // order the episodes finished in.
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return samples[a].id < samples[b].id; });

    EvalOutcome out;
    for (std::size_t idx : order) {
        const auto& s = samples[idx];
        auto& r = results[idx];
        long stages = static_cast<long>(r.trace.stages.size());
        for (CategoryStats* stats : {&out.report.categories[s.category], &out.report.overall}) {
            stats->count += 1;
            stats->correct += r.correct ? 1 : 0;
            stats->multi_stage += stages >= 2 ? 1 : 0;
            stats->stage_sum += stages;
        }
        out.traces.push_back(std::move(r.trace));
    }
    return out;
}

const char* to_string(Difficulty d) {
    switch (d) {
        case Difficulty::easy: return "easy";
        case Difficulty::challenging: return "challenging";
        case Difficulty::unresolved: return "unresolved";
    }
    return "unresolved";
}

namespace {

Difficulty label_one(const GroundingSample& s, const BackendFactory& factory, const AscConfig& cfg,
                     std::string& failure) {
    AscConfig single = cfg;
    single.max_stages = 1;
    try {
        auto backend = factory(s);
        ImageRef image{s.image, s.image_w, s.image_h};
        StageTrace first = ground(image, s.instruction, *backend, single);
        if (point_in_box(first.final_point, s.gt_bbox)) return Difficulty::easy;

        // Forced second stage: crop the stage-1 attention and re-observe, even
        // if the model did not ask for it.
        const AttentionMap& attn = first.stages.front().response.attention;
        PixelBox crop = arp_crop(attn, cfg.arp);  // stage-1 local frame == global frame
        ModelResponse second = backend->respond({image, crop, 2, s.instruction});
        PixelPoint point = local_to_global(crop, argmax_point(second.attention));
        return point_in_box(point, s.gt_bbox) ? Difficulty::challenging : Difficulty::unresolved;
    } catch (const std::exception& e) {
        failure = e.what();
        return Difficulty::unresolved;
    }
}

}  // namespace

LabelOutcome label_difficulty(const std::vector<GroundingSample>& samples,
                              const BackendFactory& factory, const AscConfig& cfg,
                              const EvalOptions& opts) {
    if (samples.empty()) throw ValidationError("label_difficulty: dataset is empty");
    cfg.validate();

    LabelOutcome out;
    out.labels.resize(samples.size());
    std::vector<std::string> failures(samples.size());
    for_each_sample(samples.size(), opts.parallelism, [&](std::size_t i) {
        out.labels[i] = {i, label_one(samples[i], factory, cfg, failures[i])};
    });
    if (opts.fail_hard)
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (!failures[i].empty())
                throw Error("label_difficulty: sample " + samples[i].id + " failed: " +
                            failures[i]);
    for (const auto& l : out.labels) {
        switch (l.difficulty) {
            case Difficulty::easy: ++out.easy; break;
            case Difficulty::challenging: ++out.challenging; break;
            case Difficulty::unresolved: ++out.unresolved; break;
        }
    }
    return out;
}

namespace {

std::string fmt_pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
    return buf;
}

std::string fmt_mean(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

constexpr const char* kNoData = "—";  // em dash for zero-count cells

struct ReportColumns {
    std::vector<std::string> names;                 // categories then "Avg."
    std::vector<const CategoryStats*> stats;
};

ReportColumns columns_of(const EvalReport& report) {
    ReportColumns cols;
    for (const auto& [name, stats] : report.categories) {
        cols.names.push_back(name);
        cols.stats.push_back(&stats);
    }
    cols.names.push_back("Avg.");
    cols.stats.push_back(&report.overall);
    return cols;
}

std::string emit_markdown(const EvalReport& report) {
    ReportColumns cols = columns_of(report);
    std::ostringstream out;
    out << "| Metric |";
    for (const auto& n : cols.names) out << ' ' << n << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < cols.names.size(); ++i) out << "---|";
    out << '\n';
    auto row = [&](const char* metric, auto value) {
        out << "| " << metric << " |";
        for (const CategoryStats* s : cols.stats)
            out << ' ' << (s->count ? value(*s) : std::string(kNoData)) << " |";
        out << '\n';
    };
    row("Accuracy (%)", [](const CategoryStats& s) { return fmt_pct(s.accuracy()); });
    row("Tool call (%)", [](const CategoryStats& s) { return fmt_pct(s.tool_call_rate()); });
    row("Mean stages", [](const CategoryStats& s) { return fmt_mean(s.mean_stages()); });
    out << "| Samples |";
    for (const CategoryStats* s : cols.stats) out << ' ' << s->count << " |";
    out << '\n';
    return out.str();
}

std::string emit_csv(const EvalReport& report) {
    ReportColumns cols = columns_of(report);
    std::ostringstream out;
    out << "metric";
    for (const auto& n : cols.names) out << ',' << n;
    out << '\n';
    auto row = [&](const char* metric, auto value) {
        out << metric;
        for (const CategoryStats* s : cols.stats)
            out << ',' << (s->count ? value(*s) : std::string(kNoData));
        out << '\n';
    };
    row("accuracy_pct", [](const CategoryStats& s) { return fmt_pct(s.accuracy()); });
    row("tool_call_pct", [](const CategoryStats& s) { return fmt_pct(s.tool_call_rate()); });
    row("mean_stages", [](const CategoryStats& s) { return fmt_mean(s.mean_stages()); });
    out << "samples";
    for (const CategoryStats* s : cols.stats) out << ',' << s->count;
    out << '\n';
    return out.str();
}

nlohmann::json stats_to_json(const CategoryStats& s) {
    return {{"count", s.count},
            {"correct", s.correct},
            {"multi_stage", s.multi_stage},
            {"stage_sum", s.stage_sum},
            {"accuracy", s.accuracy()},
            {"tool_call_rate", s.tool_call_rate()},
            {"mean_stages", s.mean_stages()}};
}

CategoryStats stats_from_json(const nlohmann::json& j) {
    CategoryStats s;
    s.count = j.at("count").get<long>();
    s.correct = j.at("correct").get<long>();
    s.multi_stage = j.at("multi_stage").get<long>();
    s.stage_sum = j.at("stage_sum").get<long>();
    return s;
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json cats = nlohmann::json::object();
    for (const auto& [name, stats] : report.categories) cats[name] = stats_to_json(stats);
    return {{"categories", std::move(cats)},
            {"overall", stats_to_json(report.overall)},
            {"traces_ref", report.traces_ref}};
}

EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport r;
    for (const auto& [name, stats] : j.at("categories").items())
        r.categories[name] = stats_from_json(stats);
    r.overall = stats_from_json(j.at("overall"));
    r.traces_ref = j.at("traces_ref").get<std::string>();
    return r;
}

std::string emit_report(const EvalReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::markdown: return emit_markdown(report);
        case ReportFormat::csv: return emit_csv(report);
        case ReportFormat::json: return report_to_json(report).dump(2) + "\n";
    }
    throw ValidationError("emit_report: unknown format");
}

}  // namespace uiground
