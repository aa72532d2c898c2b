// uiground: adaptive multi-stage GUI grounding engine.
//
// Subcommands: ground, eval, reward, label. Exit codes: 0 success,
// 1 validation error, 2 backend or IO error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uiground/config.hpp"
#include "uiground/eval.hpp"
#include "uiground/http_backend.hpp"
#include "uiground/rewards.hpp"
#include "uiground/synthetic.hpp"
#include "uiground/util/png.hpp"
#include "uiground/util/rng.hpp"

namespace {

using namespace uiground;

struct GlobalFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> parallelism;
    bool strict = false;
};

// Flag precedence: command line > config file > built-in defaults.
EngineConfig resolve_config(const GlobalFlags& flags) {
    EngineConfig cfg = flags.config_path.empty() ? EngineConfig{}
                                                 : load_engine_config(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.parallelism) cfg.parallelism = *flags.parallelism;
    cfg.validate();
    return cfg;
}

std::uint64_t backend_seed(const EngineConfig& cfg) {
    if (const auto* syn = std::get_if<SyntheticBackendConfig>(&cfg.backend);
        syn && syn->has_seed)
        return syn->spec.seed;
    return cfg.seed;
}

std::shared_ptr<Backend> single_backend(const EngineConfig& cfg) {
    if (const auto* syn = std::get_if<SyntheticBackendConfig>(&cfg.backend)) {
        if (!syn->has_gt_bbox)
            throw ValidationError(
                "the synthetic backend needs backend.synthetic.gt_bbox for single-image runs");
        SyntheticModelSpec spec = syn->spec;
        spec.seed = backend_seed(cfg);
        return std::make_shared<SyntheticBackend>(spec);
    }
    return std::make_shared<HttpBackend>(std::get<HttpBackendConfig>(cfg.backend).options);
}

BackendFactory dataset_factory(const EngineConfig& cfg) {
    if (const auto* syn = std::get_if<SyntheticBackendConfig>(&cfg.backend)) {
        SyntheticModelSpec base = syn->spec;
        std::uint64_t seed = backend_seed(cfg);
        return [base, seed](const GroundingSample& s) -> std::shared_ptr<Backend> {
            SyntheticModelSpec spec = base;
            spec.gt_bbox = s.gt_bbox;
            spec.seed = mix64(seed, hash_str(s.id));
            return std::make_shared<SyntheticBackend>(spec);
        };
    }
    auto shared = std::make_shared<HttpBackend>(std::get<HttpBackendConfig>(cfg.backend).options);
    return [shared](const GroundingSample&) { return shared; };
}

// Accepts either a readable PNG path or an explicit "WxH" size for backends
// that never look at pixels.
ImageRef resolve_image(const std::string& arg) {
    if (auto x = arg.find('x');
        x != std::string::npos && arg.find_first_not_of("0123456789x") == std::string::npos) {
        double w = std::stod(arg.substr(0, x));
        double h = std::stod(arg.substr(x + 1));
        if (w > 0 && h > 0) return {arg, w, h};
    }
    std::ifstream in(arg, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + arg);
    std::ostringstream buf;
    buf << in.rdbuf();
    PngDims dims = png_sniff_dims(buf.str());
    return {arg, static_cast<double>(dims.width), static_cast<double>(dims.height)};
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
}

int cmd_ground(const GlobalFlags& flags, const std::string& image_arg,
               const std::string& instruction, std::optional<int> max_stages,
               const std::string& trace_path) {
    EngineConfig cfg = resolve_config(flags);
    if (max_stages) cfg.asc.max_stages = *max_stages;
    cfg.asc.validate();

    ImageRef image = resolve_image(image_arg);
    auto backend = single_backend(cfg);
    StageTrace trace = ground(image, instruction, *backend, cfg.asc);

    if (!trace_path.empty()) write_text(trace_path, trace_to_json(trace).dump() + "\n");
    std::cout << static_cast<long long>(std::llround(trace.final_point.x)) << ' '
              << static_cast<long long>(std::llround(trace.final_point.y))
              << " stages=" << trace.stages_used << '\n';
    return 0;
}

int cmd_eval(const GlobalFlags& flags, const std::string& dataset_path,
             const std::string& out_dir, std::vector<std::string> formats,
             std::string traces_path, bool fail_hard) {
    EngineConfig cfg = resolve_config(flags);
    Dataset ds = load_dataset(dataset_path, flags.strict);
    for (const auto& issue : ds.skipped)
        std::cerr << "warning: " << dataset_path << ":" << issue.line << ": skipped ("
                  << issue.message << ")\n";
    if (ds.samples.empty()) throw ValidationError("dataset has no valid rows");

    EvalOptions opts;
    opts.parallelism = cfg.parallelism;
    opts.fail_hard = fail_hard;
    auto outcome = evaluate(ds.samples, dataset_factory(cfg), cfg.asc, opts);

    std::filesystem::create_directories(out_dir);
    if (traces_path.empty()) traces_path = (std::filesystem::path(out_dir) / "traces.jsonl").string();
    std::ostringstream traces;
    for (const auto& t : outcome.traces) traces << trace_to_json(t).dump() << '\n';
    write_text(traces_path, traces.str());
    outcome.report.traces_ref = traces_path;

    if (formats.empty()) formats.push_back("md");
    std::map<std::string, std::pair<ReportFormat, const char*>> table{
        {"md", {ReportFormat::markdown, "report.md"}},
        {"csv", {ReportFormat::csv, "report.csv"}},
        {"json", {ReportFormat::json, "report.json"}},
    };
    for (const auto& f : formats) {
        auto it = table.find(f);
        if (it == table.end()) throw ValidationError("unknown report format: " + f);
        auto [format, filename] = it->second;
        write_text((std::filesystem::path(out_dir) / filename).string(),
                   emit_report(outcome.report, format));
    }

    auto pct = [](double fraction) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
        return std::string(buf);
    };
    std::cout << "accuracy=" << pct(outcome.report.overall.accuracy())
              << "% tool_call_rate=" << pct(outcome.report.overall.tool_call_rate())
              << "% samples=" << outcome.report.overall.count << '\n';
    return 0;
}

int cmd_reward(const GlobalFlags& flags, const std::string& rollouts_path,
               const std::string& out_path) {
    EngineConfig cfg = resolve_config(flags);

    std::ifstream in(rollouts_path);
    if (!in) throw IoError("cannot open rollouts: " + rollouts_path);

    struct Row {
        nlohmann::json json;
        double total = 0.0;
        std::optional<std::string> group;
    };
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            nlohmann::json row = nlohmann::json::parse(line);
            for (const char* key : {"raw_text", "point", "gt_bbox"})
                if (!row.contains(key))
                    throw ValidationError(std::string("missing field \"") + key + "\"");
            PixelPoint point{row.at("point").at(0).get<double>(),
                             row.at("point").at(1).get<double>()};
            PixelBox gt{row.at("gt_bbox").at(0).get<double>(), row.at("gt_bbox").at(1).get<double>(),
                        row.at("gt_bbox").at(2).get<double>(), row.at("gt_bbox").at(3).get<double>()};
            require_valid(gt, "gt_bbox");
            Rollout r = Rollout::from_text(row.at("raw_text").get<std::string>(), point, gt,
                                           cfg.rewards);
            Row out;
            out.json = std::move(row);
            out.json["format_reward"] = format_reward(r, cfg.rewards);
            out.json["tool_reward"] = tool_reward(r);
            out.json["point_reward"] = point_reward(r, cfg.rewards);
            out.total = total_reward(r, cfg.rewards);
            out.json["total_reward"] = out.total;
            if (out.json.contains("group_id"))
                out.group = out.json.at("group_id").is_string()
                                ? out.json.at("group_id").get<std::string>()
                                : out.json.at("group_id").dump();
            else
                std::cerr << "warning: " << rollouts_path << ":" << line_no
                          << ": missing group_id, advantage omitted\n";
            rows.push_back(std::move(out));
        } catch (const std::exception& e) {
            if (flags.strict)
                throw ValidationError(rollouts_path + ":" + std::to_string(line_no) + ": " +
                                      e.what());
            std::cerr << "warning: " << rollouts_path << ":" << line_no << ": skipped ("
                      << e.what() << ")\n";
        }
    }

    // Advantages per group, in input order within each group.
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].group) groups[*rows[i].group].push_back(i);
    for (const auto& [group, members] : groups) {
        if (members.size() < 2) {
            std::cerr << "warning: group \"" << group << "\" has " << members.size()
                      << " rollout(s), advantage omitted\n";
            continue;
        }
        std::vector<double> totals;
        totals.reserve(members.size());
        for (std::size_t i : members) totals.push_back(rows[i].total);
        auto adv = group_advantages(totals);
        for (std::size_t n = 0; n < members.size(); ++n)
            rows[members[n]].json["advantage"] = adv[n];
    }

    std::ostringstream out;
    for (const auto& r : rows) out << r.json.dump() << '\n';
    if (out_path.empty() || out_path == "-")
        std::cout << out.str();
    else
        write_text(out_path, out.str());
    return 0;
}

int cmd_label(const GlobalFlags& flags, const std::string& dataset_path,
              const std::string& out_path) {
    EngineConfig cfg = resolve_config(flags);
    Dataset ds = load_dataset(dataset_path, flags.strict);
    for (const auto& issue : ds.skipped)
        std::cerr << "warning: " << dataset_path << ":" << issue.line << ": skipped ("
                  << issue.message << ")\n";
    if (ds.samples.empty()) throw ValidationError("dataset has no valid rows");

    EvalOptions opts;
    opts.parallelism = cfg.parallelism;
    auto outcome = label_difficulty(ds.samples, dataset_factory(cfg), cfg.asc, opts);

    // Labeled rows keep their original fields plus "difficulty"; unresolved
    // samples carry no usable stage label and are dropped from the output.
    std::ostringstream out;
    for (const auto& l : outcome.labels) {
        if (l.difficulty == Difficulty::unresolved) continue;
        nlohmann::json row = ds.rows[l.index];
        row["difficulty"] = to_string(l.difficulty);
        out << row.dump() << '\n';
    }
    if (out_path.empty() || out_path == "-")
        std::cout << out.str();
    else
        write_text(out_path, out.str());

    std::cerr << "easy=" << outcome.easy << " challenging=" << outcome.challenging
              << " unresolved=" << outcome.unresolved << " total=" << ds.samples.size() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive multi-stage GUI grounding engine"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "engine config file (JSON)");
    app.add_option("--seed", flags.seed, "override the config seed");
    app.add_option("--parallelism", flags.parallelism, "parallel episode bound");
    app.add_flag("--strict", flags.strict, "abort on malformed input rows");

    std::string image, instruction, trace_path;
    std::optional<int> max_stages;
    auto* ground_cmd = app.add_subcommand("ground", "ground one instruction on one image");
    ground_cmd->add_option("image", image, "PNG path or WxH size")->required();
    ground_cmd->add_option("instruction", instruction, "natural-language instruction")->required();
    ground_cmd->add_option("--max-stages", max_stages, "override asc.max_stages");
    ground_cmd->add_option("--trace", trace_path, "write the episode trace JSON here");

    std::string dataset, out_dir = ".", traces_path, out_path;
    std::vector<std::string> formats;
    bool fail_hard = false;
    auto* eval_cmd = app.add_subcommand("eval", "run a grounding benchmark");
    eval_cmd->add_option("dataset", dataset, "dataset JSONL")->required();
    eval_cmd->add_option("--out-dir", out_dir, "report directory");
    eval_cmd->add_option("--format", formats, "report formats: md, csv, json (repeatable)");
    eval_cmd->add_option("--traces", traces_path, "trace JSONL path");
    eval_cmd->add_flag("--fail-hard", fail_hard, "abort on backend failures");

    std::string rollouts;
    auto* reward_cmd = app.add_subcommand("reward", "score rollouts and compute advantages");
    reward_cmd->add_option("rollouts", rollouts, "rollouts JSONL")->required();
    reward_cmd->add_option("--out", out_path, "output path (default stdout)");

    std::string label_dataset, label_out;
    auto* label_cmd = app.add_subcommand("label", "difficulty-label a dataset");
    label_cmd->add_option("dataset", label_dataset, "dataset JSONL")->required();
    label_cmd->add_option("--out", label_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ground_cmd->parsed()) return cmd_ground(flags, image, instruction, max_stages, trace_path);
        if (eval_cmd->parsed()) return cmd_eval(flags, dataset, out_dir, formats, traces_path, fail_hard);
        if (reward_cmd->parsed()) return cmd_reward(flags, rollouts, out_path);
        if (label_cmd->parsed()) return cmd_label(flags, label_dataset, label_out);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const EpisodeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const BackendError& e) {
        std::cerr << "error (" << to_string(e.kind) << "): " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
