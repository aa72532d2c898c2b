#pragma once

// Dataset ingestion, grounding-accuracy and tool-call-rate metrics,
// difficulty labeling, and report emission.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uiground/stage.hpp"

namespace uiground {

struct GroundingSample {
    std::string id;
    std::string image;  // file path or opaque reference
    double image_w = 0.0;
    double image_h = 0.0;
    std::string instruction;
    PixelBox gt_bbox;
    std::string category;
};

struct RowIssue {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct Dataset {
    std::vector<GroundingSample> samples;
    std::vector<nlohmann::json> rows;  // raw rows, aligned with samples
    std::vector<RowIssue> skipped;     // lenient mode only
};

// JSONL rows: {"id","image","image_w","image_h","instruction","bbox":[x1,y1,x2,y2],"category"}.
// Strict mode throws ValidationError naming the first bad line; lenient mode
// skips bad rows and records them.
Dataset load_dataset(const std::string& path, bool strict = true);
GroundingSample sample_from_json(const nlohmann::json& row);

struct CategoryStats {
    long count = 0;
    long correct = 0;
    long multi_stage = 0;  // episodes that used >= 2 stages
    long stage_sum = 0;

    double accuracy() const { return count ? static_cast<double>(correct) / count : 0.0; }
    double tool_call_rate() const { return count ? static_cast<double>(multi_stage) / count : 0.0; }
    double mean_stages() const { return count ? static_cast<double>(stage_sum) / count : 0.0; }

    bool operator==(const CategoryStats&) const = default;
};

struct EvalReport {
    std::map<std::string, CategoryStats> categories;  // sorted by category name
    CategoryStats overall;
    std::string traces_ref;  // where the episode traces were written, if anywhere

    bool operator==(const EvalReport&) const = default;
};

struct EvalOptions {
    int parallelism = 1;
    bool fail_hard = false;  // propagate backend failures instead of scoring them incorrect
};

// The synthetic backend is parameterized per sample (it must know the gt
// box); HTTP backends return one shared instance.
using BackendFactory = std::function<std::shared_ptr<Backend>(const GroundingSample&)>;

struct EvalOutcome {
    EvalReport report;
    std::vector<StageTrace> traces;  // sorted by sample id
};

// Runs one grounding episode per sample. Samples evaluate independently and
// may run concurrently up to opts.parallelism; aggregation order is fixed by
// sample id, so the outcome does not depend on scheduling.
EvalOutcome evaluate(const std::vector<GroundingSample>& samples, const BackendFactory& factory,
                     const AscConfig& cfg, const EvalOptions& opts = {});

enum class Difficulty { easy, challenging, unresolved };

const char* to_string(Difficulty d);

struct LabeledSample {
    std::size_t index = 0;  // into the input sample list
    Difficulty difficulty = Difficulty::unresolved;
};

struct LabelOutcome {
    std::vector<LabeledSample> labels;  // one per sample, input order
    long easy = 0;
    long challenging = 0;
    long unresolved = 0;
};

// Curation labels: correct in a single stage -> easy; otherwise correct after
// a forced attention crop + second stage -> challenging; otherwise
// unresolved. The second pass always crops, regardless of the stage-1 tool
// decision: the label measures whether cropping fixes the sample.
LabelOutcome label_difficulty(const std::vector<GroundingSample>& samples,
                              const BackendFactory& factory, const AscConfig& cfg,
                              const EvalOptions& opts = {});

enum class ReportFormat { markdown, csv, json };

// Deterministic bytes for a given report: category columns in sorted order,
// then "Avg.". Zero-count categories render their rates as an em dash.
std::string emit_report(const EvalReport& report, ReportFormat format);
nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

}  // namespace uiground
