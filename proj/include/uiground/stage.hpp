#pragma once

// Multi-stage inference state machine: query the backend, parse its tool-call
// decision, crop via the attention-driven region proposal, re-query, and remap
// coordinates back to the full image.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uiground/backend.hpp"
#include "uiground/region.hpp"

namespace uiground {

struct AscConfig {
    int max_stages = 2;
    ArpConfig arp{};
    // When the budget is exhausted with a pending tool call, finalize with the
    // current point (true) or fail the episode (false).
    bool force_final_on_budget = true;

    void validate() const;
};

struct StageRecord {
    PixelBox query_region;  // full-image coordinates
    ModelResponse response;
    PixelPoint point_global;
    ToolCall tool_call = ToolCall::absent;
};

// Full record of one grounding episode. Stage 1 always queries the full
// image; final_point equals the last stage's global point.
struct StageTrace {
    std::string id;  // set by callers that track samples
    std::string image;
    double image_w = 0.0;
    double image_h = 0.0;
    std::string instruction;
    std::vector<StageRecord> stages;
    PixelPoint final_point;
    int stages_used = 0;
    std::optional<std::string> error;  // set when the episode aborted
};

// Episode failure carrying everything recorded up to the failing stage.
struct EpisodeError : Error {
    StageTrace partial;
    std::optional<BackendError::Kind> backend_kind;

    EpisodeError(const std::string& msg, StageTrace trace,
                 std::optional<BackendError::Kind> kind = std::nullopt)
        : Error(msg), partial(std::move(trace)), backend_kind(kind) {}
};

// First well-formed <tool_call>...</tool_call> span decides: "yes"/"no" after
// trimming, case-insensitive. Anything else (including no span) is absent.
ToolCall parse_tool_call(std::string_view raw_text);

// Runs up to cfg.max_stages observation stages. Per stage: the predicted
// point is the attention argmax patch center mapped into full-image
// coordinates; a yes tool call with budget remaining crops via arp_crop in
// the stage's local frame and recurses on the crop.
StageTrace ground(const ImageRef& image, const std::string& instruction, Backend& backend,
                  const AscConfig& cfg);

// Lean episode serialization (regions, decisions, points; no attention
// matrices). Schema documented in docs/formats.md.
nlohmann::json trace_to_json(const StageTrace& trace);

}  // namespace uiground
