#include "uiground/stage.hpp"

#include <cctype>
#include <cmath>

#include <nlohmann/json.hpp>

namespace uiground {

void AscConfig::validate() const {
    if (max_stages < 1) throw ValidationError("AscConfig: max_stages must be >= 1");
    arp.validate();
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

}  // namespace

ToolCall parse_tool_call(std::string_view raw_text) {
    constexpr std::string_view open = "<tool_call>";
    constexpr std::string_view close = "</tool_call>";
    auto start = raw_text.find(open);
    if (start == std::string_view::npos) return ToolCall::absent;
    auto body_start = start + open.size();
    auto end = raw_text.find(close, body_start);
    if (end == std::string_view::npos) return ToolCall::absent;
    std::string_view body = trim(raw_text.substr(body_start, end - body_start));
    if (iequals(body, "yes")) return ToolCall::yes;
    if (iequals(body, "no")) return ToolCall::no;
    return ToolCall::absent;
}

namespace {

bool grid_covers_region(const PatchGrid& g, const PixelBox& region) {
    return std::abs(g.image_w - region.width()) <= 1e-9 &&
           std::abs(g.image_h - region.height()) <= 1e-9;
}

}  // namespace

StageTrace ground(const ImageRef& image, const std::string& instruction, Backend& backend,
                  const AscConfig& cfg) {
    cfg.validate();
    if (!(image.width > 0.0 && image.height > 0.0))
        throw ValidationError("ground: image dimensions must be known and positive");

    StageTrace trace;
    trace.image = image.ref;
    trace.image_w = image.width;
    trace.image_h = image.height;
    trace.instruction = instruction;

    PixelBox region{0.0, 0.0, image.width, image.height};
    for (int stage = 1;; ++stage) {
        ModelResponse resp = [&] {
            try {
                return backend.respond({image, region, stage, instruction});
            } catch (const BackendError& e) {
                trace.error = e.what();
                throw EpisodeError(std::string("backend failed at stage ") +
                                       std::to_string(stage) + ": " + e.what(),
                                   trace, e.kind);
            } catch (const std::exception& e) {
                trace.error = e.what();
                throw EpisodeError(std::string("backend failed at stage ") +
                                       std::to_string(stage) + ": " + e.what(),
                                   trace);
            }
        }();
        if (!grid_covers_region(resp.attention.grid(), region)) {
            trace.error = "attention grid does not cover the queried region";
            throw EpisodeError("attention grid/region mismatch at stage " + std::to_string(stage),
                               trace, BackendError::Kind::grid_mismatch);
        }

        ToolCall tool = resp.tool_call;
        PixelPoint local = argmax_point(resp.attention);
        PixelPoint global = local_to_global(region, local);
        trace.stages.push_back({region, std::move(resp), global, tool});

        // absent is treated as no: fail safe to single-stage behavior.
        bool wants_more = tool == ToolCall::yes;
        if (wants_more && stage < cfg.max_stages) {
            const AttentionMap& attn = trace.stages.back().response.attention;
            PixelBox crop_local = arp_crop(attn, cfg.arp);
            PixelBox crop = crop_local.translated(region.x1, region.y1);
            // Pixel-cropping backends need integer rectangles: snap outward,
            // then intersect with the current region to keep stages nested.
            crop = {std::max(std::floor(crop.x1), region.x1),
                    std::max(std::floor(crop.y1), region.y1),
                    std::min(std::ceil(crop.x2), region.x2),
                    std::min(std::ceil(crop.y2), region.y2)};
            region = crop;
            continue;
        }
        if (wants_more && !cfg.force_final_on_budget) {
            trace.error = "stage budget exhausted with a pending tool call";
            throw EpisodeError("stage budget exhausted with a pending tool call", trace);
        }
        trace.final_point = global;
        trace.stages_used = stage;
        return trace;
    }
}

nlohmann::json trace_to_json(const StageTrace& trace) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : trace.stages) {
        stages.push_back({
            {"region", {s.query_region.x1, s.query_region.y1, s.query_region.x2, s.query_region.y2}},
            {"point", {s.point_global.x, s.point_global.y}},
            {"tool_call", to_string(s.tool_call)},
        });
    }
    nlohmann::json j{
        {"id", trace.id},
        {"image", trace.image},
        {"image_w", trace.image_w},
        {"image_h", trace.image_h},
        {"instruction", trace.instruction},
        {"stages", std::move(stages)},
        {"stages_used", trace.stages_used},
    };
    if (trace.error) {
        j["error"] = *trace.error;
        j["final_point"] = nullptr;
    } else {
        j["final_point"] = {trace.final_point.x, trace.final_point.y};
    }
    return j;
}

}  // namespace uiground
